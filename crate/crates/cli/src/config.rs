use std::path::Path;

use rgs_core::emitters::OrderingKind;
use rgs_core::treecode::BranchVector;
use serde::Deserialize;

use crate::args::Format;
use crate::error::CliError;

/// Contents of a `--config` file. Every key is optional; command-line flags
/// take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub sweep: SweepSection,
    pub simulate: SimulateSection,
    pub verify: VerifySection,
    pub treecode: TreecodeSection,
    pub ldpc: LdpcSection,
    pub emitters: EmittersSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    pub l_over_latt: Option<Vec<f64>>,
    pub l0_over_latt: Option<f64>,
    pub branch: Option<BranchVector>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub n_r: Option<usize>,
    pub trials: Option<u64>,
    pub l0_over_latt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub trials: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreecodeSection {
    pub branch: Option<Vec<BranchVector>>,
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdpcSection {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub col_weight: Option<usize>,
    pub p_bsc: Option<Vec<f64>>,
    pub p_bec: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmittersSection {
    pub k: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub instances: Option<usize>,
    pub ordering: Option<Vec<OrderingKind>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let cfg: FileConfig = toml::from_str(
            r#"
            seed = 9
            format = "json"
            [sweep]
            n = [10, 20]
            branch = [2, 3, 2]
            [emitters]
            ordering = ["a", "greedy"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.format, Some(Format::Json));
        assert_eq!(cfg.sweep.n, Some(vec![10, 20]));
        assert_eq!(cfg.sweep.branch, Some(BranchVector::new(vec![2, 3, 2]).unwrap()));
        assert_eq!(cfg.emitters.ordering, Some(vec![OrderingKind::A, OrderingKind::Greedy]));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_branches() {
        assert!(toml::from_str::<FileConfig>("[sweep]\nnn = [1]").is_err());
        assert!(toml::from_str::<FileConfig>("[sweep]\nbranch = [2, 0]").is_err());
    }
}
