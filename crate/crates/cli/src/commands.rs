use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rgs_core::analytics::{self, SweepGrid};
use rgs_core::checks;
use rgs_core::emitters::{self, OrderingKind};
use rgs_core::ldpc::{self, BsecParams, DEFAULT_MAX_ITERS};
use rgs_core::protocol::{self, ChainConfig};
use rgs_core::treecode::{p_x, p_z, BranchVector};
use serde::Serialize;

use crate::args::{EmittersArgs, LdpcArgs, SimulateArgs, SweepArgs, TreecodeArgs, VerifyArgs};
use crate::config::FileConfig;
use crate::error::CliError;

/// Rows ready for output, lines for standard error, and a failed check if any.
pub struct Outcome<T> {
    pub rows: Vec<T>,
    pub notes: Vec<String>,
    pub failure: Option<String>,
}

fn default_branch() -> BranchVector {
    BranchVector::new(vec![5, 11, 4]).expect("valid")
}

fn check_probabilities(name: &str, ps: &[f64]) -> Result<(), CliError> {
    match ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(CliError::Usage(format!("{name} value {p} outside [0, 1]"))),
        None => Ok(()),
    }
}

pub fn sweep(args: SweepArgs, file: &FileConfig) -> Result<Vec<analytics::RatePoint>, CliError> {
    let s = &file.sweep;
    let grid = SweepGrid {
        n: args.n.or(s.n.clone()).unwrap_or_else(|| (4..=200).step_by(4).collect()),
        k: args.k.or(s.k.clone()).unwrap_or_else(|| (1..=60).collect()),
        l_over_latt: args
            .l_over_latt
            .or(s.l_over_latt.clone())
            .unwrap_or_else(|| vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0]),
        l0_over_latt: args.l0_over_latt.or(s.l0_over_latt).unwrap_or(0.1),
        branch: args.branch.or(s.branch.clone()).unwrap_or_else(default_branch),
    };
    Ok(analytics::sweep(&grid)?)
}

#[derive(Debug, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub fusions: usize,
    pub fusions_ok: usize,
    pub stations_decoded: usize,
    pub decoded: bool,
    pub verified: bool,
}

pub fn simulate(args: SimulateArgs, file: &FileConfig, seed: u64) -> Result<Outcome<TrialRow>, CliError> {
    let s = &file.simulate;
    let n_r = args.n_r.or(s.n_r).unwrap_or(2);
    let l0 = args.l0_over_latt.or(s.l0_over_latt).unwrap_or(0.1);
    let trials = args.trials.or(s.trials).unwrap_or(500);
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let cfg = ChainConfig {
        l: (n_r + 1) as f64 * l0,
        l0,
        l_att: 1.0,
        n_r,
        n: args.n.or(s.n).unwrap_or(4),
        k: args.k.or(s.k).unwrap_or(2),
        branch: default_branch(),
        seed,
    };
    protocol::check_size_guard(&cfg)?;
    cfg.validate()?;
    let mut notes: Vec<String> = cfg.capacity_warning().map(|w| format!("warning: {w}")).into_iter().collect();
    let gens = protocol::sample_generators(&cfg);
    let results = protocol::run_trials(&cfg, &gens, trials)?;
    let summary = protocol::summarize(&results);
    notes.push(format!(
        "summary: trials={} decoded={} verified={} full_rank_rate={} verified_rate={}",
        summary.trials, summary.decoded, summary.verified, summary.full_rank_rate, summary.verified_rate
    ));
    let failure = (summary.verified != summary.decoded).then(|| {
        format!(
            "{} of {} decoded trials did not end in the expected Bell pairs",
            summary.decoded - summary.verified,
            summary.decoded
        )
    });
    let rows = results
        .iter()
        .map(|r| TrialRow {
            trial: r.trial,
            fusions: r.stations.iter().map(|s| s.fusion_successes.len()).sum(),
            fusions_ok: r
                .stations
                .iter()
                .map(|s| s.fusion_successes.iter().filter(|&&ok| ok).count())
                .sum(),
            stations_decoded: r.stations.iter().filter(|s| s.m.is_some()).count(),
            decoded: r.decoded,
            verified: r.verified,
        })
        .collect();
    Ok(Outcome { rows, notes, failure })
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
}

pub fn verify(args: VerifyArgs, file: &FileConfig, seed: u64) -> Result<Outcome<CheckRow>, CliError> {
    let trials = args.trials.or(file.verify.trials).unwrap_or(100);
    let reports = checks::run_all(trials, seed, args.inject_bad_q)?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.clone()).collect();
    let rows = reports
        .into_iter()
        .map(|r| CheckRow {
            passed: r.passed(),
            check: r.name,
            cases: r.cases,
            failures: r.failures,
        })
        .collect();
    let (notes, failure) = if failed.is_empty() {
        (vec!["all checks passed".into()], None)
    } else {
        (Vec::new(), Some(format!("failed checks: {}", failed.join(", "))))
    };
    Ok(Outcome { rows, notes, failure })
}

#[derive(Debug, Serialize)]
pub struct TreeRow {
    pub branch: String,
    pub eps: f64,
    pub p_x: f64,
    pub p_z: f64,
}

pub fn treecode(args: TreecodeArgs, file: &FileConfig) -> Result<Vec<TreeRow>, CliError> {
    let s = &file.treecode;
    let branches = args
        .branch
        .or(s.branch.clone())
        .unwrap_or_else(|| vec![default_branch(), BranchVector::new(vec![2, 3, 2]).expect("valid")]);
    let eps = args
        .eps
        .or(s.eps.clone())
        .unwrap_or_else(|| (0..=50).map(|i| i as f64 / 100.0).collect());
    check_probabilities("eps", &eps)?;
    Ok(branches
        .iter()
        .flat_map(|b| {
            eps.iter().map(move |&e| TreeRow {
                branch: b.to_string(),
                eps: e,
                p_x: p_x(b, e),
                p_z: p_z(b, e),
            })
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct LdpcRow {
    pub p_bsc: f64,
    pub p_bec: f64,
    pub failure_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub k: usize,
    pub trials: u64,
}

pub fn ldpc(args: LdpcArgs, file: &FileConfig, seed: u64) -> Result<Outcome<LdpcRow>, CliError> {
    let s = &file.ldpc;
    let n = args.n.or(s.n).unwrap_or(500);
    let k = args.k.or(s.k).unwrap_or(125);
    let col_weight = args.col_weight.or(s.col_weight).unwrap_or(3);
    let p_bsc = args
        .p_bsc
        .or(s.p_bsc.clone())
        .unwrap_or_else(|| vec![0.0, 0.02, 0.04, 0.06, 0.08, 0.1]);
    let p_bec = args
        .p_bec
        .or(s.p_bec.clone())
        .unwrap_or_else(|| vec![0.3, 0.4, 0.5, 0.55, 0.6, 0.65]);
    let trials = args.trials.or(s.trials).unwrap_or(100);
    let max_iters = args.max_iters.or(s.max_iters).unwrap_or(DEFAULT_MAX_ITERS);
    if trials == 0 || p_bsc.is_empty() || p_bec.is_empty() {
        return Err(CliError::Usage("ldpc grid is empty".into()));
    }
    check_probabilities("p_bsc", &p_bsc)?;
    check_probabilities("p_bec", &p_bec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let code = ldpc::gallager_construct(n, k, col_weight, &mut rng)?;
    let mut rows = Vec::with_capacity(p_bsc.len() * p_bec.len());
    for &pb in &p_bsc {
        for &pe in &p_bec {
            let est = ldpc::logical_error_mc(&code, BsecParams::new(pb, pe)?, trials, seed, max_iters)?;
            rows.push(LdpcRow {
                p_bsc: pb,
                p_bec: pe,
                failure_rate: est.rate,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
                n,
                k,
                trials,
            });
        }
    }
    let notes = vec![format!(
        "code: n={n} k={k} column weight {} row weight {} with {} four-cycles",
        code.col_weight(),
        code.row_weight(),
        code.four_cycles()
    )];
    Ok(Outcome {
        rows,
        notes,
        failure: None,
    })
}

pub fn emitters(args: EmittersArgs, file: &FileConfig, seed: u64) -> Result<Vec<emitters::HeightRecord>, CliError> {
    let s = &file.emitters;
    let ks = args.k.or(s.k.clone()).unwrap_or_else(|| (1..=4).collect());
    let ns = args.n.or(s.n.clone()).unwrap_or_else(|| (4..=10).collect());
    let instances = args.instances.or(s.instances).unwrap_or(20);
    let orderings = args
        .ordering
        .or(s.ordering.clone())
        .unwrap_or_else(|| OrderingKind::ALL.to_vec());
    if ks.is_empty() || ns.is_empty() || orderings.is_empty() || instances == 0 {
        return Err(CliError::Usage("emitters grid is empty".into()));
    }
    Ok(emitters::height_table(&ks, &ns, &orderings, instances, seed)?)
}
