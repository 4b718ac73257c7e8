//! Closed-form success probabilities and rates for the generalized and the
//! complete-graph repeater schemes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{binom_pmf, eps_d};
use crate::treecode::{p_x, p_z, BranchVector};

fn check_lengths(l0: f64, l_att: f64) -> Result<()> {
    if !(l0 > 0.0 && l_att > 0.0) || !l0.is_finite() || !l_att.is_finite() {
        return Err(Error::NonpositiveLength);
    }
    Ok(())
}

/// Fusion failure rate including transmission loss over one segment.
pub fn p_fail(l0: f64, l_att: f64) -> Result<f64> {
    check_lengths(l0, l_att)?;
    Ok(1.0 - 0.5 * (-l0 / l_att).exp())
}

/// Physical photon loss rate over half a segment.
pub fn loss_rate(l0: f64, l_att: f64) -> Result<f64> {
    check_lengths(l0, l_att)?;
    Ok(-(-l0 / (2.0 * l_att)).exp_m1())
}

/// Number of repeater stations on a chain of length `l` with spacing `l0`.
pub fn repeaters(l: f64, l0: f64) -> Result<usize> {
    if !(l > 0.0 && l0 > 0.0) {
        return Err(Error::NonpositiveLength);
    }
    let segments = l / l0;
    let rounded = segments.round();
    if rounded < 1.0 || (segments - rounded).abs() > 1e-9 * segments.max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "chain length {l} is not a whole number of {l0} segments"
        )));
    }
    Ok(rounded as usize - 1)
}

/// Logical measurement success probabilities of a tree-encoded qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeProbs {
    pub px: f64,
    pub pz: f64,
}

impl TreeProbs {
    pub fn new(b: &BranchVector, eps: f64) -> Self {
        TreeProbs {
            px: p_x(b, eps),
            pz: p_z(b, eps),
        }
    }

    fn end_factor(&self) -> f64 {
        (self.px + self.pz) / 2.0
    }
}

/// Neumaier-compensated sum; terms below 1e-300 are skipped.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for t in terms.filter(|t| t.abs() >= 1e-300) {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            c += (sum - s) + t;
        } else {
            c += (t - s) + sum;
        }
        sum = s;
    }
    sum + c
}

/// Per-station success probability of the generalized scheme with a
/// caller-supplied rank-deficiency table `eps(k, ñ)`.
pub fn r_rrgs_with(
    p_f: f64,
    probs: TreeProbs,
    k: usize,
    n: usize,
    eps: impl Fn(usize, usize) -> f64,
) -> f64 {
    let terms = (k..=n).map(|nt| {
        (1.0 - eps(k, nt))
            * binom_pmf(nt, n, 1.0 - p_f)
            * probs.px.powi(2 * nt as i32)
            * probs.pz.powi(2 * (n - nt) as i32)
    });
    compensated_sum(terms).clamp(0.0, 1.0)
}

/// Per-station success probability of the generalized scheme with a random code.
pub fn r_rrgs(l0: f64, l_att: f64, k: usize, n: usize, b: &BranchVector) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let probs = TreeProbs::new(b, loss_rate(l0, l_att)?);
    Ok(r_rrgs_with(p_fail(l0, l_att)?, probs, k, n, eps_d))
}

/// End-to-end success probability of the generalized scheme.
pub fn ps_rrgs(l0: f64, l: f64, l_att: f64, k: usize, n: usize, b: &BranchVector) -> Result<f64> {
    let nr = repeaters(l, l0)?;
    let r = r_rrgs(l0, l_att, k, n, b)?;
    let ends = TreeProbs::new(b, loss_rate(l0, l_att)?).end_factor();
    Ok(ends.powi(2 * k as i32) * r.powi(nr as i32))
}

/// Per-station success probability of the complete-graph scheme.
pub fn r_crgs(l0: f64, l_att: f64, n: usize, b: &BranchVector) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("need n >= 1".into()));
    }
    let p_f = p_fail(l0, l_att)?;
    let t = TreeProbs::new(b, loss_rate(l0, l_att)?);
    Ok((1.0 - p_f.powi(n as i32)) * t.px * t.px * t.pz.powi(2 * (n - 1) as i32))
}

pub fn ps_crgs(l0: f64, l: f64, l_att: f64, n: usize, b: &BranchVector) -> Result<f64> {
    let nr = repeaters(l, l0)?;
    let r = r_crgs(l0, l_att, n, b)?;
    let ends = TreeProbs::new(b, loss_rate(l0, l_att)?).end_factor();
    Ok(ends.powi(2) * r.powi(nr as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rrgs,
    Crgs,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Rrgs => "rrgs",
            Scheme::Crgs => "crgs",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L_over_Latt")]
    pub l_over_latt: f64,
    pub p_f: f64,
    pub eps: f64,
    pub p_s: f64,
    pub expected_ebits: f64,
    pub rate_per_photon: f64,
    pub scheme: Scheme,
    #[serde(skip)]
    pub n_repeaters: usize,
    #[serde(skip)]
    pub r_station: f64,
}

/// Parameter grid for [`sweep`]. Lengths are in units of the attenuation length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub l_over_latt: Vec<f64>,
    pub l0_over_latt: f64,
    pub branch: BranchVector,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.k.is_empty() || self.l_over_latt.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        if self.n.contains(&0) || self.k.contains(&0) {
            return Err(Error::InvalidConfig("n and k must be positive".into()));
        }
        for &l in &self.l_over_latt {
            repeaters(l, self.l0_over_latt)?;
        }
        Ok(())
    }
}

/// Evaluates both schemes over the grid. Generalized points cover every
/// `(L, n, k)` with `k <= n`; complete-graph points every `(L, n)` with `k = 1`.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<RatePoint>> {
    grid.validate()?;
    let l0 = grid.l0_over_latt;
    let p_f = p_fail(l0, 1.0)?;
    let eps = loss_rate(l0, 1.0)?;
    let probs = TreeProbs::new(&grid.branch, eps);
    let mut jobs = Vec::new();
    for &l in &grid.l_over_latt {
        for &n in &grid.n {
            for &k in grid.k.iter().filter(|&&k| k <= n) {
                jobs.push((Scheme::Rrgs, l, n, k));
            }
        }
        for &n in &grid.n {
            jobs.push((Scheme::Crgs, l, n, 1));
        }
    }
    jobs.into_par_iter()
        .map(|(scheme, l, n, k)| {
            let nr = repeaters(l, l0)?;
            let (r, ends) = match scheme {
                Scheme::Rrgs => (
                    r_rrgs_with(p_f, probs, k, n, eps_d),
                    probs.end_factor().powi(2 * k as i32),
                ),
                Scheme::Crgs => (
                    r_crgs(l0, 1.0, n, &grid.branch)?,
                    probs.end_factor().powi(2),
                ),
            };
            let p_s = ends * r.powi(nr as i32);
            Ok(RatePoint {
                n,
                k,
                l_over_latt: l,
                p_f,
                eps,
                p_s,
                expected_ebits: p_s * k as f64,
                rate_per_photon: p_s * k as f64 / n as f64,
                scheme,
                n_repeaters: nr,
                r_station: r,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::avg_eps_d;

    fn b5114() -> BranchVector {
        BranchVector::new(vec![5, 11, 4]).unwrap()
    }

    #[test]
    fn fusion_failure_values() {
        assert!((p_fail(0.1, 1.0).unwrap() - (1.0 - 0.5 * (-0.1f64).exp())).abs() < 1e-15);
        assert!((p_fail(0.1, 1.0).unwrap() - 0.5476).abs() < 1e-4);
        assert!((p_fail(1e-12, 1.0).unwrap() - 0.5).abs() < 1e-11);
        assert!((p_fail(1.0, 1.0).unwrap() - 0.8161).abs() < 1e-4);
        assert_eq!(p_fail(0.0, 1.0), Err(Error::NonpositiveLength));
        assert_eq!(p_fail(1.0, -1.0), Err(Error::NonpositiveLength));
    }

    #[test]
    fn loss_rate_values() {
        assert!(loss_rate(1e-12, 1.0).unwrap() < 1e-12);
        assert!((loss_rate(0.1, 1.0).unwrap() - 0.04877).abs() < 1e-5);
        assert!((loss_rate(2.0 * 2f64.ln(), 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn repeater_count() {
        assert_eq!(repeaters(100.0, 0.1).unwrap(), 999);
        assert_eq!(repeaters(0.1, 0.1).unwrap(), 0);
        assert!(repeaters(1.05, 0.1).is_err());
    }

    #[test]
    fn perfect_measurements_reduce_to_rank_statistics() {
        let probs = TreeProbs { px: 1.0, pz: 1.0 };
        for (k, n, pf) in [(3, 10, 0.55), (10, 40, 0.55), (1, 1, 0.3)] {
            let r = r_rrgs_with(pf, probs, k, n, eps_d);
            assert!((r - (1.0 - avg_eps_d(k, n, pf))).abs() < 1e-12);
        }
    }

    #[test]
    fn full_rate_code_needs_every_fusion() {
        let b = b5114();
        let (l0, n) = (0.1, 6);
        let pf = p_fail(l0, 1.0).unwrap();
        let t = TreeProbs::new(&b, loss_rate(l0, 1.0).unwrap());
        let r = r_rrgs(l0, 1.0, n, n, &b).unwrap();
        let top = (1.0 - pf).powi(n as i32) * t.px.powi(2 * n as i32) * (1.0 - eps_d(n, n));
        assert!((r - top).abs() < 1e-15);
        assert!(r <= (1.0 - pf).powi(n as i32) * t.px.powi(2 * n as i32));
    }

    #[test]
    fn station_rate_bounded_by_rank_statistics() {
        let b = b5114();
        for n in [4, 10, 40] {
            for k in 1..=n {
                let r = r_rrgs(0.1, 1.0, k, n, &b).unwrap();
                assert!(r <= 1.0 - avg_eps_d(k, n, p_fail(0.1, 1.0).unwrap()) + 1e-12);
            }
        }
    }

    #[test]
    fn complete_graph_limits() {
        let b = b5114();
        let t = TreeProbs::new(&b, loss_rate(0.1, 1.0).unwrap());
        let r1 = r_crgs(0.1, 1.0, 1, &b).unwrap();
        assert!((r1 - (1.0 - p_fail(0.1, 1.0).unwrap()) * t.px * t.px).abs() < 1e-15);
        // very long segments: every fusion fails
        assert!(r_crgs(200.0, 1.0, 3, &b).unwrap() < 1e-15);
    }

    #[test]
    fn end_factor_only_without_repeaters() {
        let b = b5114();
        let t = TreeProbs::new(&b, loss_rate(0.1, 1.0).unwrap());
        let ps = ps_rrgs(0.1, 0.1, 1.0, 3, 8, &b).unwrap();
        assert!((ps - ((t.px + t.pz) / 2.0).powi(6)).abs() < 1e-15);
    }

    #[test]
    fn success_decreases_with_more_repeaters() {
        let b = b5114();
        let mut prev = 1.0;
        for segs in 1..20 {
            let ps = ps_rrgs(0.1, 0.1 * segs as f64, 1.0, 4, 16, &b).unwrap();
            assert!(ps <= prev);
            prev = ps;
        }
    }

    #[test]
    fn sweep_grid_handling() {
        let grid = SweepGrid {
            n: vec![20],
            k: vec![4],
            l_over_latt: vec![10.0],
            l0_over_latt: 0.1,
            branch: b5114(),
        };
        let pts = sweep(&grid).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].scheme, Scheme::Rrgs);
        assert_eq!(pts[1].scheme, Scheme::Crgs);
        for p in &pts {
            assert!((0.0..=1.0).contains(&p.p_s));
            assert!((p.expected_ebits - p.p_s * p.k as f64).abs() < 1e-15);
        }
        let empty = SweepGrid { n: vec![], ..grid };
        assert!(sweep(&empty).is_err());
    }
}
