//! Self-checks run by the `verify` command: the reference trellis example,
//! randomized trellis reductions, and fusion on random graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf2::{self, BitMatrix};
use crate::stabsim::Tableau;
use crate::trellis::{
    build_ltg, theorem1_transform, transform_from_q, verify_equivalence, worked_example, worked_example_betas,
    GammaFactorization,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Reference example: biadjacencies before and after, `γ·Q = [I | 0]`, and
/// stabilizer equivalence under the derived CNOTs. With `corrupt_q`, one
/// layer's column operation is perturbed first, which must fail.
pub fn check_worked_example(corrupt_q: bool) -> Result<CheckReport> {
    let fac = worked_example();
    let (before, after) = worked_example_betas();
    let ltg = build_ltg(&fac)?;
    let mut t = theorem1_transform(&fac)?;
    if corrupt_q {
        let q = &mut t.q[1];
        let last = q.cols() - 1;
        q.xor_col_into(0, last);
        t = transform_from_q(&fac, t.q)?;
    }
    let mut failures = 0;
    failures += (ltg.betas() != before.as_slice()) as usize;
    failures += (t.target.betas() != after.as_slice()) as usize;
    for (g, q) in fac.gammas.iter().zip(&t.q) {
        let prod = g.mul(q)?;
        let k = fac.k;
        let normal = (0..k).all(|r| (0..prod.cols()).all(|c| prod.get(r, c) == (r == c)));
        failures += !normal as usize;
    }
    failures += !verify_equivalence(&ltg, &t.cnots, &t.target)? as usize;
    Ok(CheckReport {
        name: "worked_example".into(),
        cases: 3 + fac.gammas.len(),
        failures,
    })
}

fn full_rank<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> BitMatrix {
    loop {
        let g = gf2::sample_uniform(k, n, rng);
        if g.rank() == k {
            return g;
        }
    }
}

/// Random full-rank factorizations (`k ≤ 3`, up to five layers of width ≤ 6)
/// reduce to parallel paths under their derived CNOTs.
pub fn check_random_trellis(trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let k = rng.random_range(1..=3);
        let layers = rng.random_range(2..=5);
        let gammas = (0..layers)
            .map(|_| {
                let n = rng.random_range(k..=6);
                full_rank(k, n, &mut rng)
            })
            .collect();
        let fac = GammaFactorization::new(k, gammas)?;
        let t = theorem1_transform(&fac)?;
        failures += !verify_equivalence(&build_ltg(&fac)?, &t.cnots, &t.target)? as usize;
    }
    Ok(CheckReport {
        name: "random_trellis".into(),
        cases: trials,
        failures,
    })
}

/// Graph expected after fusing leaf `q1` (of `q3`) with leaf `q2` (of `q4`)
/// and cleaning up: `q4` toggles its edges to `N(q3) \ {q1, q4}` and
/// `q1, q2, q3` become isolated.
pub fn fused_graph(adj: &BitMatrix, q1: usize, q2: usize, q3: usize, q4: usize) -> BitMatrix {
    let n = adj.rows();
    let mut out = adj.clone();
    for v in adj.ones_in_row(q3).filter(|&v| v != q1 && v != q4) {
        out.flip(q4, v);
        out.flip(v, q4);
    }
    for q in [q1, q2, q3] {
        for v in 0..n {
            out.set(q, v, false);
            out.set(v, q, false);
        }
    }
    out
}

/// Successful fusion plus cleanup on random graphs (qubits 0, 1 are leaves of
/// 2, 3) leaves the expected graph state on the survivors, whatever the
/// measurement outcomes.
pub fn check_random_fusion(trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let n = rng.random_range(5..=9);
        let mut adj = BitMatrix::zeros(n, n);
        for (u, v) in [(0, 2), (1, 3)] {
            adj.set(u, v, true);
            adj.set(v, u, true);
        }
        for u in 2..n {
            for v in u + 1..n {
                if rng.random_bool(0.4) {
                    adj.set(u, v, true);
                    adj.set(v, u, true);
                }
            }
        }
        let keep: Vec<usize> = (3..n).collect();
        let expected = Tableau::graph_state(&fused_graph(&adj, 0, 1, 2, 3))?.canonical_on(&keep);
        let mut t = Tableau::graph_state(&adj)?;
        let rec = t.fuse(0, 1, true, &mut rng)?;
        let others: Vec<usize> = adj.ones_in_row(2).filter(|&v| v != 0).collect();
        t.post_fusion_cleanup(2, 3, &rec, &others, &mut rng)?;
        failures += (!t.check_invariants() || t.canonical_on(&keep) != expected) as usize;
    }
    Ok(CheckReport {
        name: "random_fusion".into(),
        cases: trials,
        failures,
    })
}

/// The full `verify` suite; `trials` sets the size of both randomized checks.
pub fn run_all(trials: usize, seed: u64, corrupt_q: bool) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_worked_example(corrupt_q)?,
        check_random_trellis(trials, seed)?,
        check_random_fusion(trials, seed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_suite_passes() {
        let reports = run_all(30, 1, false).unwrap();
        assert!(reports.iter().all(CheckReport::passed), "{reports:?}");
    }

    #[test]
    fn corrupted_q_fails() {
        assert!(!check_worked_example(true).unwrap().passed());
    }
}
