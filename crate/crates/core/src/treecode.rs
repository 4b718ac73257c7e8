//! Loss tolerance of tree-encoded qubits: logical `X`/`Z` measurement success
//! probabilities by recursion, and an exhaustive enumeration to check them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of physical qubits [`brute_force_px_pz`] will enumerate.
pub const MAX_ENUMERATED_QUBITS: usize = 20;

/// Branching factors `(b_0, …, b_m)`: the root has `b_0` children, every
/// level-`l` qubit has `b_l` children, level `m + 1` holds the leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BranchVector(Vec<usize>);

impl BranchVector {
    pub fn new(branches: Vec<usize>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidBranchVector("empty".into()));
        }
        if branches.contains(&0) {
            return Err(Error::InvalidBranchVector(format!(
                "zero branching factor in {branches:?}"
            )));
        }
        let b = BranchVector(branches);
        b.checked_size()
            .ok_or_else(|| Error::InvalidBranchVector("tree size overflows".into()))?;
        Ok(b)
    }

    fn checked_size(&self) -> Option<usize> {
        let mut total = 1usize;
        let mut width = 1usize;
        for &b in &self.0 {
            width = width.checked_mul(b)?;
            total = total.checked_add(width)?;
        }
        Some(total)
    }

    pub fn branches(&self) -> &[usize] {
        &self.0
    }

    /// Index of the last branching level.
    pub fn depth(&self) -> usize {
        self.0.len() - 1
    }

    /// Total qubits including the root.
    pub fn size(&self) -> usize {
        self.checked_size().expect("validated on construction")
    }

    /// Qubits that are actually sent (everything but the root).
    pub fn physical_qubits(&self) -> usize {
        self.size() - 1
    }

    fn b(&self, l: usize) -> usize {
        self.0.get(l).copied().unwrap_or(0)
    }
}

impl TryFrom<Vec<usize>> for BranchVector {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        BranchVector::new(v)
    }
}

impl From<BranchVector> for Vec<usize> {
    fn from(b: BranchVector) -> Self {
        b.0
    }
}

impl std::str::FromStr for BranchVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidBranchVector(format!("bad entry {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        BranchVector::new(parts)
    }
}

impl std::fmt::Display for BranchVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Indirect-`Z` success probability `R_l` for a qubit on level `l`, for
/// `l = 0..=m`. Levels beyond `m` cannot be measured indirectly.
pub fn r_levels(b: &BranchVector, eps: f64) -> Vec<f64> {
    let m = b.depth();
    let mut r = vec![0.0; m + 3];
    for l in (0..=m).rev() {
        let child_ok = (1.0 - eps) * (1.0 - eps + eps * r[l + 2]).powi(b.b(l + 1) as i32);
        r[l] = 1.0 - (1.0 - child_ok).powi(b.b(l) as i32);
    }
    r.truncate(m + 1);
    r
}

fn r_at(r: &[f64], l: usize) -> f64 {
    r.get(l).copied().unwrap_or(0.0)
}

pub fn p_z(b: &BranchVector, eps: f64) -> f64 {
    let r = r_levels(b, eps);
    (1.0 - eps + eps * r_at(&r, 1)).powi(b.b(0) as i32)
}

pub fn p_x(b: &BranchVector, eps: f64) -> f64 {
    let r = r_levels(b, eps);
    let b0 = b.b(0) as i32;
    let first = (1.0 - eps + eps * r_at(&r, 1)).powi(b0) - (eps * r_at(&r, 1)).powi(b0);
    first * (1.0 - eps + eps * r_at(&r, 2)).powi(b.b(1) as i32)
}

/// Success counts of an exhaustive loss enumeration, grouped by the number
/// of lost qubits, so any loss rate can be evaluated afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct LossEnumeration {
    qubits: usize,
    x_ok: Vec<u64>,
    z_ok: Vec<u64>,
}

impl LossEnumeration {
    pub fn new(b: &BranchVector) -> Result<Self> {
        let nq = b.physical_qubits();
        if nq > MAX_ENUMERATED_QUBITS {
            return Err(Error::TreeTooLarge(nq));
        }
        let tree = FlatTree::new(b);
        let mut x_ok = vec![0u64; nq + 1];
        let mut z_ok = vec![0u64; nq + 1];
        let mut zm = vec![false; tree.parent.len()];
        for lost in 0u32..(1u32 << nq) {
            let (x, z) = tree.evaluate(lost, &mut zm);
            let l = lost.count_ones() as usize;
            x_ok[l] += x as u64;
            z_ok[l] += z as u64;
        }
        Ok(LossEnumeration {
            qubits: nq,
            x_ok,
            z_ok,
        })
    }

    /// `(p_x, p_z)` at loss rate `eps`.
    pub fn at(&self, eps: f64) -> (f64, f64) {
        let mut px = 0.0;
        let mut pz = 0.0;
        for l in 0..=self.qubits {
            let w = eps.powi(l as i32) * (1.0 - eps).powi((self.qubits - l) as i32);
            px += self.x_ok[l] as f64 * w;
            pz += self.z_ok[l] as f64 * w;
        }
        (px, pz)
    }
}

/// Exhaustive `(p_x, p_z)` over all loss patterns of the physical qubits.
pub fn brute_force_px_pz(b: &BranchVector, eps: f64) -> Result<(f64, f64)> {
    Ok(LossEnumeration::new(b)?.at(eps))
}

/// Physical qubits in breadth-first order; node `i` is bit `i` of a loss mask.
struct FlatTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level1: Vec<usize>,
}

impl FlatTree {
    fn new(b: &BranchVector) -> Self {
        let mut parent = Vec::new();
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut frontier: Vec<Option<usize>> = vec![None];
        for &bl in b.branches() {
            let mut next = Vec::new();
            for &p in &frontier {
                for _ in 0..bl {
                    let id = parent.len();
                    parent.push(p);
                    children.push(Vec::new());
                    if let Some(p) = p {
                        children[p].push(id);
                    }
                    next.push(Some(id));
                }
            }
            frontier = next;
        }
        let level1 = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
        FlatTree {
            parent,
            children,
            level1,
        }
    }

    fn evaluate(&self, lost: u32, zm: &mut [bool]) -> (bool, bool) {
        let received = |i: usize| (lost >> i) & 1 == 0;
        // children always have larger indices, so reverse order is bottom-up
        for i in (0..zm.len()).rev() {
            zm[i] = received(i)
                || self.children[i]
                    .iter()
                    .any(|&c| received(c) && self.children[c].iter().all(|&g| zm[g]));
        }
        let z_ok = self.level1.iter().all(|&q| zm[q]);
        let x_ok = match self.level1.iter().copied().find(|&q| received(q)) {
            Some(pick) => {
                self.children[pick].iter().all(|&c| zm[c])
                    && self.level1.iter().all(|&q| q == pick || zm[q])
            }
            None => false,
        };
        (x_ok, z_ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(v: &[usize]) -> BranchVector {
        BranchVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(bv(&[2, 3, 2]).size(), 1 + 2 + 6 + 12);
        assert_eq!(bv(&[5, 11, 4]).physical_qubits(), 5 + 55 + 220);
        assert!(BranchVector::new(vec![]).is_err());
        assert!(BranchVector::new(vec![2, 0]).is_err());
        assert!(BranchVector::new(vec![usize::MAX, 2]).is_err());
        assert_eq!("5, 11,4".parse::<BranchVector>().unwrap(), bv(&[5, 11, 4]));
    }

    #[test]
    fn no_loss_and_total_loss() {
        let b = bv(&[3, 2, 2]);
        assert!(r_levels(&b, 0.0).iter().all(|&r| r == 1.0));
        assert!(r_levels(&b, 1.0).iter().all(|&r| r == 0.0));
        assert_eq!(p_z(&b, 0.0), 1.0);
        assert_eq!(p_x(&b, 0.0), 1.0);
        assert_eq!(p_z(&b, 1.0), 0.0);
        assert_eq!(p_x(&b, 1.0), 0.0);
        assert_eq!(brute_force_px_pz(&bv(&[3, 2]), 0.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn last_level_recursion() {
        let b = bv(&[2, 3]);
        let eps = 0.3f64;
        let r = r_levels(&b, eps);
        assert!((r[1] - (1.0 - eps.powi(3))).abs() < 1e-15);
    }

    #[test]
    fn single_chain_by_hand() {
        // root - a - c: Z needs a, or c in place of a lost a; X needs both
        for eps in [0.1, 0.37, 0.8] {
            let (px, pz) = brute_force_px_pz(&bv(&[1, 1]), eps).unwrap();
            let q = 1.0 - eps;
            assert!((pz - (q + eps * q)).abs() < 1e-15);
            assert!((px - q * q).abs() < 1e-15);
            assert!((p_z(&bv(&[1, 1]), eps) - pz).abs() < 1e-15);
            assert!((p_x(&bv(&[1, 1]), eps) - px).abs() < 1e-15);
        }
    }

    #[test]
    fn recursion_matches_enumeration_small() {
        for b in [bv(&[2, 2]), bv(&[2, 3, 2]), bv(&[3, 1, 2])] {
            let oracle = LossEnumeration::new(&b).unwrap();
            for eps in [0.1, 0.2, 0.3] {
                let (px, pz) = oracle.at(eps);
                assert!((p_x(&b, eps) - px).abs() < 1e-12, "{b} px");
                assert!((p_z(&b, eps) - pz).abs() < 1e-12, "{b} pz");
            }
        }
    }

    #[test]
    fn too_large_for_enumeration() {
        assert_eq!(
            brute_force_px_pz(&bv(&[3, 3, 3]), 0.1),
            Err(Error::TreeTooLarge(39))
        );
    }

    #[test]
    fn monotone_in_loss() {
        for b in [bv(&[5, 11, 4]), bv(&[4, 8, 3]), bv(&[2, 3, 2])] {
            let mut prev = (1.0, 1.0);
            for i in 0..=200 {
                let eps = i as f64 / 200.0;
                let cur = (p_x(&b, eps), p_z(&b, eps));
                assert!((0.0..=1.0).contains(&cur.0) && (0.0..=1.0).contains(&cur.1));
                assert!(cur.0 <= prev.0 + 1e-15 && cur.1 <= prev.1 + 1e-15);
                prev = cur;
            }
        }
    }

    #[test]
    fn balanced_tree_from_rate_model() {
        let eps = 1.0 - (-0.05f64).exp();
        let b = bv(&[5, 11, 4]);
        assert!((p_x(&b, eps) - p_z(&b, eps)).abs() <= 0.02);
    }
}
