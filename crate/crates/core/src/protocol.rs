//! Stabilizer-level Monte Carlo of an unencoded repeater chain built from
//! generalized repeater graph states.
//!
//! RGS `a` (for `a = 0..=N_R`) joins station `a` and `a + 1`; its left inner
//! vertices follow the columns of `G_a`, its right ones those of `G_{a+1}`,
//! with `G_0 = G_{N_R+1} = I_k`. Alice and Bob hold the inner vertices of the
//! two end RGSs directly; every other inner vertex carries an outer leaf that
//! is fused at a station.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{p_fail, repeaters};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix};
use crate::stabsim::Tableau;
use crate::treecode::BranchVector;

/// Stream reserved for sampling generator matrices; trials use their index.
const GENERATOR_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Total length, in the same unit as `l0` and `l_att`.
    pub l: f64,
    pub l0: f64,
    pub l_att: f64,
    pub n_r: usize,
    pub n: usize,
    pub k: usize,
    pub branch: BranchVector,
    pub seed: u64,
}

impl ChainConfig {
    /// Chain with `n_r` stations spaced `l0 = l_att / 10` apart.
    pub fn with_stations(n_r: usize, n: usize, k: usize, seed: u64) -> Self {
        ChainConfig {
            l: (n_r + 1) as f64 * 0.1,
            l0: 0.1,
            l_att: 1.0,
            n_r,
            n,
            k,
            branch: BranchVector::new(vec![5, 11, 4]).expect("valid default"),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        p_fail(self.l0, self.l_att)?;
        if repeaters(self.l, self.l0)? != self.n_r {
            return Err(Error::InvalidConfig(format!(
                "L = {} with L0 = {} implies {} stations, not {}",
                self.l,
                self.l0,
                repeaters(self.l, self.l0)?,
                self.n_r
            )));
        }
        if self.k == 0 || self.n < self.k {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= k <= n, got k={}, n={}",
                self.k, self.n
            )));
        }
        Ok(())
    }

    pub fn p_f(&self) -> Result<f64> {
        p_fail(self.l0, self.l_att)
    }

    /// Set when the code rate `k/n` exceeds the erasure capacity `1 - p_f`.
    pub fn capacity_warning(&self) -> Option<String> {
        let pf = self.p_f().ok()?;
        (self.n as f64 * (1.0 - pf) <= self.k as f64).then(|| {
            format!(
                "n(1 - p_f) = {:.3} does not exceed k = {}; most stations will fail to decode",
                self.n as f64 * (1.0 - pf),
                self.k
            )
        })
    }

    /// Total qubits in the chain tableau.
    pub fn qubit_count(&self) -> usize {
        if self.n_r == 0 {
            return 2 * self.k;
        }
        // two end RGSs of k + 2n qubits, N_R - 1 interior ones of 4n
        2 * (self.k + 2 * self.n) + (self.n_r - 1) * 4 * self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Leaf {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmVertex {
    pub side: Side,
    pub arm: usize,
    pub leaf: Leaf,
}

/// One unencoded RGS: graph plus the role of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgsGraph {
    pub adjacency: BitMatrix,
    pub vertices: Vec<ArmVertex>,
}

impl RgsGraph {
    pub fn index(&self, side: Side, arm: usize, leaf: Leaf) -> Option<usize> {
        self.vertices.iter().position(|v| *v == ArmVertex { side, arm, leaf })
    }

    pub fn arms(&self, side: Side) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.side == side && v.leaf == Leaf::First)
            .count()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// RGS with inner edges `G_leftᵀ G_right` and an outer leaf on every inner vertex.
pub fn build_rgs_adjacency(g_left: &BitMatrix, g_right: &BitMatrix) -> Result<RgsGraph> {
    build_rgs_adjacency_with(g_left, g_right, true, true)
}

/// As [`build_rgs_adjacency`], with outer leaves only on the requested sides.
pub fn build_rgs_adjacency_with(
    g_left: &BitMatrix,
    g_right: &BitMatrix,
    outer_left: bool,
    outer_right: bool,
) -> Result<RgsGraph> {
    if g_left.rows() != g_right.rows() {
        return Err(Error::DimensionMismatch(format!(
            "generators have {} and {} rows",
            g_left.rows(),
            g_right.rows()
        )));
    }
    let b = g_left.transpose().mul(g_right)?;
    let mut vertices = Vec::new();
    for (side, arms, outer) in [
        (Side::Left, g_left.cols(), outer_left),
        (Side::Right, g_right.cols(), outer_right),
    ] {
        vertices.extend((0..arms).map(|arm| ArmVertex {
            side,
            arm,
            leaf: Leaf::First,
        }));
        if outer {
            vertices.extend((0..arms).map(|arm| ArmVertex {
                side,
                arm,
                leaf: Leaf::Second,
            }));
        }
    }
    let mut g = RgsGraph {
        adjacency: BitMatrix::zeros(vertices.len(), vertices.len()),
        vertices,
    };
    let connect = |g: &mut RgsGraph, u: usize, v: usize| {
        g.adjacency.set(u, v, true);
        g.adjacency.set(v, u, true);
    };
    for i in 0..b.rows() {
        let u = g.index(Side::Left, i, Leaf::First).expect("left arm");
        for j in b.ones_in_row(i).collect::<Vec<_>>() {
            let v = g.index(Side::Right, j, Leaf::First).expect("right arm");
            connect(&mut g, u, v);
        }
    }
    for (side, outer) in [(Side::Left, outer_left), (Side::Right, outer_right)] {
        if outer {
            for arm in 0..g.arms(side) {
                let u = g.index(side, arm, Leaf::First).expect("inner");
                let v = g.index(side, arm, Leaf::Second).expect("outer");
                connect(&mut g, u, v);
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationOutcome {
    pub station: usize,
    pub fusion_successes: Vec<bool>,
    pub x_tilde: Vec<u8>,
    /// Logical `X` outcomes; `None` when the received columns are rank deficient.
    pub m: Option<Vec<u8>>,
}

/// Corrections for Alice's qubits: apply the Paulis, then (if set) `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x_corr: Vec<u8>,
    pub z_corr: Vec<u8>,
    pub hadamard: bool,
}

impl PauliFrame {
    fn bit(v: &[u8], i: usize) -> bool {
        v.get(i).copied().unwrap_or(0) == 1
    }

    pub fn x(&self, i: usize) -> bool {
        Self::bit(&self.x_corr, i)
    }

    pub fn z(&self, i: usize) -> bool {
        Self::bit(&self.z_corr, i)
    }
}

/// `z` collects the logical outcomes of even stations, `x` those of odd ones.
pub fn corrections_from_m(m_list: &[Vec<u8>], n_r: usize) -> Result<PauliFrame> {
    if m_list.len() != n_r {
        return Err(Error::LengthMismatch {
            expected: n_r,
            got: m_list.len(),
        });
    }
    let k = m_list.first().map_or(0, Vec::len);
    let mut x_corr = vec![0u8; k];
    let mut z_corr = vec![0u8; k];
    for (idx, m) in m_list.iter().enumerate() {
        if m.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: m.len(),
            });
        }
        let station = idx + 1;
        let acc = if station % 2 == 0 { &mut z_corr } else { &mut x_corr };
        for (a, &b) in acc.iter_mut().zip(m) {
            *a ^= b & 1;
        }
    }
    Ok(PauliFrame {
        x_corr,
        z_corr,
        hadamard: n_r % 2 == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub stations: Vec<StationOutcome>,
    pub frame: Option<PauliFrame>,
    /// Every station decoded its logical outcomes.
    pub decoded: bool,
    /// Alice and Bob hold exactly `k` copies of `|Φ+⟩` after corrections.
    pub verified: bool,
}

/// Global qubit indices of every RGS in the chain.
struct ChainLayout {
    rgs: Vec<RgsGraph>,
    offsets: Vec<usize>,
    adjacency: BitMatrix,
}

impl ChainLayout {
    fn new(k: usize, gens: &[BitMatrix]) -> Result<Self> {
        let n_r = gens.len();
        let id = BitMatrix::identity(k);
        let gamma = |a: usize| if a == 0 || a == n_r + 1 { &id } else { &gens[a - 1] };
        let rgs = (0..=n_r)
            .map(|a| build_rgs_adjacency_with(gamma(a), gamma(a + 1), a >= 1, a < n_r))
            .collect::<Result<Vec<_>>>()?;
        let mut offsets = Vec::with_capacity(rgs.len());
        let mut total = 0;
        for g in &rgs {
            offsets.push(total);
            total += g.len();
        }
        let mut adjacency = BitMatrix::zeros(total, total);
        for (g, &o) in rgs.iter().zip(&offsets) {
            adjacency.paste(o, o, &g.adjacency);
        }
        Ok(ChainLayout {
            rgs,
            offsets,
            adjacency,
        })
    }

    fn qubit(&self, rgs: usize, side: Side, arm: usize, leaf: Leaf) -> usize {
        self.offsets[rgs] + self.rgs[rgs].index(side, arm, leaf).expect("vertex exists")
    }
}

/// Tableau plus the graph it currently encodes, so byproduct supports are known.
struct GraphTracker {
    t: Tableau,
    adj: BitMatrix,
}

impl GraphTracker {
    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj.ones_in_row(v).collect()
    }

    fn isolate(&mut self, v: usize) {
        for u in self.neighbors(v) {
            self.adj.set(u, v, false);
            self.adj.set(v, u, false);
        }
    }

    /// Removes `v` by a `Z` measurement, fixing the signs on its neighbours.
    fn prune<R: Rng + ?Sized>(&mut self, v: usize, rng: &mut R) -> Result<()> {
        let s = self.t.measure_z(v, rng)?;
        self.t.discard(v)?;
        if s == 1 {
            for u in self.neighbors(v) {
                self.t.apply_z(u)?;
            }
        }
        self.isolate(v);
        Ok(())
    }

    fn fuse_arm<R: Rng + ?Sized>(
        &mut self,
        [q1, q2, q3, q4]: [usize; 4],
        success: bool,
        rng: &mut R,
    ) -> Result<()> {
        let rec = self.t.fuse(q1, q2, success, rng)?;
        if success {
            let others: Vec<usize> = self.neighbors(q3).into_iter().filter(|&v| v != q1).collect();
            self.t.post_fusion_cleanup(q3, q4, &rec, &others, rng)?;
            for &v in others.iter().filter(|&&v| v != q4) {
                self.adj.flip(q4, v);
                self.adj.flip(v, q4);
            }
            for q in [q1, q2, q3] {
                self.isolate(q);
            }
        } else {
            self.isolate(q1);
            self.isolate(q2);
            self.prune(q3, rng)?;
            self.prune(q4, rng)?;
        }
        Ok(())
    }
}

fn check_generators(cfg: &ChainConfig, gens: &[BitMatrix]) -> Result<()> {
    if gens.len() != cfg.n_r {
        return Err(Error::LengthMismatch {
            expected: cfg.n_r,
            got: gens.len(),
        });
    }
    if let Some(g) = gens.iter().find(|g| g.shape() != (cfg.k, cfg.n)) {
        return Err(Error::DimensionMismatch(format!(
            "generator is {:?}, expected ({}, {})",
            g.shape(),
            cfg.k,
            cfg.n
        )));
    }
    Ok(())
}

/// Samples which fusions succeed, station by station.
pub fn sample_pattern<R: Rng + ?Sized>(cfg: &ChainConfig, rng: &mut R) -> Result<Vec<Vec<bool>>> {
    let ps = 1.0 - cfg.p_f()?;
    Ok((0..cfg.n_r)
        .map(|_| (0..cfg.n).map(|_| rng.random_bool(ps)).collect())
        .collect())
}

/// One chain trial with fusion outcomes drawn from `p_f`.
pub fn simulate_chain<R: Rng + ?Sized>(
    cfg: &ChainConfig,
    gens: &[BitMatrix],
    rng: &mut R,
) -> Result<TrialResult> {
    let pattern = sample_pattern(cfg, rng)?;
    simulate_chain_with_pattern(cfg, gens, &pattern, rng)
}

/// One chain trial with a fixed fusion success pattern (`pattern[a][j]` for
/// station `a + 1`, arm `j`). Only measurement outcomes are random.
pub fn simulate_chain_with_pattern<R: Rng + ?Sized>(
    cfg: &ChainConfig,
    gens: &[BitMatrix],
    pattern: &[Vec<bool>],
    rng: &mut R,
) -> Result<TrialResult> {
    check_generators(cfg, gens)?;
    if pattern.len() != cfg.n_r || pattern.iter().any(|p| p.len() != cfg.n) {
        return Err(Error::DimensionMismatch(format!(
            "fusion pattern must be {} stations by {} arms",
            cfg.n_r, cfg.n
        )));
    }
    let layout = ChainLayout::new(cfg.k, gens)?;
    let mut g = GraphTracker {
        t: Tableau::graph_state(&layout.adjacency)?,
        adj: layout.adjacency.clone(),
    };

    // the left RGS's inner vertex is consumed, the right one's stays as a green node
    for a in 1..=cfg.n_r {
        for (j, &success) in pattern[a - 1].iter().enumerate() {
            let arm = [
                layout.qubit(a - 1, Side::Right, j, Leaf::Second),
                layout.qubit(a, Side::Left, j, Leaf::Second),
                layout.qubit(a - 1, Side::Right, j, Leaf::First),
                layout.qubit(a, Side::Left, j, Leaf::First),
            ];
            g.fuse_arm(arm, success, rng)?;
        }
    }

    let mut stations = Vec::with_capacity(cfg.n_r);
    for a in 1..=cfg.n_r {
        let kept: Vec<usize> = (0..cfg.n).filter(|&j| pattern[a - 1][j]).collect();
        let x_tilde = kept
            .iter()
            .map(|&j| {
                let q = layout.qubit(a, Side::Left, j, Leaf::First);
                let s = g.t.measure_x(q, rng)?;
                g.t.discard(q)?;
                Ok(s)
            })
            .collect::<Result<Vec<u8>>>()?;
        let gt = gens[a - 1].select_columns(&kept)?;
        let m = match gf2::solve_left(&gt, &x_tilde) {
            Ok(m) => Some(m),
            Err(Error::RankDeficient { .. }) => None,
            Err(e) => return Err(e),
        };
        stations.push(StationOutcome {
            station: a,
            fusion_successes: pattern[a - 1].clone(),
            x_tilde,
            m,
        });
    }

    let decoded = stations.iter().all(|s| s.m.is_some());
    let mut frame = None;
    let mut verified = false;
    if decoded {
        let ms: Vec<Vec<u8>> = stations.iter().map(|s| s.m.clone().expect("decoded")).collect();
        let f = corrections_from_m(&ms, cfg.n_r)?;
        let mut pairs = Vec::with_capacity(cfg.k);
        for i in 0..cfg.k {
            let alice = layout.qubit(0, Side::Left, i, Leaf::First);
            let bob = layout.qubit(cfg.n_r, Side::Right, i, Leaf::First);
            if f.x(i) {
                g.t.apply_x(alice)?;
            }
            if f.z(i) {
                g.t.apply_z(alice)?;
            }
            if f.hadamard {
                g.t.apply_h(alice)?;
            }
            pairs.push((alice, bob));
        }
        verified = g.t.is_bell_pairs(&pairs)?;
        frame = Some(f);
    }
    Ok(TrialResult {
        trial: 0,
        stations,
        frame,
        decoded,
        verified,
    })
}

/// Largest `k`, `n` and station count accepted by [`check_size_guard`].
pub const MAX_SIM_K: usize = 4;
pub const MAX_SIM_N: usize = 8;
pub const MAX_SIM_STATIONS: usize = 4;

/// Refuses chains whose tableau would be too large to simulate quickly.
pub fn check_size_guard(cfg: &ChainConfig) -> Result<()> {
    if cfg.k > MAX_SIM_K || cfg.n > MAX_SIM_N || cfg.n_r > MAX_SIM_STATIONS {
        return Err(Error::SizeGuard(format!(
            "k={}, n={}, N_R={} exceeds the limits k<={MAX_SIM_K}, n<={MAX_SIM_N}, N_R<={MAX_SIM_STATIONS} ({} qubits)",
            cfg.k,
            cfg.n,
            cfg.n_r,
            cfg.qubit_count()
        )));
    }
    Ok(())
}

/// Uniform random `k × n` generators for stations `1..=N_R`, from the config seed.
pub fn sample_generators(cfg: &ChainConfig) -> Vec<BitMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(GENERATOR_STREAM);
    (0..cfg.n_r)
        .map(|_| gf2::sample_uniform(cfg.k, cfg.n, &mut rng))
        .collect()
}

/// Random generator for trial `trial`: the config seed on stream `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials in parallel; results are in trial order.
pub fn run_trials(cfg: &ChainConfig, gens: &[BitMatrix], trials: u64) -> Result<Vec<TrialResult>> {
    cfg.validate()?;
    check_generators(cfg, gens)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut r = simulate_chain(cfg, gens, &mut rng)?;
            r.trial = trial;
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub decoded: u64,
    pub verified: u64,
    pub full_rank_rate: f64,
    /// Verified fraction among decoded trials (1.0 when none decoded).
    pub verified_rate: f64,
}

pub fn summarize(results: &[TrialResult]) -> TrialSummary {
    let trials = results.len() as u64;
    let decoded = results.iter().filter(|r| r.decoded).count() as u64;
    let verified = results.iter().filter(|r| r.verified).count() as u64;
    TrialSummary {
        trials,
        decoded,
        verified,
        full_rank_rate: if trials == 0 { 0.0 } else { decoded as f64 / trials as f64 },
        verified_rate: if decoded == 0 { 1.0 } else { verified as f64 / decoded as f64 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn complete_bipartite_rgs() {
        let g = build_rgs_adjacency(&BitMatrix::ones(1, 4), &BitMatrix::ones(1, 4)).unwrap();
        assert_eq!(g.len(), 16);
        for i in 0..4 {
            let u = g.index(Side::Left, i, Leaf::First).unwrap();
            // four inner neighbours plus the outer leaf
            assert_eq!(g.adjacency.row_weight(u), 5);
        }
    }

    #[test]
    fn boundary_side_has_k_arms() {
        let gr = m(&[&[1, 0, 1, 1], &[0, 1, 1, 0], &[1, 1, 1, 0]]);
        let g = build_rgs_adjacency(&BitMatrix::identity(3), &gr).unwrap();
        assert_eq!(g.arms(Side::Left), 3);
        assert_eq!(g.arms(Side::Right), 4);
    }

    #[test]
    fn inner_edges_follow_biadjacency() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gl = gf2::sample_uniform(3, 6, &mut rng);
        let gr = gf2::sample_uniform(3, 6, &mut rng);
        let g = build_rgs_adjacency(&gl, &gr).unwrap();
        let b = gl.transpose().mul(&gr).unwrap();
        // total edges = inner + one per arm
        assert_eq!(g.adjacency.count_ones() / 2, b.count_ones() + 12);
        assert!(build_rgs_adjacency(&gl, &BitMatrix::ones(2, 6)).is_err());
    }

    #[test]
    fn frame_from_logical_outcomes() {
        let f = corrections_from_m(&[vec![0, 1, 0]], 1).unwrap();
        assert_eq!(f.x_corr, vec![0, 1, 0]);
        assert_eq!(f.z_corr, vec![0, 0, 0]);
        assert!(!f.hadamard);
        let f = corrections_from_m(&[vec![1, 1], vec![0, 1], vec![1, 0]], 3).unwrap();
        assert_eq!(f.x_corr, vec![0, 1]);
        assert_eq!(f.z_corr, vec![0, 1]);
        assert!(corrections_from_m(&[vec![0], vec![0]], 2).unwrap().hadamard);
        assert_eq!(
            corrections_from_m(&[vec![0]], 2),
            Err(Error::LengthMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn single_station_all_fusions_succeed() {
        let cfg = ChainConfig::with_stations(1, 3, 1, 0);
        let gens = vec![BitMatrix::ones(1, 3)];
        for seed in 0..20 {
            let mut rng = trial_rng(seed, 0);
            let r = simulate_chain_with_pattern(&cfg, &gens, &[vec![true; 3]], &mut rng).unwrap();
            assert!(r.decoded && r.verified, "seed {seed}");
        }
    }

    #[test]
    fn all_fusions_failing_cannot_decode() {
        let cfg = ChainConfig::with_stations(2, 3, 1, 0);
        let gens = vec![BitMatrix::ones(1, 3); 2];
        let mut rng = trial_rng(1, 0);
        let pattern = vec![vec![true; 3], vec![false; 3]];
        let r = simulate_chain_with_pattern(&cfg, &gens, &pattern, &mut rng).unwrap();
        assert!(!r.decoded && !r.verified);
        assert_eq!(r.stations[1].m, None);
        assert!(r.stations[1].x_tilde.is_empty());
    }

    #[test]
    fn direct_link_without_stations() {
        let cfg = ChainConfig::with_stations(0, 4, 2, 0);
        let mut rng = trial_rng(5, 0);
        let r = simulate_chain(&cfg, &[], &mut rng).unwrap();
        assert!(r.decoded && r.verified);
        assert!(r.frame.unwrap().hadamard);
    }

    #[test]
    fn qubit_count_matches_layout() {
        for (n_r, n, k) in [(0, 4, 2), (1, 6, 3), (3, 6, 3), (4, 8, 4)] {
            let cfg = ChainConfig::with_stations(n_r, n, k, 0);
            let layout = ChainLayout::new(k, &sample_generators(&cfg)).unwrap();
            assert_eq!(layout.adjacency.rows(), cfg.qubit_count());
        }
        assert_eq!(ChainConfig::with_stations(3, 6, 3, 0).qubit_count(), 78);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ChainConfig::with_stations(2, 6, 3, 0);
        assert!(cfg.validate().is_ok());
        cfg.n_r = 3;
        assert!(cfg.validate().is_err());
        let cfg = ChainConfig::with_stations(2, 2, 3, 0);
        assert!(cfg.validate().is_err());
        assert!(ChainConfig::with_stations(1, 4, 3, 0).capacity_warning().is_some());
        assert!(ChainConfig::with_stations(1, 40, 3, 0).capacity_warning().is_none());
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = ChainConfig::with_stations(2, 4, 2, 42);
        let gens = sample_generators(&cfg);
        let a = run_trials(&cfg, &gens, 30).unwrap();
        let b = run_trials(&cfg, &gens, 30).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, r)| r.trial == i as u64));
    }

    #[test]
    fn size_guard_limits() {
        assert!(check_size_guard(&ChainConfig::with_stations(4, 8, 4, 0)).is_ok());
        for cfg in [
            ChainConfig::with_stations(5, 8, 4, 0),
            ChainConfig::with_stations(4, 9, 4, 0),
            ChainConfig::with_stations(4, 8, 5, 0),
        ] {
            assert!(matches!(check_size_guard(&cfg), Err(Error::SizeGuard(_))));
        }
    }
}
