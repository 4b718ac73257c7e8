//! Regular Gallager LDPC codes decoded by sum-product belief propagation over
//! a channel that both flips and erases bits.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::protocol::trial_rng;

pub const DEFAULT_MAX_ITERS: usize = 100;
const LLR_CLAMP: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpcCode {
    h: BitMatrix,
    g: BitMatrix,
    info_positions: Vec<usize>,
    col_weight: usize,
    row_weight: usize,
    #[serde(skip)]
    graph: Tanner,
}

/// Edge lists of the Tanner graph, grouped per check and per variable.
#[derive(Debug, Clone, PartialEq, Default)]
struct Tanner {
    check_edges: Vec<Vec<usize>>,
    var_edges: Vec<Vec<usize>>,
    edge_var: Vec<usize>,
}

impl Tanner {
    fn new(h: &BitMatrix) -> Self {
        let mut t = Tanner {
            check_edges: vec![Vec::new(); h.rows()],
            var_edges: vec![Vec::new(); h.cols()],
            edge_var: Vec::new(),
        };
        for r in 0..h.rows() {
            for c in h.ones_in_row(r) {
                let e = t.edge_var.len();
                t.edge_var.push(c);
                t.check_edges[r].push(e);
                t.var_edges[c].push(e);
            }
        }
        t
    }
}

impl LdpcCode {
    /// Builds a code from a parity-check matrix. The generator is the first
    /// `k` rows of the systematic null-space basis.
    pub fn from_parity(h: BitMatrix, k: usize) -> Result<Self> {
        let (g_full, info) = null_space(&h)?;
        if k == 0 || k > g_full.rows() {
            return Err(Error::InvalidConfig(format!(
                "requested dimension {k}, null space has dimension {}",
                g_full.rows()
            )));
        }
        let rows: Vec<usize> = (0..k).collect();
        let g = g_full.select_rows(&rows)?;
        let col_weight = (0..h.cols()).map(|c| h.column(c).iter().filter(|&&b| b == 1).count()).max().unwrap_or(0);
        let row_weight = (0..h.rows()).map(|r| h.row_weight(r)).max().unwrap_or(0);
        let graph = Tanner::new(&h);
        Ok(LdpcCode {
            h,
            g,
            info_positions: info[..k].to_vec(),
            col_weight,
            row_weight,
            graph,
        })
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.h
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.g
    }

    /// Codeword positions that carry the information bits verbatim.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn col_weight(&self) -> usize {
        self.col_weight
    }

    pub fn row_weight(&self) -> usize {
        self.row_weight
    }

    pub fn encode(&self, m: &[u8]) -> Result<Vec<u8>> {
        self.g.left_mul_vec(m)
    }

    pub fn syndrome_ok(&self, c: &[u8]) -> bool {
        self.h.mul_vec(c).map(|s| s.iter().all(|&b| b == 0)).unwrap_or(false)
    }

    pub fn extract_info(&self, c: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| c[p]).collect()
    }

    /// Number of row pairs of `H` sharing two or more columns.
    pub fn four_cycles(&self) -> usize {
        count_four_cycles(&self.h)
    }
}

fn count_four_cycles(h: &BitMatrix) -> usize {
    let rows: Vec<Vec<u64>> = (0..h.rows()).map(|r| pack(&h.row(r))).collect();
    let mut total = 0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let o = overlap(&rows[i], &rows[j]);
            total += o * o.saturating_sub(1) / 2;
        }
    }
    total
}

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn overlap(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Systematic basis of `{x : H xᵀ = 0}` and its information positions (the
/// free columns of `H`'s reduced echelon form).
fn null_space(h: &BitMatrix) -> Result<(BitMatrix, Vec<usize>)> {
    let n = h.cols();
    let mut r = h.clone();
    let pivots = r.row_reduce();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    if free.is_empty() {
        return Err(Error::RankDeficientParity);
    }
    let mut g = BitMatrix::zeros(free.len(), n);
    for (row, &f) in free.iter().enumerate() {
        g.set(row, f, true);
        for (i, &p) in pivots.iter().enumerate() {
            if r.get(i, f) {
                g.set(row, p, true);
            }
        }
    }
    Ok((g, free))
}

/// Systematic generator of the full null space of `H`.
pub fn generator_from_parity(h: &BitMatrix) -> Result<BitMatrix> {
    Ok(null_space(h)?.0)
}

/// Gallager's ensemble: `col_weight` bands, each a column permutation of a
/// staircase of `n / row_weight` rows. Row pairs sharing two columns are
/// broken up by swapping columns within a band where that helps.
pub fn gallager_construct<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    col_weight: usize,
    rng: &mut R,
) -> Result<LdpcCode> {
    if k == 0 || k >= n || col_weight == 0 {
        return Err(Error::InfeasibleDegree(format!(
            "need 1 <= k < n and positive column weight, got n={n}, k={k}, w_c={col_weight}"
        )));
    }
    let m = n - k;
    if m % col_weight != 0 || n % (m / col_weight) != 0 {
        return Err(Error::InfeasibleDegree(format!(
            "{m} checks cannot form {col_weight} bands covering {n} columns evenly"
        )));
    }
    let band_rows = m / col_weight;
    let row_weight = n / band_rows;
    // rows[b][r]: columns of row r in band b
    let mut bands: Vec<Vec<Vec<usize>>> = Vec::with_capacity(col_weight);
    for b in 0..col_weight {
        let mut cols: Vec<usize> = (0..n).collect();
        if b > 0 {
            cols.shuffle(rng);
        }
        bands.push(cols.chunks(row_weight).map(|c| c.to_vec()).collect());
    }
    reduce_four_cycles(&mut bands, n, rng);
    let mut h = BitMatrix::zeros(m, n);
    for (b, band) in bands.iter().enumerate() {
        for (r, cols) in band.iter().enumerate() {
            for &c in cols {
                h.set(b * band_rows + r, c, true);
            }
        }
    }
    LdpcCode::from_parity(h, k)
}

fn reduce_four_cycles<R: Rng + ?Sized>(bands: &mut [Vec<Vec<usize>>], n: usize, rng: &mut R) {
    let band_rows = bands[0].len();
    let flat = |bands: &[Vec<Vec<usize>>]| -> Vec<Vec<u64>> {
        bands
            .iter()
            .flat_map(|band| band.iter())
            .map(|cols| {
                let mut bits = vec![0u8; n];
                for &c in cols {
                    bits[c] = 1;
                }
                pack(&bits)
            })
            .collect()
    };
    let mut rows = flat(bands);
    let cycles_of = |rows: &[Vec<u64>], i: usize| -> usize {
        (0..rows.len())
            .filter(|&j| j != i)
            .map(|j| {
                let o = overlap(&rows[i], &rows[j]);
                o * o.saturating_sub(1) / 2
            })
            .sum()
    };
    for _round in 0..20 {
        let mut improved = false;
        for i in band_rows..rows.len() {
            if cycles_of(&rows, i) == 0 {
                continue;
            }
            let (b, r) = (i / band_rows, i % band_rows);
            for _try in 0..8 {
                let r2 = rng.random_range(0..band_rows);
                if r2 == r {
                    continue;
                }
                let i2 = b * band_rows + r2;
                let p1 = rng.random_range(0..bands[b][r].len());
                let p2 = rng.random_range(0..bands[b][r2].len());
                let before = cycles_of(&rows, i) + cycles_of(&rows, i2);
                let (c1, c2) = (bands[b][r][p1], bands[b][r2][p2]);
                toggle(&mut rows[i], c1);
                toggle(&mut rows[i], c2);
                toggle(&mut rows[i2], c1);
                toggle(&mut rows[i2], c2);
                if cycles_of(&rows, i) + cycles_of(&rows, i2) < before {
                    bands[b][r][p1] = c2;
                    bands[b][r2][p2] = c1;
                    improved = true;
                    break;
                }
                toggle(&mut rows[i], c1);
                toggle(&mut rows[i], c2);
                toggle(&mut rows[i2], c1);
                toggle(&mut rows[i2], c2);
            }
        }
        if !improved {
            break;
        }
    }
}

fn toggle(row: &mut [u64], c: usize) {
    row[c / 64] ^= 1 << (c % 64);
}

/// Flip and erasure probabilities of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsecParams {
    pub p_bsc: f64,
    pub p_bec: f64,
}

impl BsecParams {
    pub fn new(p_bsc: f64, p_bec: f64) -> Result<Self> {
        for p in [p_bsc, p_bec] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(BsecParams { p_bsc, p_bec })
    }
}

/// Received symbols: `Some(bit)` or `None` for an erasure.
pub fn bsec_channel<R: Rng + ?Sized>(x: &[u8], params: BsecParams, rng: &mut R) -> Vec<Option<u8>> {
    x.iter()
        .map(|&b| {
            if rng.random_bool(params.p_bec) {
                None
            } else {
                Some(b ^ rng.random_bool(params.p_bsc) as u8)
            }
        })
        .collect()
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Capacity of the flip-then-erase channel.
pub fn capacity_bsec(params: BsecParams) -> f64 {
    (1.0 - binary_entropy(params.p_bsc)) * (1.0 - params.p_bec)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeOutcome {
    Codeword { bits: Vec<u8>, iterations: usize },
    Failure,
}

/// Sum-product decoding. Returns the first hard decision that satisfies
/// every check with no undecided bit.
pub fn bp_decode(code: &LdpcCode, received: &[Option<u8>], p_bsc: f64, max_iters: usize) -> Result<DecodeOutcome> {
    if received.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            got: received.len(),
        });
    }
    let mag = if p_bsc <= 0.0 {
        LLR_CLAMP
    } else {
        ((1.0 - p_bsc) / p_bsc).ln().clamp(-LLR_CLAMP, LLR_CLAMP)
    };
    let channel: Vec<f64> = received
        .iter()
        .map(|s| match s {
            None => 0.0,
            Some(0) => mag,
            Some(_) => -mag,
        })
        .collect();
    let t = &code.graph;
    let mut v2c: Vec<f64> = t.edge_var.iter().map(|&v| channel[v]).collect();
    let mut c2v = vec![0.0f64; v2c.len()];
    let mut posterior = channel.clone();
    let decide = |post: &[f64]| -> Option<Vec<u8>> {
        if post.iter().any(|&l| l == 0.0) {
            return None;
        }
        let bits: Vec<u8> = post.iter().map(|&l| (l < 0.0) as u8).collect();
        code.syndrome_ok(&bits).then_some(bits)
    };
    if let Some(bits) = decide(&posterior) {
        return Ok(DecodeOutcome::Codeword { bits, iterations: 0 });
    }
    for iter in 1..=max_iters {
        for edges in &t.check_edges {
            let th: Vec<f64> = edges.iter().map(|&e| (v2c[e] / 2.0).tanh()).collect();
            for (i, &e) in edges.iter().enumerate() {
                let prod: f64 = th
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &x)| x)
                    .product();
                let p = prod.clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                c2v[e] = (2.0 * p.atanh()).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
        for (v, edges) in t.var_edges.iter().enumerate() {
            let total: f64 = channel[v] + edges.iter().map(|&e| c2v[e]).sum::<f64>();
            posterior[v] = total;
            for &e in edges {
                v2c[e] = (total - c2v[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
        if let Some(bits) = decide(&posterior) {
            return Ok(DecodeOutcome::Codeword { bits, iterations: iter });
        }
    }
    Ok(DecodeOutcome::Failure)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureEstimate {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 95% Wilson score interval.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let n = trials as f64;
    let p = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Fraction of random messages not recovered exactly (decoder failures and
/// wrong codewords both count). Trial `t` uses stream `t` of `seed`.
pub fn logical_error_mc(
    code: &LdpcCode,
    params: BsecParams,
    trials: u64,
    seed: u64,
    max_iters: usize,
) -> Result<FailureEstimate> {
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = trial_rng(seed, t);
            let m: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
            let x = code.encode(&m)?;
            let y = bsec_channel(&x, params, &mut rng);
            Ok(match bp_decode(code, &y, params.p_bsc, max_iters)? {
                DecodeOutcome::Codeword { bits, .. } => (code.extract_info(&bits) != m) as u64,
                DecodeOutcome::Failure => 1,
            })
        })
        .sum::<Result<u64>>()?;
    let (ci_low, ci_high) = wilson_interval(failures, trials);
    Ok(FailureEstimate {
        trials,
        failures,
        rate: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
        ci_low,
        ci_high,
    })
}
