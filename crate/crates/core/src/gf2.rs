//! Dense linear algebra over GF(2) and rank statistics of random binary codes.
//!
//! Rows are packed into `u64` words; every elimination routine works on whole
//! words and picks the lowest-index pivot, so results are deterministic.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, true);
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries (any nonzero byte counts as 1).
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    /// Single-row matrix from a bit vector.
    pub fn row_vector(bits: &[u8]) -> Self {
        Self::from_rows(&[bits]).expect("single row is never ragged")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    fn check(&self, r: usize, c: usize) {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of bounds for {}x{} matrix",
            self.rows,
            self.cols
        );
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.check(r, c);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn try_get(&self, r: usize, c: usize) -> Result<bool> {
        if r >= self.rows {
            return Err(Error::IndexOutOfRange {
                index: r,
                len: self.rows,
            });
        }
        if c >= self.cols {
            return Err(Error::IndexOutOfRange {
                index: c,
                len: self.cols,
            });
        }
        Ok(self.get(r, c))
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.check(r, c);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.check(r, c);
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c) as u8).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert!(src < self.rows && dst < self.rows);
        if src == dst {
            for w in &mut self.data[dst * self.stride..(dst + 1) * self.stride] {
                *w = 0;
            }
            return;
        }
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `col[dst] ^= col[src]`.
    pub fn xor_col_into(&mut self, src: usize, dst: usize) {
        assert!(src < self.cols && dst < self.cols);
        for r in 0..self.rows {
            if self.get(r, src) {
                self.flip(r, dst);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let (x, y) = (self.get(r, a), self.get(r, b));
            if x != y {
                self.flip(r, a);
                self.flip(r, b);
            }
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.ones_in_row(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Column indices of the set bits in row `r`, ascending.
    pub fn ones_in_row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * WORD + b))
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let dst = r * out.stride;
            for k in self.ones_in_row(r) {
                for (w, x) in other.row_words(k).iter().enumerate() {
                    out.data[dst + w] ^= x;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut acc = vec![0u64; self.stride];
        for (r, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, x) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= x;
                }
            }
        }
        Ok((0..self.cols)
            .map(|c| ((acc[c / WORD] >> (c % WORD)) & 1) as u8)
            .collect())
    }

    /// Matrix times column vector: `self · v`.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let packed = pack(v);
        Ok((0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<BitMatrix> {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            if c >= self.cols {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    len: self.cols,
                });
            }
            for r in 0..self.rows {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        Ok(out)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<BitMatrix> {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            if r >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    len: self.rows,
                });
            }
            out.data[i * out.stride..(i + 1) * out.stride].copy_from_slice(self.row_words(r));
        }
        Ok(out)
    }

    /// Submatrix with rows `rows` and columns `cols`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Result<BitMatrix> {
        self.select_rows(rows)?.select_columns(cols)
    }

    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack needs equal row counts, got {} and {}",
                self.rows, other.rows
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.ones_in_row(r) {
                out.set(r, c, true);
            }
            for c in other.ones_in_row(r) {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// Embeds `other` with its top-left corner at `(r0, c0)`, overwriting.
    pub fn paste(&mut self, r0: usize, c0: usize, other: &BitMatrix) {
        assert!(r0 + other.rows <= self.rows && c0 + other.cols <= self.cols);
        for r in 0..other.rows {
            for c in 0..other.cols {
                self.set(r0 + r, c0 + c, other.get(r, c));
            }
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| self.ones_in_row(r).all(|c| self.get(c, r)))
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        self.row_reduce_limited(self.cols)
    }

    /// Row reduction that only pivots on the first `pivot_cols` columns.
    pub fn row_reduce_limited(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..pivot_cols.min(self.cols) {
            if prow == self.rows {
                break;
            }
            let (w, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(found) = (prow..self.rows).find(|&r| self.data[r * self.stride + w] & bit != 0)
            else {
                continue;
            };
            self.swap_rows(prow, found);
            for r in 0..self.rows {
                if r != prow && self.data[r * self.stride + w] & bit != 0 {
                    self.xor_row_into(prow, r);
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter dimension
        if self.rows > self.cols {
            return self.transpose().rank();
        }
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let (w, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(found) = (rank..m.rows).find(|&r| m.data[r * m.stride + w] & bit != 0) else {
                continue;
            };
            m.swap_rows(rank, found);
            for r in rank + 1..m.rows {
                if m.data[r * m.stride + w] & bit != 0 {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn inverse(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible);
        }
        let n = self.rows;
        let mut aug = self.hstack(&BitMatrix::identity(n))?;
        let pivots = aug.row_reduce_limited(n);
        if pivots.len() < n {
            return Err(Error::NotInvertible);
        }
        let right: Vec<usize> = (n..2 * n).collect();
        aug.select_columns(&right)
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

fn pack(v: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(v.len())];
    for (i, &b) in v.iter().enumerate() {
        if b & 1 == 1 {
            out[i / WORD] |= 1 << (i % WORD);
        }
    }
    out
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
        }
        Ok(())
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        BitMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Surviving columns of an `n`-column generator after erasures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    n: usize,
    kept: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, kept: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = kept.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        if kept.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "erasure pattern indices must be strictly increasing".into(),
            ));
        }
        Ok(ErasurePattern { n, kept })
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        let kept = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| k.then_some(i))
            .collect();
        ErasurePattern {
            n: mask.len(),
            kept,
        }
    }

    pub fn all(n: usize) -> Self {
        ErasurePattern {
            n,
            kept: (0..n).collect(),
        }
    }

    /// Erase each of `n` positions independently with probability `p_erase`.
    pub fn sample<R: Rng + ?Sized>(n: usize, p_erase: f64, rng: &mut R) -> Self {
        let mask: Vec<bool> = (0..n).map(|_| !rng.random_bool(p_erase)).collect();
        Self::from_mask(&mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn received(&self) -> usize {
        self.kept.len()
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Finds `m` with `m · gt = x`, where `gt` is a full-row-rank `k × ñ` generator.
pub fn solve_left(gt: &BitMatrix, x: &[u8]) -> Result<Vec<u8>> {
    let (k, nt) = gt.shape();
    if x.len() != nt {
        return Err(Error::LengthMismatch {
            expected: nt,
            got: x.len(),
        });
    }
    let r = gt.rank();
    if r < k {
        return Err(Error::RankDeficient {
            rank: r,
            expected: k,
        });
    }
    // gt^T m^T = x^T, eliminated on the augmented system
    let mut aug = BitMatrix::zeros(nt, k + 1);
    for i in 0..k {
        for j in gt.ones_in_row(i) {
            aug.set(j, i, true);
        }
    }
    for (j, &b) in x.iter().enumerate() {
        if b & 1 == 1 {
            aug.set(j, k, true);
        }
    }
    let pivots = aug.row_reduce();
    if pivots.last() == Some(&k) {
        return Err(Error::NoSolution);
    }
    let mut m = vec![0u8; k];
    for (row, &col) in pivots.iter().enumerate() {
        m[col] = aug.get(row, k) as u8;
    }
    debug_assert_eq!(gt.left_mul_vec(&m).unwrap(), x);
    Ok(m)
}

/// Uniformly random `k × n` binary matrix.
pub fn sample_uniform<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> BitMatrix {
    let mut m = BitMatrix::zeros(k, n);
    let tail = n % WORD;
    for r in 0..k {
        for w in 0..m.stride {
            let mut word: u64 = rng.random();
            if w + 1 == m.stride && tail != 0 {
                word &= (1u64 << tail) - 1;
            }
            m.data[r * m.stride + w] = word;
        }
    }
    m
}

pub fn erase_columns(g: &BitMatrix, pattern: &ErasurePattern) -> Result<BitMatrix> {
    if pattern.n() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "pattern over {} columns applied to a {}-column matrix",
            pattern.n(),
            g.cols()
        )));
    }
    g.select_columns(pattern.kept())
}

/// Probability that a uniformly random `k × ñ` binary matrix has rank below `k`.
pub fn eps_d(k: usize, n_received: usize) -> f64 {
    assert!(k >= 1, "eps_d needs k >= 1");
    if n_received < k {
        return 1.0;
    }
    let log_full_rank: f64 = (0..k)
        .map(|i| (-(2f64).powi(i as i32 - n_received as i32)).ln_1p())
        .sum();
    -log_full_rank.exp_m1()
}

/// Binomial probability mass `C(n, j) q^j (1-q)^(n-j)`.
pub fn binom_pmf(j: usize, n: usize, q: f64) -> f64 {
    assert!(j <= n, "binom_pmf needs j <= n");
    assert!((0.0..=1.0).contains(&q), "probability {q} outside [0, 1]");
    if q == 0.0 {
        return (j == 0) as u8 as f64;
    }
    if q == 1.0 {
        return (j == n) as u8 as f64;
    }
    let log = ln_binomial(n as u64, j as u64) + j as f64 * q.ln() + (n - j) as f64 * (-q).ln_1p();
    log.exp()
}

/// Rank-deficiency probability of a random `k × n` generator after each column is
/// erased independently with probability `p_f`.
pub fn avg_eps_d(k: usize, n: usize, p_f: f64) -> f64 {
    avg_eps_d_with(k, n, p_f, eps_d)
}

/// Same as [`avg_eps_d`] for a code with its own `ε_d(k, ñ)` table.
pub fn avg_eps_d_with(k: usize, n: usize, p_f: f64, eps: impl Fn(usize, usize) -> f64) -> f64 {
    assert!((0.0..=1.0).contains(&p_f), "probability {p_f} outside [0, 1]");
    let total: f64 = (0..=n)
        .map(|nt| eps(k, nt) * binom_pmf(nt, n, 1.0 - p_f))
        .sum();
    total.clamp(0.0, 1.0)
}

/// Returns an invertible `Q` with `gamma · Q = [I_k | 0]`.
pub fn normalize_gamma(gamma: &BitMatrix) -> Result<BitMatrix> {
    let (k, m) = gamma.shape();
    let r = gamma.rank();
    if r < k {
        return Err(Error::RankDeficient {
            rank: r,
            expected: k,
        });
    }
    let mut work = gamma.clone();
    let mut q = BitMatrix::identity(m);
    for i in 0..k {
        let pivot = (i..m)
            .find(|&c| work.get(i, c))
            .ok_or(Error::RankDeficient {
                rank: i,
                expected: k,
            })?;
        work.swap_cols(i, pivot);
        q.swap_cols(i, pivot);
        for c in 0..m {
            if c != i && work.get(i, c) {
                work.xor_col_into(i, c);
                q.xor_col_into(i, c);
            }
        }
    }
    Ok(q)
}

/// One elementary column operation: `col[target] ^= col[source]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnStep {
    pub source: usize,
    pub target: usize,
}

/// Factors an invertible `Q` into elementary column XORs that rebuild `Q` from the
/// identity when replayed in order.
pub fn decompose_invertible(q: &BitMatrix) -> Result<Vec<ColumnStep>> {
    if !q.is_square() {
        return Err(Error::NotInvertible);
    }
    let m = q.rows();
    let mut work = q.clone();
    let mut steps = Vec::new();
    let mut op = |w: &mut BitMatrix, source: usize, target: usize| {
        w.xor_col_into(source, target);
        steps.push(ColumnStep { source, target });
    };
    for i in 0..m {
        if !work.get(i, i) {
            let j = (i + 1..m).find(|&c| work.get(i, c)).ok_or(Error::NotInvertible)?;
            op(&mut work, j, i);
        }
        for c in 0..m {
            if c != i && work.get(i, c) {
                op(&mut work, i, c);
            }
        }
    }
    // work == I now; each step is an involution so the inverse product is the reversal
    steps.reverse();
    Ok(steps)
}

/// Applies column steps to the `m × m` identity.
pub fn replay_steps(m: usize, steps: &[ColumnStep]) -> BitMatrix {
    let mut out = BitMatrix::identity(m);
    for s in steps {
        out.xor_col_into(s.source, s.target);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn rank_of_paper_gamma2() {
        assert_eq!(m(&[&[1, 1, 0, 1], &[0, 1, 1, 0]]).rank(), 2);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(BitMatrix::zeros(5, 9).rank(), 0);
        assert_eq!(BitMatrix::zeros(0, 3).rank(), 0);
    }

    #[test]
    fn six_of_sixteen_2x2_matrices_are_invertible() {
        let count = (0u8..16)
            .filter(|bits| {
                let mm = m(&[&[bits & 1, (bits >> 1) & 1], &[(bits >> 2) & 1, (bits >> 3) & 1]]);
                mm.rank() == 2
            })
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn wide_matrices_cross_word_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sample_uniform(70, 130, &mut rng);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn solve_identity_returns_input() {
        let x = vec![1, 0, 1, 1];
        assert_eq!(solve_left(&BitMatrix::identity(4), &x).unwrap(), x);
    }

    #[test]
    fn solve_small_upper_triangular() {
        let gt = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(solve_left(&gt, &[1, 0]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn solve_reports_inconsistency_and_rank_deficiency() {
        let gt = m(&[&[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(solve_left(&gt, &[1, 0, 0]), Err(Error::NoSolution));
        let deficient = m(&[&[1, 1], &[1, 1]]);
        assert!(matches!(
            solve_left(&deficient, &[0, 0]),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_uniform(3, 8, &mut ChaCha8Rng::seed_from_u64(11));
        let b = sample_uniform(3, 8, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        let one = sample_uniform(1, 1, &mut ChaCha8Rng::seed_from_u64(5));
        let again = sample_uniform(1, 1, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(one, again);
        assert_eq!(one.shape(), (1, 1));
    }

    #[test]
    fn erase_columns_edge_cases() {
        let g = m(&[&[1, 1, 0, 1], &[0, 1, 1, 0]]);
        assert_eq!(erase_columns(&g, &ErasurePattern::all(4)).unwrap(), g);
        let none = erase_columns(&g, &ErasurePattern::new(4, vec![]).unwrap()).unwrap();
        assert_eq!(none.shape(), (2, 0));
        assert_eq!(none.rank(), 0);
        let kept = erase_columns(&g, &ErasurePattern::new(4, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(kept, m(&[&[1, 1], &[0, 1]]));
        assert_eq!(kept.rank(), 2);
        assert!(ErasurePattern::new(4, vec![1, 4]).is_err());
        assert!(ErasurePattern::new(4, vec![2, 1]).is_err());
    }

    #[test]
    fn eps_d_small_values() {
        assert_eq!(eps_d(2, 1), 1.0);
        assert!((eps_d(1, 1) - 0.5).abs() < 1e-15);
        assert!((eps_d(2, 2) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn binom_edges() {
        assert_eq!(binom_pmf(0, 7, 0.0), 1.0);
        assert_eq!(binom_pmf(7, 7, 1.0), 1.0);
        let s: f64 = (0..=50).map(|j| binom_pmf(j, 50, 0.45)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn avg_eps_d_limits() {
        assert_eq!(avg_eps_d(3, 10, 1.0), 1.0);
        assert!(avg_eps_d(5, 40, 0.0) < 1e-9);
    }

    #[test]
    fn normalize_paper_gamma3() {
        let g3 = m(&[&[1, 1, 0], &[0, 1, 1]]);
        let target = m(&[&[1, 0, 0], &[0, 1, 0]]);
        let q = normalize_gamma(&g3).unwrap();
        assert_eq!(g3.mul(&q).unwrap(), target);
        assert_eq!(q.rank(), 3);
        let paper_q3 = m(&[&[0, 0, 1], &[1, 0, 1], &[1, 1, 1]]);
        assert_eq!(g3.mul(&paper_q3).unwrap(), target);
    }

    #[test]
    fn normalize_rejects_rank_deficient() {
        assert!(matches!(
            normalize_gamma(&m(&[&[1, 1], &[1, 1]])),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn decompose_identity_is_empty() {
        assert!(decompose_invertible(&BitMatrix::identity(5))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn decompose_paper_q2() {
        let q2 = m(&[&[1, 1, 1, 0], &[0, 1, 1, 1], &[0, 0, 1, 1], &[0, 0, 0, 1]]);
        let steps = decompose_invertible(&q2).unwrap();
        assert_eq!(replay_steps(4, &steps), q2);
        // published elementary factors multiply to the X-block transform (Q^-1)^T
        let published = [(0, 3), (0, 1), (1, 2), (2, 3)].map(|(t, s)| ColumnStep {
            source: s,
            target: t,
        });
        assert_eq!(
            replay_steps(4, &published),
            q2.inverse().unwrap().transpose()
        );
    }

    #[test]
    fn decompose_rejects_singular() {
        assert_eq!(
            decompose_invertible(&m(&[&[1, 1], &[1, 1]])),
            Err(Error::NotInvertible)
        );
    }

    #[test]
    fn inverse_round_trip() {
        let q = m(&[&[0, 0, 1], &[1, 0, 1], &[1, 1, 1]]);
        let inv = q.inverse().unwrap();
        assert_eq!(q.mul(&inv).unwrap(), BitMatrix::identity(3));
    }
}
