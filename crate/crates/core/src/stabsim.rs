//! Stabilizer-tableau simulation (Aaronson–Gottesman layout with destabilizers).
//!
//! Rows `0..n` hold destabilizers and rows `n..2n` stabilizers. Measured-out
//! qubits stay in the tableau but are flagged dead, so qubit indices are stable
//! across a whole protocol run.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

/// Sparse Pauli product, e.g. `[(0, X), (3, Z)]`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PauliWord(pub Vec<(usize, Pauli)>);

impl PauliWord {
    pub fn single(q: usize, p: Pauli) -> Self {
        PauliWord(vec![(q, p)])
    }

    pub fn x(qubits: &[usize]) -> Self {
        PauliWord(qubits.iter().map(|&q| (q, Pauli::X)).collect())
    }

    pub fn z(qubits: &[usize]) -> Self {
        PauliWord(qubits.iter().map(|&q| (q, Pauli::Z)).collect())
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&(q, _)| q)
    }
}

/// Dense signed Hermitian Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = n.div_ceil(64);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            negative: false,
        }
    }

    pub fn from_word(n: usize, word: &PauliWord) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, op) in &word.0 {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, len: n });
            }
            // repeated qubits multiply; phases from repeats are not tracked
            let (x, z) = op.bits();
            if x {
                p.x[q / 64] ^= 1 << (q % 64);
            }
            if z {
                p.z[q / 64] ^= 1 << (q % 64);
            }
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> Pauli {
        assert!(q < self.n);
        Pauli::from_bits(
            (self.x[q / 64] >> (q % 64)) & 1 == 1,
            (self.z[q / 64] >> (q % 64)) & 1 == 1,
        )
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        symplectic(&self.x, &self.z, &other.x, &other.z) == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        for q in 0..self.n {
            let c = match self.get(q) {
                Pauli::I => '_',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[inline]
fn symplectic(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut acc = 0u32;
    for i in 0..x1.len() {
        acc ^= ((x1[i] & z2[i]) ^ (z1[i] & x2[i])).count_ones() & 1;
    }
    acc
}

/// Power of `i` picked up by the product `P1 · P2`, summed over qubits, mod 4.
#[inline]
fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for i in 0..x1.len() {
        let (a, b, c, d) = (x1[i], z1[i], x2[i], z2[i]);
        plus += ((a & b & !c & d) | (a & !b & c & d) | (!a & b & c & !d)).count_ones();
        minus += ((a & b & c & !d) | (a & !b & !c & d) | (!a & b & c & d)).count_ones();
    }
    (plus + 4 * 64 * x1.len() as u32 - minus) % 4
}

/// Which joint observable a measurement record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
    /// Joint `X⊗X` and `Z⊗Z` readout of a successful fusion.
    Bell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub qubits: Vec<usize>,
    pub basis: Basis,
    pub outcomes: Vec<u8>,
}

impl MeasurementRecord {
    pub fn succeeded(&self) -> bool {
        self.basis == Basis::Bell
    }

    /// `X⊗X` outcome of a successful fusion.
    pub fn xx(&self) -> Option<u8> {
        self.succeeded().then(|| self.outcomes[0])
    }

    /// `Z⊗Z` outcome of a successful fusion (the fusion sign bit).
    pub fn zz(&self) -> Option<u8> {
        self.succeeded().then(|| self.outcomes[1])
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    stride: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
    alive: Vec<bool>,
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tableau({} qubits) [", self.n)?;
        for s in self.stabilizers() {
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

impl Tableau {
    /// All qubits in `|0⟩`.
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64);
        let mut t = Tableau {
            n,
            stride,
            x: vec![0; 2 * n * stride],
            z: vec![0; 2 * n * stride],
            r: vec![false; 2 * n],
            alive: vec![true; n],
        };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    /// Graph state `|G⟩` stabilized by `X_i ∏_{j∈N(i)} Z_j`, all signs `+`.
    pub fn graph_state(adjacency: &BitMatrix) -> Result<Self> {
        if !adjacency.is_square() || !adjacency.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let n = adjacency.rows();
        if let Some(i) = (0..n).find(|&i| adjacency.get(i, i)) {
            return Err(Error::NonzeroDiagonal(i));
        }
        let stride = n.div_ceil(64);
        let mut t = Tableau {
            n,
            stride,
            x: vec![0; 2 * n * stride],
            z: vec![0; 2 * n * stride],
            r: vec![false; 2 * n],
            alive: vec![true; n],
        };
        for i in 0..n {
            t.set_z(i, i, true);
            t.set_x(n + i, i, true);
            for j in adjacency.ones_in_row(i) {
                t.set_z(n + i, j, true);
            }
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_alive(&self, q: usize) -> bool {
        self.alive[q]
    }

    pub fn alive_qubits(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.alive[q]).collect()
    }

    /// Marks a qubit as measured out. Its state is left untouched.
    pub fn discard(&mut self, q: usize) -> Result<()> {
        self.require_alive(q)?;
        self.alive[q] = false;
        Ok(())
    }

    fn require_alive(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange {
                index: q,
                len: self.n,
            });
        }
        if !self.alive[q] {
            return Err(Error::DeadQubit(q));
        }
        Ok(())
    }

    #[inline]
    fn xw(&self, row: usize) -> &[u64] {
        &self.x[row * self.stride..(row + 1) * self.stride]
    }

    #[inline]
    fn zw(&self, row: usize) -> &[u64] {
        &self.z[row * self.stride..(row + 1) * self.stride]
    }

    #[inline]
    fn get_x(&self, row: usize, q: usize) -> bool {
        (self.x[row * self.stride + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn get_z(&self, row: usize, q: usize) -> bool {
        (self.z[row * self.stride + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.x[row * self.stride + q / 64];
        if v {
            *w |= 1 << (q % 64);
        } else {
            *w &= !(1 << (q % 64));
        }
    }

    #[inline]
    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.z[row * self.stride + q / 64];
        if v {
            *w |= 1 << (q % 64);
        } else {
            *w &= !(1 << (q % 64));
        }
    }

    fn row_pauli(&self, row: usize) -> PauliString {
        PauliString {
            n: self.n,
            x: self.xw(row).to_vec(),
            z: self.zw(row).to_vec(),
            negative: self.r[row],
        }
    }

    /// Current stabilizer generators (including those of dead qubits).
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n..2 * self.n).map(|r| self.row_pauli(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|r| self.row_pauli(r)).collect()
    }

    /// Row `h` becomes `row_i · row_h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let s = self.stride;
        let phase = product_phase(self.xw(i), self.zw(i), self.xw(h), self.zw(h))
            + 2 * (self.r[h] as u32 + self.r[i] as u32);
        // destabilizer phases are never read, so their products may be non-Hermitian
        debug_assert!(h < self.n || phase % 2 == 0);
        self.r[h] = phase % 4 == 2;
        for w in 0..s {
            self.x[h * s + w] ^= self.x[i * s + w];
            self.z[h * s + w] ^= self.z[i * s + w];
        }
    }

    fn anticommutes(&self, row: usize, p: &PauliString) -> bool {
        symplectic(self.xw(row), self.zw(row), &p.x, &p.z) == 1
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.require_alive(control)?;
        self.require_alive(target)?;
        if control == target {
            return Err(Error::SameQubit(control));
        }
        let (c, t) = (control, target);
        for row in 0..2 * self.n {
            let (xc, zc, xt, zt) = (
                self.get_x(row, c),
                self.get_z(row, c),
                self.get_x(row, t),
                self.get_z(row, t),
            );
            if xc && zt && (xt == zc) {
                self.r[row] ^= true;
            }
            self.set_x(row, t, xt ^ xc);
            self.set_z(row, c, zc ^ zt);
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        self.require_alive(q)?;
        for row in 0..2 * self.n {
            let (x, z) = (self.get_x(row, q), self.get_z(row, q));
            self.r[row] ^= x && z;
            self.set_x(row, q, z);
            self.set_z(row, q, x);
        }
        Ok(())
    }

    pub fn apply_s(&mut self, q: usize) -> Result<()> {
        self.require_alive(q)?;
        for row in 0..2 * self.n {
            let (x, z) = (self.get_x(row, q), self.get_z(row, q));
            self.r[row] ^= x && z;
            self.set_z(row, q, z ^ x);
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        self.require_alive(q)?;
        for row in 0..2 * self.n {
            self.r[row] ^= self.get_z(row, q);
        }
        Ok(())
    }

    pub fn apply_z(&mut self, q: usize) -> Result<()> {
        self.require_alive(q)?;
        for row in 0..2 * self.n {
            self.r[row] ^= self.get_x(row, q);
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, word: &PauliWord) -> Result<()> {
        for &(q, p) in &word.0 {
            match p {
                Pauli::I => self.require_alive(q)?,
                Pauli::X => self.apply_x(q)?,
                Pauli::Z => self.apply_z(q)?,
                Pauli::Y => {
                    self.apply_x(q)?;
                    self.apply_z(q)?;
                }
            }
        }
        Ok(())
    }

    fn checked_string(&self, word: &PauliWord) -> Result<PauliString> {
        for q in word.qubits() {
            self.require_alive(q)?;
        }
        PauliString::from_word(self.n, word)
    }

    /// Outcome the measurement of `word` would give if it is determined by the
    /// state (`±word` in the stabilizer group); `None` when it would be random.
    pub fn peek(&self, word: &PauliWord) -> Result<Option<u8>> {
        let p = self.checked_string(word)?;
        Ok(self.deterministic_outcome(&p))
    }

    fn deterministic_outcome(&self, p: &PauliString) -> Option<u8> {
        if (self.n..2 * self.n).any(|row| self.anticommutes(row, p)) {
            return None;
        }
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if self.anticommutes(i, p) {
                let row = self.n + i;
                let phase = product_phase(self.xw(row), self.zw(row), &acc.x, &acc.z)
                    + 2 * (acc.negative as u32 + self.r[row] as u32);
                acc.negative = phase % 4 == 2;
                for w in 0..self.stride {
                    acc.x[w] ^= self.x[row * self.stride + w];
                    acc.z[w] ^= self.z[row * self.stride + w];
                }
            }
        }
        debug_assert!(acc.x == p.x && acc.z == p.z);
        // word is ±acc; the unsigned word has eigenvalue (-1)^acc.negative
        Some(acc.negative as u8 ^ p.negative as u8)
    }

    /// Projective measurement of a Pauli product; returns 0 for `+1`, 1 for `-1`.
    pub fn measure<R: Rng + ?Sized>(&mut self, word: &PauliWord, rng: &mut R) -> Result<u8> {
        let p = self.checked_string(word)?;
        let n = self.n;
        let Some(pivot) = (n..2 * n).find(|&row| self.anticommutes(row, &p)) else {
            return Ok(self
                .deterministic_outcome(&p)
                .expect("no anticommuting stabilizer means the outcome is fixed"));
        };
        for row in 0..2 * n {
            if row != pivot && self.anticommutes(row, &p) {
                self.rowsum(row, pivot);
            }
        }
        let s = self.stride;
        let d = pivot - n;
        self.x.copy_within(pivot * s..(pivot + 1) * s, d * s);
        self.z.copy_within(pivot * s..(pivot + 1) * s, d * s);
        self.r[d] = self.r[pivot];
        let outcome: bool = rng.random();
        self.x[pivot * s..(pivot + 1) * s].copy_from_slice(&p.x);
        self.z[pivot * s..(pivot + 1) * s].copy_from_slice(&p.z);
        self.r[pivot] = outcome ^ p.negative;
        Ok(outcome as u8)
    }

    pub fn measure_x<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        self.measure(&PauliWord::single(q, Pauli::X), rng)
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        self.measure(&PauliWord::single(q, Pauli::Z), rng)
    }

    /// Type-II fusion of `q1` and `q2`. Success reads out `X⊗X` then `Z⊗Z`;
    /// failure degrades to single-qubit `X` measurements. Both qubits die.
    pub fn fuse<R: Rng + ?Sized>(
        &mut self,
        q1: usize,
        q2: usize,
        success: bool,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        self.require_alive(q1)?;
        self.require_alive(q2)?;
        if q1 == q2 {
            return Err(Error::SameQubit(q1));
        }
        let record = if success {
            let xx = self.measure(&PauliWord::x(&[q1, q2]), rng)?;
            let zz = self.measure(&PauliWord::z(&[q1, q2]), rng)?;
            MeasurementRecord {
                qubits: vec![q1, q2],
                basis: Basis::Bell,
                outcomes: vec![xx, zz],
            }
        } else {
            let a = self.measure_x(q1, rng)?;
            let b = self.measure_x(q2, rng)?;
            MeasurementRecord {
                qubits: vec![q1, q2],
                basis: Basis::X,
                outcomes: vec![a, b],
            }
        };
        self.alive[q1] = false;
        self.alive[q2] = false;
        Ok(record)
    }

    /// Finishes a successful fusion whose leaves hung off `q3` and `q4`: `q3` is
    /// measured in `X` and `q4` inherits its neighbourhood.
    ///
    /// `q3_neighbors` are the neighbours of `q3` other than its fused leaf; they
    /// receive a `Z` byproduct when the fusion read `X⊗X = -1`. Returns the `X`
    /// outcome of `q3`.
    pub fn post_fusion_cleanup<R: Rng + ?Sized>(
        &mut self,
        q3: usize,
        q4: usize,
        fusion: &MeasurementRecord,
        q3_neighbors: &[usize],
        rng: &mut R,
    ) -> Result<u8> {
        self.require_alive(q3)?;
        self.require_alive(q4)?;
        let (xx, zz) = match (fusion.xx(), fusion.zz()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::InvalidConfig(
                    "cleanup requires a successful fusion record".into(),
                ))
            }
        };
        if xx == 1 {
            for &v in q3_neighbors {
                self.apply_z(v)?;
            }
        }
        let s3 = self.measure_x(q3, rng)?;
        self.alive[q3] = false;
        // parents that were already adjacent pick up one more phase flip
        let adjacent = q3_neighbors.contains(&q4) as u8;
        if s3 ^ zz ^ adjacent == 1 {
            self.apply_z(q4)?;
        }
        Ok(s3)
    }

    /// True iff every `(a, b)` pair is stabilized by `+X_aX_b` and `+Z_aZ_b`.
    pub fn is_bell_pairs(&self, pairs: &[(usize, usize)]) -> Result<bool> {
        for &(a, b) in pairs {
            self.require_alive(a)?;
            self.require_alive(b)?;
            for word in [PauliWord::x(&[a, b]), PauliWord::z(&[a, b])] {
                if self.peek(&word)? != Some(0) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Reduced row echelon form of the stabilizer group with columns ordered
    /// `x_0..x_{n-1}, z_0..z_{n-1}`. Two tableaux describe the same state iff
    /// their canonical forms agree.
    pub fn canonical_form(&self) -> Vec<PauliString> {
        self.canonical_on(&(0..self.n).collect::<Vec<_>>())
    }

    /// Canonical generators of the subgroup supported on `qubits`. When the
    /// remaining qubits are disentangled (e.g. measured out) this is the full
    /// stabilizer group of the reduced state.
    pub fn canonical_on(&self, qubits: &[usize]) -> Vec<PauliString> {
        let mut keep = vec![false; self.n];
        for &q in qubits {
            keep[q] = true;
        }
        // columns: (qubit, is_z); eliminate the others first
        let mut order: Vec<(usize, bool)> = Vec::with_capacity(2 * self.n);
        for pass_keep in [false, true] {
            for q in (0..self.n).filter(|&q| keep[q] == pass_keep) {
                order.push((q, false));
            }
            for q in (0..self.n).filter(|&q| keep[q] == pass_keep) {
                order.push((q, true));
            }
        }
        let mut rows = self.stabilizers();
        let mut prow = 0;
        let mut lead_keep = Vec::new();
        for &(q, is_z) in &order {
            if prow == rows.len() {
                break;
            }
            let bit = |p: &PauliString| {
                let v = if is_z { &p.z } else { &p.x };
                (v[q / 64] >> (q % 64)) & 1 == 1
            };
            let Some(found) = (prow..rows.len()).find(|&r| bit(&rows[r])) else {
                continue;
            };
            rows.swap(prow, found);
            let pivot = rows[prow].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != prow && bit(row) {
                    multiply_into(row, &pivot);
                }
            }
            lead_keep.push(keep[q]);
            prow += 1;
        }
        rows.truncate(prow);
        rows.into_iter()
            .zip(lead_keep)
            .filter_map(|(row, k)| k.then_some(row))
            .collect()
    }

    /// Canonical form restricted to the qubits that are still alive.
    pub fn canonical_alive(&self) -> Vec<PauliString> {
        self.canonical_on(&self.alive_qubits())
    }

    /// Checks that the stabilizers commute, and that destabilizer `i`
    /// anticommutes exactly with stabilizer `i`.
    pub fn check_invariants(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let anti = symplectic(self.xw(i), self.zw(i), self.xw(j), self.zw(j)) == 1;
                let expected = j == i + n && i < n;
                if anti != expected {
                    return false;
                }
            }
        }
        let mut m = BitMatrix::zeros(n, 2 * n);
        for (i, s) in self.stabilizers().iter().enumerate() {
            for q in 0..n {
                let (x, z) = s.get(q).bits();
                m.set(i, q, x);
                m.set(i, n + q, z);
            }
        }
        m.rank() == n
    }
}

fn multiply_into(row: &mut PauliString, pivot: &PauliString) {
    let phase = product_phase(&pivot.x, &pivot.z, &row.x, &row.z)
        + 2 * (row.negative as u32 + pivot.negative as u32);
    row.negative = phase % 4 == 2;
    for w in 0..row.x.len() {
        row.x[w] ^= pivot.x[w];
        row.z[w] ^= pivot.z[w];
    }
}
