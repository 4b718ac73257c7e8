//! Emitter counts for deterministic RGS generation: cut-ranks of emission
//! prefixes (the height function) under a few emission orderings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix};
use crate::protocol::{build_rgs_adjacency, Leaf, RgsGraph, Side};

/// GF(2) rank of the adjacency block between `subset` and its complement.
pub fn cut_rank(adjacency: &BitMatrix, subset: &[usize]) -> Result<usize> {
    let n = adjacency.rows();
    let mut inside = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(Error::InvalidSubset(format!("vertex {v} out of range 0..{n}")));
        }
        if inside[v] {
            return Err(Error::InvalidSubset(format!("vertex {v} repeated")));
        }
        inside[v] = true;
    }
    let outside: Vec<usize> = (0..n).filter(|&v| !inside[v]).collect();
    if subset.is_empty() || outside.is_empty() {
        return Ok(0);
    }
    Ok(adjacency.block(subset, &outside)?.rank())
}

/// An emission sequence: a permutation of the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmissionOrdering {
    order: Vec<usize>,
}

impl EmissionOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidOrdering(format!("{order:?} is not a permutation")));
            }
        }
        Ok(EmissionOrdering { order })
    }

    pub fn identity(n: usize) -> Self {
        EmissionOrdering { order: (0..n).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// `h(x)` for `x = 0..=N`: cut-rank of the first `x` emitted vertices.
pub fn height_function(adjacency: &BitMatrix, ordering: &EmissionOrdering) -> Result<Vec<usize>> {
    if ordering.len() != adjacency.rows() {
        return Err(Error::InvalidOrdering(format!(
            "ordering of {} vertices for a {}-vertex graph",
            ordering.len(),
            adjacency.rows()
        )));
    }
    (0..=ordering.len())
        .map(|x| cut_rank(adjacency, &ordering.order[..x]))
        .collect()
}

pub fn max_height(adjacency: &BitMatrix, ordering: &EmissionOrdering) -> Result<usize> {
    Ok(height_function(adjacency, ordering)?.into_iter().max().unwrap_or(0))
}

fn push_arm(g: &RgsGraph, side: Side, arm: usize, out: &mut Vec<usize>) {
    out.extend(g.index(side, arm, Leaf::First));
    out.extend(g.index(side, arm, Leaf::Second));
}

/// Every left arm (inner leaf, then its outer leaf), then every right arm.
pub fn ordering_a(g: &RgsGraph) -> EmissionOrdering {
    let mut order = Vec::with_capacity(g.len());
    for side in [Side::Left, Side::Right] {
        for arm in 0..g.arms(side) {
            push_arm(g, side, arm, &mut order);
        }
    }
    EmissionOrdering { order }
}

/// Left and right arms alternating; leftover arms of the longer side last.
pub fn ordering_b(g: &RgsGraph) -> EmissionOrdering {
    let mut order = Vec::with_capacity(g.len());
    for arm in 0..g.arms(Side::Left).max(g.arms(Side::Right)) {
        for side in [Side::Left, Side::Right] {
            if arm < g.arms(side) {
                push_arm(g, side, arm, &mut order);
            }
        }
    }
    EmissionOrdering { order }
}

/// Emits, at every step, the vertex giving the smallest next cut-rank
/// (lowest index on ties).
pub fn greedy_ordering(adjacency: &BitMatrix) -> EmissionOrdering {
    let n = adjacency.rows();
    let mut order = Vec::with_capacity(n);
    let mut left: Vec<usize> = (0..n).collect();
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                order.push(v);
                let h = cut_rank(adjacency, &order).expect("valid prefix");
                order.pop();
                (i, h)
            })
            .min_by_key(|&(i, h)| (h, i))
            .expect("nonempty");
        order.push(left.remove(pos));
    }
    EmissionOrdering { order }
}

/// The original RGS without trees: `inner` mutually adjacent vertices, each
/// with one pendant leaf. Vertex `2i` is inner, `2i + 1` its leaf.
pub fn complete_rgs_adjacency(inner: usize) -> BitMatrix {
    let mut a = BitMatrix::zeros(2 * inner, 2 * inner);
    for i in 0..inner {
        for j in 0..inner {
            if i != j {
                a.set(2 * i, 2 * j, true);
            }
        }
        a.set(2 * i, 2 * i + 1, true);
        a.set(2 * i + 1, 2 * i, true);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingKind {
    A,
    B,
    Greedy,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 3] = [OrderingKind::A, OrderingKind::B, OrderingKind::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            OrderingKind::A => "a",
            OrderingKind::B => "b",
            OrderingKind::Greedy => "greedy",
        }
    }

    pub fn build(self, g: &RgsGraph) -> EmissionOrdering {
        match self {
            OrderingKind::A => ordering_a(g),
            OrderingKind::B => ordering_b(g),
            OrderingKind::Greedy => greedy_ordering(&g.adjacency),
        }
    }
}

impl std::str::FromStr for OrderingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(OrderingKind::A),
            "b" => Ok(OrderingKind::B),
            "greedy" => Ok(OrderingKind::Greedy),
            _ => Err(Error::InvalidConfig(format!("unknown ordering {s:?}"))),
        }
    }
}

/// Uniform `k × n` matrix of rank `k`, by rejection.
pub fn sample_full_rank<R: rand::Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<BitMatrix> {
    if k > n {
        return Err(Error::DimensionMismatch(format!("rank {k} impossible with {n} columns")));
    }
    loop {
        let g = gf2::sample_uniform(k, n, rng);
        if g.rank() == k {
            return Ok(g);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightRecord {
    pub k: usize,
    pub n: usize,
    pub ordering: OrderingKind,
    /// Largest `h_max` over the sampled instances.
    pub h_max: usize,
}

/// Worst-case `h_max` per `(k, n, ordering)` over `instances` random RGS
/// with full-rank generators on both sides. Instance `i` of `(k, n)` is drawn
/// from `seed` on a stream derived from `(k, n, i)`.
pub fn height_table(
    ks: &[usize],
    ns: &[usize],
    orderings: &[OrderingKind],
    instances: usize,
    seed: u64,
) -> Result<Vec<HeightRecord>> {
    let cells: Vec<(usize, usize)> = ks
        .iter()
        .flat_map(|&k| ns.iter().filter(move |&&n| n >= k && k >= 1).map(move |&n| (k, n)))
        .collect();
    let per_cell = cells
        .par_iter()
        .map(|&(k, n)| -> Result<Vec<HeightRecord>> {
            let mut worst = vec![0usize; orderings.len()];
            for i in 0..instances {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((k as u64) << 48) ^ ((n as u64) << 24) ^ i as u64);
                let gl = sample_full_rank(k, n, &mut rng)?;
                let gr = sample_full_rank(k, n, &mut rng)?;
                let g = build_rgs_adjacency(&gl, &gr)?;
                for (w, kind) in worst.iter_mut().zip(orderings) {
                    *w = (*w).max(max_height(&g.adjacency, &kind.build(&g))?);
                }
            }
            Ok(orderings
                .iter()
                .zip(worst)
                .map(|(&ordering, h_max)| HeightRecord { k, n, ordering, h_max })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}
