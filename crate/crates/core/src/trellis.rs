//! Linear trellis graphs and their reduction to parallel path graphs by
//! CNOTs that never leave a layer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix};
use crate::stabsim::Tableau;

/// Layered graph whose only edges join consecutive layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrellisGraph {
    layer_sizes: Vec<usize>,
    betas: Vec<BitMatrix>,
}

impl TrellisGraph {
    pub fn new(layer_sizes: Vec<usize>, betas: Vec<BitMatrix>) -> Result<Self> {
        if layer_sizes.is_empty() || betas.len() + 1 != layer_sizes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} layers need {} biadjacency matrices, got {}",
                layer_sizes.len(),
                layer_sizes.len().saturating_sub(1),
                betas.len()
            )));
        }
        for (a, b) in betas.iter().enumerate() {
            if b.shape() != (layer_sizes[a], layer_sizes[a + 1]) {
                return Err(Error::DimensionMismatch(format!(
                    "biadjacency {a} is {:?}, layers are {} and {}",
                    b.shape(),
                    layer_sizes[a],
                    layer_sizes[a + 1]
                )));
            }
        }
        Ok(TrellisGraph { layer_sizes, betas })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn betas(&self) -> &[BitMatrix] {
        &self.betas
    }

    pub fn num_vertices(&self) -> usize {
        self.layer_sizes.iter().sum()
    }

    /// Global index of the first vertex in each layer.
    pub fn offsets(&self) -> Vec<usize> {
        self.layer_sizes
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect()
    }

    /// Layer containing global vertex `v`.
    pub fn layer_of(&self, v: usize) -> Option<usize> {
        let mut acc = 0;
        for (a, &n) in self.layer_sizes.iter().enumerate() {
            if v < acc + n {
                return Some(a);
            }
            acc += n;
        }
        None
    }

    pub fn adjacency(&self) -> BitMatrix {
        let n = self.num_vertices();
        let off = self.offsets();
        let mut adj = BitMatrix::zeros(n, n);
        for (a, b) in self.betas.iter().enumerate() {
            adj.paste(off[a], off[a + 1], b);
            adj.paste(off[a + 1], off[a], &b.transpose());
        }
        adj
    }

    /// `k` parallel paths through the first `k` vertices of each layer; every
    /// other vertex is isolated.
    pub fn canonical(k: usize, layer_sizes: &[usize]) -> Result<Self> {
        let gammas = layer_sizes
            .iter()
            .map(|&n| canonical_gamma(k, n))
            .collect::<Result<Vec<_>>>()?;
        build_ltg(&GammaFactorization { k, gammas })
    }
}

fn canonical_gamma(k: usize, n: usize) -> Result<BitMatrix> {
    if n < k {
        return Err(Error::DimensionMismatch(format!(
            "layer of size {n} cannot carry {k} paths"
        )));
    }
    let mut g = BitMatrix::zeros(k, n);
    for i in 0..k {
        g.set(i, i, true);
    }
    Ok(g)
}

/// Per-layer `k × n_a` matrices whose consecutive products give the biadjacencies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaFactorization {
    pub k: usize,
    pub gammas: Vec<BitMatrix>,
}

impl GammaFactorization {
    pub fn new(k: usize, gammas: Vec<BitMatrix>) -> Result<Self> {
        let f = GammaFactorization { k, gammas };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::DimensionMismatch("no layers".into()));
        }
        for (a, g) in self.gammas.iter().enumerate() {
            if g.rows() != self.k {
                return Err(Error::DimensionMismatch(format!(
                    "layer {a} has {} rows, expected {}",
                    g.rows(),
                    self.k
                )));
            }
            let rank = g.rank();
            if rank < self.k {
                return Err(Error::RankDeficientGamma {
                    layer: a,
                    rank,
                    k: self.k,
                });
            }
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.gammas.iter().map(|g| g.cols()).collect()
    }
}

pub fn build_ltg(fac: &GammaFactorization) -> Result<TrellisGraph> {
    fac.validate()?;
    let betas = fac
        .gammas
        .windows(2)
        .map(|w| w[0].transpose().mul(&w[1]))
        .collect::<Result<Vec<_>>>()?;
    TrellisGraph::new(fac.layer_sizes(), betas)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cnot {
    pub control: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCnotTransform {
    /// `gamma_a · q[a] = [I | 0]`.
    pub q: Vec<BitMatrix>,
    /// Gates in application order, global vertex indices, grouped by layer.
    pub cnots: Vec<Vec<Cnot>>,
    pub target: TrellisGraph,
}

/// Computes within-layer CNOT circuits that turn the trellis of `fac` into
/// `k` parallel paths plus isolated vertices.
pub fn theorem1_transform(fac: &GammaFactorization) -> Result<LocalCnotTransform> {
    fac.validate()?;
    let qs = fac
        .gammas
        .iter()
        .enumerate()
        .map(|(a, g)| {
            gf2::normalize_gamma(g).map_err(|_| Error::RankDeficientGamma {
                layer: a,
                rank: g.rank(),
                k: fac.k,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    transform_from_q(fac, qs)
}

/// CNOT circuits realising the given invertible per-layer column operations.
pub fn transform_from_q(fac: &GammaFactorization, qs: Vec<BitMatrix>) -> Result<LocalCnotTransform> {
    let ltg = build_ltg(fac)?;
    if qs.len() != fac.gammas.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} column operations for {} layers",
            qs.len(),
            fac.gammas.len()
        )));
    }
    let off = ltg.offsets();
    let mut cnots = Vec::with_capacity(qs.len());
    for (a, q) in qs.iter().enumerate() {
        // a Z-block column XOR `col t ^= col s` is CNOT with control t, target s
        let layer = gf2::decompose_invertible(q)?
            .into_iter()
            .map(|step| Cnot {
                control: off[a] + step.target,
                target: off[a] + step.source,
            })
            .collect();
        cnots.push(layer);
    }
    Ok(LocalCnotTransform {
        q: qs,
        cnots,
        target: TrellisGraph::canonical(fac.k, ltg.layer_sizes())?,
    })
}

/// Four-layer, rank-2 factorization used as the reference example.
pub fn worked_example() -> GammaFactorization {
    let m = |rows: &[&[u8]]| BitMatrix::from_rows(rows).expect("rectangular");
    GammaFactorization::new(
        2,
        vec![
            m(&[&[1, 0], &[0, 1]]),
            m(&[&[1, 1, 0, 1], &[0, 1, 1, 0]]),
            m(&[&[1, 1, 0], &[0, 1, 1]]),
            m(&[&[1, 1, 1], &[0, 1, 0]]),
        ],
    )
    .expect("valid factorization")
}

/// Biadjacencies of [`worked_example`] before and after the transform.
pub fn worked_example_betas() -> (Vec<BitMatrix>, Vec<BitMatrix>) {
    let m = |rows: &[&[u8]]| BitMatrix::from_rows(rows).expect("rectangular");
    (
        vec![
            m(&[&[1, 1, 0, 1], &[0, 1, 1, 0]]),
            m(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]),
            m(&[&[1, 1, 1], &[1, 0, 1], &[0, 1, 0]]),
        ],
        vec![
            m(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]),
            m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]),
            m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]),
        ],
    )
}

/// Applies the per-layer CNOTs to the graph state of `ltg` and compares the
/// resulting stabilizer group with that of `target`.
pub fn verify_equivalence(
    ltg: &TrellisGraph,
    cnots: &[Vec<Cnot>],
    target: &TrellisGraph,
) -> Result<bool> {
    if ltg.layer_sizes() != target.layer_sizes() {
        return Err(Error::DimensionMismatch(
            "source and target have different layers".into(),
        ));
    }
    if cnots.len() > ltg.layer_sizes().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} CNOT lists for {} layers",
            cnots.len(),
            ltg.layer_sizes().len()
        )));
    }
    let mut t = Tableau::graph_state(&ltg.adjacency())?;
    for (a, layer) in cnots.iter().enumerate() {
        for g in layer {
            if ltg.layer_of(g.control) != Some(a) || ltg.layer_of(g.target) != Some(a) {
                return Err(Error::CrossLayerCnot {
                    layer: a,
                    control: g.control,
                    target: g.target,
                });
            }
            t.apply_cnot(g.control, g.target)?;
        }
    }
    let expected = Tableau::graph_state(&target.adjacency())?;
    Ok(t.canonical_form() == expected.canonical_form())
}

/// Logical `X` readout of a layer from its received physical `X` outcomes.
pub fn transversal_decode(x_layer: &[u8], gt: &BitMatrix) -> Result<Vec<u8>> {
    gf2::solve_left(gt, x_layer)
}
