//! Vertex similarity indices and diffusion kernels on a bipartite graph.
//!
//! Every matrix here is a sum over two-step paths `α → i → β` through a
//! common neighbour `i`. Rows are built independently by scattering each
//! path's weight into a dense accumulator, so the cost is `O(Σ_i k_i²)` and
//! the result does not depend on how rows are distributed across threads.
//!
//! Within a row, contributions are added in ascending order of the middle
//! node. Entry `(α, β)` and entry `(β, α)` therefore see the same terms in the
//! same order, which makes the symmetric kinds symmetric bit for bit and
//! makes the heat-conduction kernel the exact transpose of mass diffusion.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::graph::BipartiteGraph;

/// Exponents of the generalized CosRA index: the user-degree weight is
/// `k_l^(2·eta1)` and the object pair is scaled by `(k_α k_β)^eta2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedParams {
    pub eta1: f64,
    pub eta2: f64,
}

impl GeneralizedParams {
    /// The parameter point that reproduces plain CosRA.
    pub const COSRA: GeneralizedParams = GeneralizedParams {
        eta1: -0.5,
        eta2: -0.5,
    };

    pub fn new(eta1: f64, eta2: f64) -> Option<Self> {
        (eta1.is_finite() && eta2.is_finite()).then_some(GeneralizedParams { eta1, eta2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimilarityKind {
    CosineObject,
    CosineUser,
    ResourceAllocation,
    CosRa,
    GeneralizedCosRa(GeneralizedParams),
    MassDiffusion,
    HeatConduction,
}

impl SimilarityKind {
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, SimilarityKind::MassDiffusion | SimilarityKind::HeatConduction)
    }
}

/// Sparse square matrix in CSR layout. Absent entries are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    kind: SimilarityKind,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices (ascending) and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.offsets[r]..self.offsets[r + 1];
        (&self.cols[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, values) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |pos| values[pos])
    }

    /// `(row, col, value)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            let (cols, values) = self.row(r);
            cols.iter().zip(values).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn transpose(&self) -> SimilarityMatrix {
        let n = self.dim();
        let mut counts = vec![0usize; n + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut cols = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (r, c, v) in self.triples() {
            let slot = cursor[c];
            cols[slot] = r;
            values[slot] = v;
            cursor[c] += 1;
        }
        let kind = match self.kind {
            SimilarityKind::MassDiffusion => SimilarityKind::HeatConduction,
            SimilarityKind::HeatConduction => SimilarityKind::MassDiffusion,
            other => other,
        };
        SimilarityMatrix {
            kind,
            offsets,
            cols,
            values,
        }
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> SimilarityMatrix {
        SimilarityMatrix {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|r| self.row(r).1.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim()];
        for (_, c, v) in self.triples() {
            sums[c] += v;
        }
        sums
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.dim()]; self.dim()];
        for (r, c, v) in self.triples() {
            dense[r][c] = v;
        }
        dense
    }

    /// Debug dump: one `row col value` line per stored entry.
    pub fn write_triples<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (r, c, v) in self.triples() {
            writeln!(out, "{r} {c} {v:e}")?;
        }
        Ok(())
    }
}

/// Shared row builder. `rows_via(r)` lists the middle nodes adjacent to row
/// node `r`, `via_rows(i)` the row nodes adjacent to middle node `i`.
fn two_step<'g, A, B, F>(
    kind: SimilarityKind,
    dim: usize,
    rows_via: A,
    via_rows: B,
    via_weight: &[f64],
    finish: F,
) -> SimilarityMatrix
where
    A: Fn(usize) -> &'g [usize] + Sync,
    B: Fn(usize) -> &'g [usize] + Sync,
    F: Fn(usize, usize, f64) -> f64 + Sync,
{
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..dim)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; dim], vec![false; dim], Vec::<usize>::new()),
            |(acc, seen, touched), r| {
                for &i in rows_via(r) {
                    let w = via_weight[i];
                    for &c in via_rows(i) {
                        if !seen[c] {
                            seen[c] = true;
                            touched.push(c);
                        }
                        acc[c] += w;
                    }
                }
                touched.sort_unstable();
                let mut cols = Vec::with_capacity(touched.len());
                let mut values = Vec::with_capacity(touched.len());
                for &c in touched.iter() {
                    let v = finish(r, c, acc[c]);
                    if v > 0.0 {
                        cols.push(c);
                        values.push(v);
                    }
                    acc[c] = 0.0;
                    seen[c] = false;
                }
                touched.clear();
                (cols, values)
            },
        )
        .collect();

    let mut offsets = Vec::with_capacity(dim + 1);
    offsets.push(0);
    let nnz = rows.iter().map(|(c, _)| c.len()).sum();
    let mut cols = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    for (c, v) in rows {
        cols.extend(c);
        values.extend(v);
        offsets.push(cols.len());
    }
    SimilarityMatrix {
        kind,
        offsets,
        cols,
        values,
    }
}

fn object_side<F>(graph: &BipartiteGraph, kind: SimilarityKind, user_weight: &[f64], finish: F) -> SimilarityMatrix
where
    F: Fn(usize, usize, f64) -> f64 + Sync,
{
    two_step(
        kind,
        graph.num_objects(),
        |o| graph.users_of(o),
        |u| graph.objects_of(u),
        user_weight,
        finish,
    )
}

fn inverse_user_degrees(graph: &BipartiteGraph) -> Vec<f64> {
    (0..graph.num_users())
        .map(|u| 1.0 / graph.user_degree(u) as f64)
        .collect()
}

fn degree_product(a: usize, b: usize) -> f64 {
    (a as f64) * (b as f64)
}

/// `S^Cos(α,β) = |Γ(α) ∩ Γ(β)| / √(k_α k_β)`; the diagonal is 1.
pub fn cosine_object_similarity(graph: &BipartiteGraph) -> SimilarityMatrix {
    let ones = vec![1.0; graph.num_users()];
    let deg = graph.object_degrees();
    object_side(graph, SimilarityKind::CosineObject, &ones, |a, b, sum| {
        sum / degree_product(deg[a], deg[b]).sqrt()
    })
}

/// User-user cosine over shared objects.
pub fn cosine_user_similarity(graph: &BipartiteGraph) -> SimilarityMatrix {
    let ones = vec![1.0; graph.num_objects()];
    let deg = graph.user_degrees();
    two_step(
        SimilarityKind::CosineUser,
        graph.num_users(),
        |u| graph.objects_of(u),
        |o| graph.users_of(o),
        &ones,
        |i, j, sum| sum / degree_product(deg[i], deg[j]).sqrt(),
    )
}

/// `S^RA(α,β) = Σ_i a_iα a_iβ / k_i`.
pub fn ra_similarity(graph: &BipartiteGraph) -> SimilarityMatrix {
    let weights = inverse_user_degrees(graph);
    object_side(graph, SimilarityKind::ResourceAllocation, &weights, |_, _, sum| sum)
}

/// `S^CosRA(α,β) = S^RA(α,β) / √(k_α k_β)`, diagonal included.
pub fn cosra_similarity(graph: &BipartiteGraph) -> SimilarityMatrix {
    let weights = inverse_user_degrees(graph);
    let deg = graph.object_degrees();
    object_side(graph, SimilarityKind::CosRa, &weights, |a, b, sum| {
        sum / degree_product(deg[a], deg[b]).sqrt()
    })
}

/// `k^e`, evaluated exactly for the exponents that have a closed form so that
/// the CosRA special case matches [`cosra_similarity`] bit for bit.
fn degree_power(k: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        k
    } else if e == -1.0 {
        1.0 / k
    } else if e == 2.0 {
        k * k
    } else if e == -2.0 {
        1.0 / (k * k)
    } else if e == 0.5 {
        k.sqrt()
    } else {
        k.powf(e)
    }
}

/// `S^CosRA*(α,β) = (k_α k_β)^η₂ Σ_l a_lα a_lβ k_l^(2η₁)`.
pub fn generalized_cosra(graph: &BipartiteGraph, params: GeneralizedParams) -> SimilarityMatrix {
    let user_exp = 2.0 * params.eta1;
    let weights: Vec<f64> = (0..graph.num_users())
        .map(|u| degree_power(graph.user_degree(u) as f64, user_exp))
        .collect();
    let deg = graph.object_degrees();
    let eta2 = params.eta2;
    object_side(
        graph,
        SimilarityKind::GeneralizedCosRa(params),
        &weights,
        move |a, b, sum| {
            let p = degree_product(deg[a], deg[b]);
            if eta2 == -0.5 {
                sum / p.sqrt()
            } else if eta2 == -1.0 {
                sum / p
            } else {
                sum * degree_power(p, eta2)
            }
        },
    )
}

/// Mass-diffusion kernel `W(α,β) = S^RA(α,β) / k_β`; columns sum to one.
pub fn md_kernel(graph: &BipartiteGraph) -> SimilarityMatrix {
    let weights = inverse_user_degrees(graph);
    let deg = graph.object_degrees();
    object_side(graph, SimilarityKind::MassDiffusion, &weights, |_, b, sum| {
        sum / deg[b] as f64
    })
}

/// Heat-conduction kernel `W(α,β) = S^RA(α,β) / k_α`; rows sum to one.
pub fn hc_kernel(graph: &BipartiteGraph) -> SimilarityMatrix {
    let weights = inverse_user_degrees(graph);
    let deg = graph.object_degrees();
    object_side(graph, SimilarityKind::HeatConduction, &weights, |a, _, sum| {
        sum / deg[a] as f64
    })
}
