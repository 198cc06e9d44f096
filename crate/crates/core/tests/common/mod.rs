//! Random small graphs and dense, formula-by-formula reference evaluations.
#![allow(dead_code)]

use cosra::BipartiteGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

/// m <= 20 users, n <= 30 objects, each link present with probability in
/// [0.1, 0.5]. Isolated nodes are allowed.
pub fn random_graph(seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(2..=20);
    let n = rng.random_range(2..=30);
    let density = rng.random_range(0.1..=0.5);
    let mut links = Vec::new();
    for u in 0..m {
        for o in 0..n {
            if rng.random_bool(density) {
                links.push((u, o));
            }
        }
    }
    BipartiteGraph::from_links(m, n, links).unwrap()
}

pub fn adjacency(g: &BipartiteGraph) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; g.num_objects()]; g.num_users()];
    for (u, o) in g.links() {
        a[u][o] = 1.0;
    }
    a
}

fn degrees(a: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a.first().map_or(0, Vec::len);
    let ku = a.iter().map(|row| row.iter().sum()).collect();
    let ko = (0..n).map(|o| a.iter().map(|row| row[o]).sum()).collect();
    (ku, ko)
}

/// `Σ_l a_lα a_lβ w(k_l)` scaled by `f(k_α, k_β, α, β)`, via a triple loop.
fn object_pairs(g: &BipartiteGraph, w: impl Fn(f64) -> f64, f: impl Fn(f64, f64) -> f64) -> Dense {
    let a = adjacency(g);
    let (ku, ko) = degrees(&a);
    let n = g.num_objects();
    let mut s = vec![vec![0.0; n]; n];
    for alpha in 0..n {
        for beta in 0..n {
            let mut sum = 0.0;
            for l in 0..g.num_users() {
                if a[l][alpha] == 1.0 && a[l][beta] == 1.0 {
                    sum += w(ku[l]);
                }
            }
            if sum > 0.0 {
                s[alpha][beta] = sum * f(ko[alpha], ko[beta]);
            }
        }
    }
    s
}

pub fn cosine_objects(g: &BipartiteGraph) -> Dense {
    object_pairs(g, |_| 1.0, |ka, kb| 1.0 / (ka * kb).sqrt())
}

pub fn cosine_users(g: &BipartiteGraph) -> Dense {
    let a = adjacency(g);
    let (ku, _) = degrees(&a);
    let m = g.num_users();
    let mut s = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let common: f64 = (0..g.num_objects()).map(|o| a[i][o] * a[j][o]).sum();
            if common > 0.0 {
                s[i][j] = common / (ku[i] * ku[j]).sqrt();
            }
        }
    }
    s
}

pub fn ra(g: &BipartiteGraph) -> Dense {
    object_pairs(g, |k| 1.0 / k, |_, _| 1.0)
}

pub fn cosra(g: &BipartiteGraph) -> Dense {
    object_pairs(g, |k| 1.0 / k, |ka, kb| 1.0 / (ka * kb).sqrt())
}

/// The paper's form, reciprocals of negated exponents, evaluated literally.
pub fn generalized(g: &BipartiteGraph, eta1: f64, eta2: f64) -> Dense {
    object_pairs(g, |k| 1.0 / k.powf(-2.0 * eta1), |ka, kb| 1.0 / (ka * kb).powf(-eta2))
}

pub fn md(g: &BipartiteGraph) -> Dense {
    object_pairs(g, |k| 1.0 / k, |_, kb| 1.0 / kb)
}

pub fn hc(g: &BipartiteGraph) -> Dense {
    object_pairs(g, |k| 1.0 / k, |ka, _| 1.0 / ka)
}

/// `W f` with `f = a_i`.
pub fn apply(w: &Dense, g: &BipartiteGraph, user: usize) -> Vec<f64> {
    let a = adjacency(g);
    w.iter()
        .map(|row| row.iter().zip(&a[user]).map(|(x, f)| x * f).sum())
        .collect()
}

pub fn ucf_scores(g: &BipartiteGraph, user: usize) -> Vec<f64> {
    let a = adjacency(g);
    let s = cosine_users(g);
    (0..g.num_objects())
        .map(|o| (0..g.num_users()).filter(|&j| j != user).map(|j| s[user][j] * a[j][o]).sum())
        .collect()
}

/// Tolerance 1e-12, taken relative once magnitudes exceed 1.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub fn assert_dense_eq(got: &Dense, want: &Dense, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: dimension");
    for (r, (g_row, w_row)) in got.iter().zip(want).enumerate() {
        for (c, (&x, &y)) in g_row.iter().zip(w_row).enumerate() {
            assert!(close(x, y), "{what}: entry ({r},{c}) = {x}, oracle {y}");
        }
    }
}

pub fn assert_vec_eq(got: &[f64], want: &[f64], what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length");
    for (i, (&x, &y)) in got.iter().zip(want).enumerate() {
        assert!(close(x, y), "{what}: [{i}] = {x}, oracle {y}");
    }
}
