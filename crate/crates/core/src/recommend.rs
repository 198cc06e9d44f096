//! Personalized recommendation on a training graph.
//!
//! Every algorithm reduces to a score per object for a target user. The
//! kernel-based ones (CosRA, generalized CosRA, MD, HC, ICF) spread a unit of
//! resource from each collected object, `f' = W f` with `f_α = a_iα`; UCF sums
//! neighbour similarities over the objects those neighbours collected, and GR
//! just ranks by degree.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::similarity::{
    cosine_object_similarity, cosine_user_similarity, cosra_similarity, generalized_cosra, hc_kernel,
    md_kernel, GeneralizedParams, SimilarityMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    GlobalRanking,
    UserCf,
    ItemCf,
    MassDiffusion,
    HeatConduction,
    CosRa,
    GeneralizedCosRa(GeneralizedParams),
}

impl Algorithm {
    /// The six algorithms compared in the benchmark, in report order.
    pub const BENCHMARK: [Algorithm; 6] = [
        Algorithm::GlobalRanking,
        Algorithm::UserCf,
        Algorithm::ItemCf,
        Algorithm::MassDiffusion,
        Algorithm::HeatConduction,
        Algorithm::CosRa,
    ];

    /// Resolves a tag such as `"CosRA"` or `"md"`; `params` must be given for
    /// `CosRA*` and only for it.
    pub fn from_tag(tag: &str, params: Option<GeneralizedParams>) -> Result<Self> {
        let base = match tag.trim().to_ascii_lowercase().as_str() {
            "gr" => Algorithm::GlobalRanking,
            "ucf" => Algorithm::UserCf,
            "icf" => Algorithm::ItemCf,
            "md" => Algorithm::MassDiffusion,
            "hc" => Algorithm::HeatConduction,
            "cosra" => Algorithm::CosRa,
            "cosra*" => {
                return params.map(Algorithm::GeneralizedCosRa).ok_or(Error::MissingParams {
                    algorithm: "CosRA*".into(),
                })
            }
            _ => return Err(Error::UnknownAlgorithm(tag.to_string())),
        };
        match params {
            Some(_) => Err(Error::UnexpectedParams {
                algorithm: base.name().into(),
            }),
            None => Ok(base),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::GlobalRanking => "GR",
            Algorithm::UserCf => "UCF",
            Algorithm::ItemCf => "ICF",
            Algorithm::MassDiffusion => "MD",
            Algorithm::HeatConduction => "HC",
            Algorithm::CosRa => "CosRA",
            Algorithm::GeneralizedCosRa(_) => "CosRA*",
        }
    }

    pub fn params(&self) -> Option<GeneralizedParams> {
        match self {
            Algorithm::GeneralizedCosRa(p) => Some(*p),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::GeneralizedCosRa(p) => write!(f, "CosRA*({},{})", p.eta1, p.eta2),
            other => f.write_str(other.name()),
        }
    }
}

/// Accepts `GR`, `UCF`, ..., `CosRA` and `CosRA*(eta1,eta2)`.
impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(open) = s.find('(') {
            let (tag, rest) = s.split_at(open);
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))?;
            let parse = |v: &str| v.trim().parse::<f64>().ok();
            let params = match (parse(a), parse(b)) {
                (Some(e1), Some(e2)) => GeneralizedParams::new(e1, e2),
                _ => None,
            }
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))?;
            Algorithm::from_tag(tag, Some(params))
        } else {
            Algorithm::from_tag(s, None)
        }
    }
}

/// Final resource (or score) of every object for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub user: usize,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationList {
    pub user: usize,
    pub items: Vec<usize>,
    /// Requested length.
    pub length: usize,
}

impl RecommendationList {
    /// Fewer uncollected candidates than requested.
    pub fn is_short(&self) -> bool {
        self.items.len() < self.length
    }
}

/// An algorithm bound to its training graph, with any kernel precomputed.
#[derive(Debug, Clone)]
pub struct RecommendationModel<'g> {
    algorithm: Algorithm,
    graph: &'g BipartiteGraph,
    kernel: Option<SimilarityMatrix>,
    /// Transpose of an asymmetric kernel; scoring scatters along its rows.
    kernel_t: Option<SimilarityMatrix>,
    object_degree: Vec<usize>,
}

pub fn build_model<'g>(
    graph: &'g BipartiteGraph,
    tag: &str,
    params: Option<GeneralizedParams>,
) -> Result<RecommendationModel<'g>> {
    Ok(RecommendationModel::new(graph, Algorithm::from_tag(tag, params)?))
}

impl<'g> RecommendationModel<'g> {
    pub fn new(graph: &'g BipartiteGraph, algorithm: Algorithm) -> Self {
        let kernel = match algorithm {
            Algorithm::GlobalRanking => None,
            Algorithm::UserCf => Some(cosine_user_similarity(graph)),
            Algorithm::ItemCf => Some(cosine_object_similarity(graph)),
            Algorithm::MassDiffusion => Some(md_kernel(graph)),
            Algorithm::HeatConduction => Some(hc_kernel(graph)),
            Algorithm::CosRa => Some(cosra_similarity(graph)),
            Algorithm::GeneralizedCosRa(p) => Some(generalized_cosra(graph, p)),
        };
        Self::assemble(graph, algorithm, kernel)
    }

    /// A model with a caller-supplied kernel in place of the algorithm's own.
    /// Its shape must match what the algorithm expects (user side for UCF).
    pub fn with_kernel(graph: &'g BipartiteGraph, algorithm: Algorithm, kernel: SimilarityMatrix) -> Result<Self> {
        let expected = match algorithm {
            Algorithm::GlobalRanking => {
                return Err(Error::Config("global ranking has no kernel".into()))
            }
            Algorithm::UserCf => graph.num_users(),
            _ => graph.num_objects(),
        };
        if kernel.dim() != expected {
            return Err(Error::Config(format!(
                "kernel dimension {} does not match {}",
                kernel.dim(),
                expected
            )));
        }
        Ok(Self::assemble(graph, algorithm, Some(kernel)))
    }

    fn assemble(graph: &'g BipartiteGraph, algorithm: Algorithm, kernel: Option<SimilarityMatrix>) -> Self {
        let kernel_t = kernel
            .as_ref()
            .filter(|k| !k.kind().is_symmetric())
            .map(SimilarityMatrix::transpose);
        RecommendationModel {
            algorithm,
            graph,
            kernel,
            kernel_t,
            object_degree: graph.object_degrees(),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    pub fn kernel(&self) -> Option<&SimilarityMatrix> {
        self.kernel.as_ref()
    }

    pub fn object_degree(&self) -> &[usize] {
        &self.object_degree
    }

    pub fn score_user(&self, user: usize) -> Result<ScoreVector> {
        let graph = self.graph;
        if user >= graph.num_users() {
            return Err(Error::IndexOutOfRange {
                kind: "user",
                index: user,
                size: graph.num_users(),
            });
        }
        let n = graph.num_objects();
        let mut scores = vec![0.0; n];
        match (self.algorithm, &self.kernel) {
            (Algorithm::GlobalRanking, _) => {
                for (s, &k) in scores.iter_mut().zip(&self.object_degree) {
                    *s = k as f64;
                }
            }
            (Algorithm::UserCf, Some(user_sim)) => {
                let (neighbours, sims) = user_sim.row(user);
                for (&j, &s) in neighbours.iter().zip(sims) {
                    if j == user {
                        continue;
                    }
                    for &o in graph.objects_of(j) {
                        scores[o] += s;
                    }
                }
            }
            (_, Some(kernel)) => {
                // f'_α = Σ_β W(α,β) f_β: scatter column β of W for each collected β.
                let columns = self.kernel_t.as_ref().unwrap_or(kernel);
                for &beta in graph.objects_of(user) {
                    let (alphas, weights) = columns.row(beta);
                    for (&alpha, &w) in alphas.iter().zip(weights) {
                        scores[alpha] += w;
                    }
                }
            }
            (alg, None) => unreachable!("{alg} model built without kernel"),
        }
        Ok(ScoreVector { user, scores })
    }

    /// Scores and truncates in one step.
    pub fn recommend(&self, user: usize, length: usize) -> Result<RecommendationList> {
        let scores = self.score_user(user)?;
        Ok(recommend_top_l(&scores, self, length))
    }
}

/// Nonincreasing score, ties to the smaller object index.
fn by_score(scores: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    }
}

/// The top-`length` objects the user has not collected in training.
///
/// Objects absent from the training graph (degree zero) are never
/// candidates.
pub fn recommend_top_l(scores: &ScoreVector, model: &RecommendationModel<'_>, length: usize) -> RecommendationList {
    let graph = model.graph();
    let profile = graph.objects_of(scores.user);
    let mut candidates: Vec<usize> = Vec::with_capacity(graph.num_objects());
    let mut profile_iter = profile.iter().peekable();
    for o in 0..graph.num_objects() {
        if profile_iter.peek() == Some(&&o) {
            profile_iter.next();
            continue;
        }
        if model.object_degree[o] > 0 {
            candidates.push(o);
        }
    }
    let cmp = by_score(&scores.scores);
    if length < candidates.len() {
        if length > 0 {
            candidates.select_nth_unstable_by(length - 1, &cmp);
        }
        candidates.truncate(length);
    }
    candidates.sort_unstable_by(&cmp);
    RecommendationList {
        user: scores.user,
        items: candidates,
        length,
    }
}

pub fn score_user(model: &RecommendationModel<'_>, user: usize) -> Result<ScoreVector> {
    model.score_user(user)
}
