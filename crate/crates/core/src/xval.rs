//! Link-level k-fold cross-validation and the experiments built on it.
//!
//! A realization shuffles the links once and deals them round-robin into `k`
//! folds. Each fold in turn is held out; the remaining links form a training
//! graph over the parent's index space, models are built on it alone, and the
//! seven metrics are averaged over the users that can be evaluated (a nonempty
//! training profile and at least one held-out link to an object that still
//! exists in training). AUC is averaged over held-out links rather than users.
//!
//! Every random choice flows from `ExperimentConfig::seed`, and all
//! reductions run in a fixed (algorithm, realization, fold, user) order, so a
//! report is bit-identical for any rayon pool size.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::metrics::{self, MetricsRow, TestSet};
use crate::recommend::{recommend_top_l, Algorithm, RecommendationList, RecommendationModel};
use crate::similarity::{cosine_object_similarity, GeneralizedParams, SimilarityMatrix};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of realization `r`: `mix64(seed ^ mix64(r))`.
pub fn realization_seed(seed: u64, realization: usize) -> u64 {
    mix64(seed ^ mix64(realization as u64))
}

/// Seed for the Hamming pair sampler of one fold; independent of the
/// algorithm so that every algorithm sees the same pairs.
fn fold_seed(realization_seed: u64, fold: usize) -> u64 {
    mix64(realization_seed ^ mix64(0x00F0_1D00 ^ fold as u64))
}

/// Fold index of every link, in the graph's user-major link order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub k: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldSplit {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle of the links followed by round-robin dealing.
pub fn split_folds(graph: &BipartiteGraph, k: usize, seed: u64) -> Result<FoldSplit> {
    let links = graph.num_links();
    if k < 2 || k > links {
        return Err(Error::TooManyFolds { folds: k, links });
    }
    let mut order: Vec<usize> = (0..links).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0; links];
    for (pos, &link) in order.iter().enumerate() {
        assignment[link] = pos % k;
    }
    Ok(FoldSplit { k, seed, assignment })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k_folds: usize,
    pub realizations: usize,
    pub length: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// `None` computes the Hamming distance over all user pairs.
    pub hamming_pair_budget: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k_folds: 10,
            realizations: 10,
            length: 50,
            seed: 0,
            algorithms: Algorithm::BENCHMARK.to_vec(),
            hamming_pair_budget: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_folds < 2 {
            return Err(Error::Config(format!("folds must be >= 2, got {}", self.k_folds)));
        }
        if self.realizations < 1 {
            return Err(Error::Config("realizations must be >= 1".into()));
        }
        if self.length < 1 {
            return Err(Error::Config("list length must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        if self.hamming_pair_budget == Some(0) {
            return Err(Error::Config("hamming pair budget must be positive".into()));
        }
        Ok(())
    }
}

/// Training graph and held-out links of one fold.
#[derive(Debug, Clone)]
pub struct FoldData {
    pub fold: usize,
    pub train: BipartiteGraph,
    /// Held-out objects per user, restricted to objects seen in training.
    pub test: TestSet,
    /// Users with a training profile and a nonempty test set, ascending.
    pub users: Vec<usize>,
}

impl FoldData {
    pub fn new(graph: &BipartiteGraph, split: &FoldSplit, fold: usize) -> Result<Self> {
        if fold >= split.k {
            return Err(Error::IndexOutOfRange {
                kind: "fold",
                index: fold,
                size: split.k,
            });
        }
        if split.assignment.len() != graph.num_links() {
            return Err(Error::Config("split does not belong to this graph".into()));
        }
        let (held_out, kept): (Vec<_>, Vec<_>) = graph
            .links()
            .zip(&split.assignment)
            .partition(|(_, &f)| f == fold);
        let train = graph.with_links(kept.into_iter().map(|(link, _)| link))?;
        if train.num_links() == 0 {
            return Err(Error::EmptyTrainingGraph { fold });
        }
        let mut test = TestSet::from_links(graph.num_users(), held_out.into_iter().map(|(link, _)| link));
        test.retain(|_, o| train.object_degree(o) > 0);
        let users = (0..graph.num_users())
            .filter(|&u| train.user_degree(u) > 0 && !test.items(u).is_empty())
            .collect();
        Ok(FoldData {
            fold,
            train,
            test,
            users,
        })
    }
}

struct UserOutcome {
    list: RecommendationList,
    auc: Option<(f64, usize)>,
    ap: f64,
    precision: f64,
    recall: f64,
}

/// Recommendation lists of every evaluable user of a fold, in user order.
pub fn fold_lists(model: &RecommendationModel<'_>, data: &FoldData, length: usize) -> Vec<RecommendationList> {
    data.users
        .par_iter()
        .map(|&u| model.recommend(u, length).expect("evaluable user is in range"))
        .collect()
}

fn evaluate_model(
    model: &RecommendationModel<'_>,
    data: &FoldData,
    cos: &SimilarityMatrix,
    length: usize,
    hamming_budget: Option<usize>,
    hamming_seed: u64,
) -> MetricsRow {
    let train = model.graph();
    let outcomes: Vec<UserOutcome> = data
        .users
        .par_iter()
        .map(|&u| {
            let scores = model.score_user(u).expect("evaluable user is in range");
            let list = recommend_top_l(&scores, model, length);
            let test = data.test.items(u);
            let profile = train.objects_of(u);
            let candidates: Vec<usize> = (0..train.num_objects())
                .filter(|&o| train.object_degree(o) > 0 && profile.binary_search(&o).is_err())
                .collect();
            UserOutcome {
                auc: metrics::auc(&scores, test, &candidates).map(|a| (a, test.len())),
                ap: metrics::average_precision(&list, test, test.len()),
                precision: metrics::precision(&list, test),
                recall: metrics::recall(&list, test),
                list,
            }
        })
        .collect();

    let mean = |xs: Vec<f64>| metrics::map(&xs).unwrap_or(0.0);
    let lists: Vec<RecommendationList> = outcomes.iter().map(|o| o.list.clone()).collect();
    MetricsRow {
        auc: metrics::auc_over_links(&outcomes.iter().filter_map(|o| o.auc).collect::<Vec<_>>()).unwrap_or(0.0),
        map: mean(outcomes.iter().map(|o| o.ap).collect()),
        precision: mean(outcomes.iter().map(|o| o.precision).collect()),
        recall: mean(outcomes.iter().map(|o| o.recall).collect()),
        hamming: metrics::hamming(&lists, length, hamming_budget, hamming_seed),
        intra_similarity: metrics::intra_similarity(&lists, cos).unwrap_or(0.0),
        popularity: metrics::popularity(&lists, model.object_degree()).unwrap_or(0.0),
        length,
        users_evaluated: outcomes.len(),
        short_lists: lists.iter().filter(|l| l.is_short()).count(),
    }
}

fn evaluate_fold(
    data: &FoldData,
    algorithms: &[Algorithm],
    config: &ExperimentConfig,
    hamming_seed: u64,
) -> Vec<MetricsRow> {
    let cos = cosine_object_similarity(&data.train);
    algorithms
        .iter()
        .map(|&alg| {
            let model = RecommendationModel::new(&data.train, alg);
            evaluate_model(&model, data, &cos, config.length, config.hamming_pair_budget, hamming_seed)
        })
        .collect()
}

/// All seven metrics of one algorithm on one fold.
pub fn run_fold(
    graph: &BipartiteGraph,
    split: &FoldSplit,
    fold: usize,
    algorithm: Algorithm,
    config: &ExperimentConfig,
) -> Result<MetricsRow> {
    let data = FoldData::new(graph, split, fold)?;
    Ok(evaluate_fold(&data, &[algorithm], config, fold_seed(split.seed, fold)).remove(0))
}

/// `rows[a][r]`: metrics of algorithm `a`, realization `r`, averaged over folds.
fn realization_rows(
    graph: &BipartiteGraph,
    algorithms: &[Algorithm],
    config: &ExperimentConfig,
) -> Result<Vec<Vec<MetricsRow>>> {
    config.validate()?;
    let splits: Vec<FoldSplit> = (0..config.realizations)
        .map(|r| split_folds(graph, config.k_folds, realization_seed(config.seed, r)))
        .collect::<Result<_>>()?;
    let units: Vec<(usize, usize)> = (0..config.realizations)
        .flat_map(|r| (0..config.k_folds).map(move |f| (r, f)))
        .collect();
    let per_unit: Vec<Vec<MetricsRow>> = units
        .par_iter()
        .map(|&(r, f)| {
            let split = &splits[r];
            let data = FoldData::new(graph, split, f)?;
            Ok(evaluate_fold(&data, algorithms, config, fold_seed(split.seed, f)))
        })
        .collect::<Result<_>>()?;

    let k = config.k_folds;
    Ok((0..algorithms.len())
        .map(|a| {
            (0..config.realizations)
                .map(|r| {
                    let folds: Vec<MetricsRow> = (0..k).map(|f| per_unit[r * k + f][a]).collect();
                    MetricsRow::mean(&folds).expect("k >= 2")
                })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmReport {
    pub algorithm: Algorithm,
    /// One row per realization, each averaged over the folds.
    pub realizations: Vec<MetricsRow>,
    pub mean: MetricsRow,
    /// Sample standard deviation over realization means.
    pub std_dev: MetricsRow,
}

impl AlgorithmReport {
    fn new(algorithm: Algorithm, realizations: Vec<MetricsRow>) -> Self {
        AlgorithmReport {
            algorithm,
            mean: MetricsRow::mean(&realizations).expect("realizations >= 1"),
            std_dev: MetricsRow::std_dev(&realizations).expect("realizations >= 1"),
            realizations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub dataset: String,
    pub config: ExperimentConfig,
    pub code_version: &'static str,
    pub algorithms: Vec<AlgorithmReport>,
}

impl Report {
    pub fn get(&self, algorithm: Algorithm) -> Option<&AlgorithmReport> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }
}

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn run_experiment(graph: &BipartiteGraph, config: &ExperimentConfig) -> Result<Report> {
    run_experiment_named(graph, config, "")
}

pub fn run_experiment_named(graph: &BipartiteGraph, config: &ExperimentConfig, dataset: &str) -> Result<Report> {
    let rows = realization_rows(graph, &config.algorithms, config)?;
    Ok(Report {
        dataset: dataset.to_string(),
        config: config.clone(),
        code_version: CODE_VERSION,
        algorithms: config
            .algorithms
            .iter()
            .zip(rows)
            .map(|(&alg, rows)| AlgorithmReport::new(alg, rows))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub params: GeneralizedParams,
    pub report: AlgorithmReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    /// Row-major over `eta1` then `eta2`.
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn cell(&self, eta1: f64, eta2: f64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.params.eta1 == eta1 && c.params.eta2 == eta2)
    }

    /// Cell with the largest grand-mean AUC (first on ties).
    pub fn best_auc(&self) -> Option<&SweepCell> {
        self.cells.iter().fold(None, |best: Option<&SweepCell>, c| match best {
            Some(b) if b.report.mean.auc >= c.report.mean.auc => Some(b),
            _ => Some(c),
        })
    }
}

/// Generalized CosRA at every grid point; all cells share one sequence of
/// splits, so differences between cells are paired.
pub fn sweep(
    graph: &BipartiteGraph,
    eta1_grid: &[f64],
    eta2_grid: &[f64],
    config: &ExperimentConfig,
) -> Result<SweepReport> {
    if eta1_grid.is_empty() || eta2_grid.is_empty() {
        return Err(Error::Config("sweep grids must be nonempty".into()));
    }
    let params: Vec<GeneralizedParams> = eta1_grid
        .iter()
        .flat_map(|&e1| eta2_grid.iter().map(move |&e2| (e1, e2)))
        .map(|(e1, e2)| {
            GeneralizedParams::new(e1, e2).ok_or_else(|| Error::Config(format!("non-finite grid point ({e1}, {e2})")))
        })
        .collect::<Result<_>>()?;
    let algorithms: Vec<Algorithm> = params.iter().map(|&p| Algorithm::GeneralizedCosRa(p)).collect();
    let cell_config = ExperimentConfig {
        algorithms: algorithms.clone(),
        ..config.clone()
    };
    let rows = realization_rows(graph, &algorithms, &cell_config)?;
    Ok(SweepReport {
        config: cell_config,
        cells: params
            .into_iter()
            .zip(algorithms)
            .zip(rows)
            .map(|((params, alg), rows)| SweepCell {
                params,
                report: AlgorithmReport::new(alg, rows),
            })
            .collect(),
    })
}

/// How often objects of each training degree were recommended.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    pub counts: BTreeMap<usize, usize>,
    pub users_evaluated: usize,
    pub length: usize,
    /// Missing slots summed over short lists.
    pub deficit: usize,
}

impl DegreeHistogram {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn mean_degree(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.counts.iter().map(|(&d, &c)| (d * c) as f64).sum::<f64>() / total as f64
    }
}

pub fn degree_distribution(
    graph: &BipartiteGraph,
    split: &FoldSplit,
    fold: usize,
    algorithm: Algorithm,
    length: usize,
) -> Result<DegreeHistogram> {
    if length < 1 {
        return Err(Error::Config("list length must be >= 1".into()));
    }
    let data = FoldData::new(graph, split, fold)?;
    let model = RecommendationModel::new(&data.train, algorithm);
    let lists = fold_lists(&model, &data, length);
    let mut hist = DegreeHistogram {
        users_evaluated: lists.len(),
        length,
        ..Default::default()
    };
    for list in &lists {
        hist.deficit += length - list.items.len();
        for &o in &list.items {
            *hist.counts.entry(data.train.object_degree(o)).or_default() += 1;
        }
    }
    Ok(hist)
}
