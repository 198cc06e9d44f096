use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cosra::xval::{self, realization_seed, split_folds};
use cosra::{build_graph, parse_ratings, BipartiteGraph};

use crate::config::Manifest;
use crate::output;

pub fn load_graph(manifest: &Manifest) -> Result<BipartiteGraph> {
    let path = &manifest.data;
    let file = File::open(path).with_context(|| format!("cannot open dataset {}", path.display()))?;
    let records = parse_ratings(BufReader::new(file), &manifest.format)
        .with_context(|| format!("cannot parse {}", path.display()))?;
    build_graph(&records, manifest.threshold).with_context(|| format!("cannot build graph from {}", path.display()))
}

fn dataset_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("cannot start worker pool")?;
    Ok(pool.install(job))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

pub fn cmd_stats(manifest: &Manifest) -> Result<String> {
    let graph = load_graph(manifest)?;
    Ok(output::stats_table(&graph.stats()))
}

/// Writes `report.csv` and `manifest.echo`; returns the report path.
pub fn cmd_run(manifest: &Manifest) -> Result<PathBuf> {
    let graph = load_graph(manifest)?;
    let name = dataset_name(&manifest.data);
    let report = in_pool(manifest.workers, || {
        xval::run_experiment_named(&graph, &manifest.experiment, &name)
    })??;
    write(&manifest.out, "manifest.echo", &manifest.echo())?;
    write(&manifest.out, "report.csv", &output::report_csv(&report))
}

pub fn cmd_sweep(manifest: &Manifest) -> Result<PathBuf> {
    let graph = load_graph(manifest)?;
    let sweep = in_pool(manifest.workers, || {
        xval::sweep(&graph, &manifest.eta1, &manifest.eta2, &manifest.experiment)
    })??;
    write(&manifest.out, "manifest.echo", &manifest.echo())?;
    write(&manifest.out, "sweep.csv", &output::sweep_csv(&sweep))
}

fn file_tag(alg: &cosra::Algorithm) -> String {
    match alg.params() {
        Some(p) => format!("cosra-star_{}_{}", p.eta1, p.eta2),
        None => alg.name().to_ascii_lowercase(),
    }
}

/// One `degdist_<alg>_<L>.csv` per (algorithm, length), taken from fold
/// `manifest.fold` of the first realization.
pub fn cmd_degree_dist(manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let graph = load_graph(manifest)?;
    let cfg = &manifest.experiment;
    let split = split_folds(&graph, cfg.k_folds, realization_seed(cfg.seed, 0))?;
    let mut written = Vec::new();
    for alg in &cfg.algorithms {
        for &length in &manifest.lengths {
            let hist = in_pool(manifest.workers, || {
                xval::degree_distribution(&graph, &split, manifest.fold, *alg, length)
            })??;
            let name = format!("degdist_{}_{length}.csv", file_tag(alg));
            written.push(write(&manifest.out, &name, &output::histogram_csv(&hist))?);
        }
    }
    Ok(written)
}
