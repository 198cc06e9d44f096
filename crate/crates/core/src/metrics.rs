//! Accuracy, diversity and novelty of top-L recommendations.
//!
//! Per-user quantities take the held-out objects as an ascending slice.
//! Users whose value is undefined (no positives, no negatives, too short a
//! list) are skipped by the averaging functions, which then report `None` if
//! nobody is left.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::recommend::{RecommendationList, ScoreVector};
use crate::similarity::SimilarityMatrix;

/// Held-out objects per user, each list ascending and disjoint from the
/// user's training profile.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestSet {
    items: Vec<Vec<usize>>,
}

impl TestSet {
    pub fn new(num_users: usize) -> Self {
        TestSet {
            items: vec![Vec::new(); num_users],
        }
    }

    pub fn from_links(num_users: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut set = TestSet::new(num_users);
        for (u, o) in links {
            set.items[u].push(o);
        }
        for list in &mut set.items {
            list.sort_unstable();
            list.dedup();
        }
        set
    }

    pub fn num_users(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self, user: usize) -> &[usize] {
        &self.items[user]
    }

    pub fn retain(&mut self, mut keep: impl FnMut(usize, usize) -> bool) {
        for (u, list) in self.items.iter_mut().enumerate() {
            list.retain(|&o| keep(u, o));
        }
    }

    pub fn num_links(&self) -> usize {
        self.items.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub auc: f64,
    pub map: f64,
    pub precision: f64,
    pub recall: f64,
    pub hamming: f64,
    pub intra_similarity: f64,
    pub popularity: f64,
    pub length: usize,
    pub users_evaluated: usize,
    /// Users whose list came out shorter than `length`.
    pub short_lists: usize,
}

impl MetricsRow {
    pub fn values(&self) -> [f64; 7] {
        [
            self.auc,
            self.map,
            self.precision,
            self.recall,
            self.hamming,
            self.intra_similarity,
            self.popularity,
        ]
    }

    pub const NAMES: [&'static str; 7] = ["auc", "map", "precision", "recall", "hamming", "intra", "popularity"];

    /// Component-wise arithmetic mean; counts are averaged and rounded.
    pub fn mean(rows: &[MetricsRow]) -> Option<MetricsRow> {
        let first = rows.first()?;
        let n = rows.len() as f64;
        let avg = |f: fn(&MetricsRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        let avg_count = |f: fn(&MetricsRow) -> usize| {
            (rows.iter().map(|r| f(r) as f64).sum::<f64>() / n).round() as usize
        };
        Some(MetricsRow {
            auc: avg(|r| r.auc),
            map: avg(|r| r.map),
            precision: avg(|r| r.precision),
            recall: avg(|r| r.recall),
            hamming: avg(|r| r.hamming),
            intra_similarity: avg(|r| r.intra_similarity),
            popularity: avg(|r| r.popularity),
            length: first.length,
            users_evaluated: avg_count(|r| r.users_evaluated),
            short_lists: avg_count(|r| r.short_lists),
        })
    }

    /// Sample standard deviation of each metric (zero for a single row).
    pub fn std_dev(rows: &[MetricsRow]) -> Option<MetricsRow> {
        let mean = MetricsRow::mean(rows)?;
        let n = rows.len();
        let sd = |f: fn(&MetricsRow) -> f64| {
            if n < 2 {
                return 0.0;
            }
            let m = f(&mean);
            (rows.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Some(MetricsRow {
            auc: sd(|r| r.auc),
            map: sd(|r| r.map),
            precision: sd(|r| r.precision),
            recall: sd(|r| r.recall),
            hamming: sd(|r| r.hamming),
            intra_similarity: sd(|r| r.intra_similarity),
            popularity: sd(|r| r.popularity),
            ..mean
        })
    }
}

fn contains(sorted: &[usize], x: usize) -> bool {
    sorted.binary_search(&x).is_ok()
}

/// Exact AUC over every (positive, negative) pair drawn from `candidates`:
/// positives are the candidates in `test_items`, the rest are negatives.
/// A win counts 1 and a tie 1/2. `None` when either side is empty.
pub fn auc(scores: &ScoreVector, test_items: &[usize], candidates: &[usize]) -> Option<f64> {
    let mut ranked: Vec<(f64, bool)> = candidates
        .iter()
        .map(|&o| (scores.scores[o], contains(test_items, o)))
        .collect();
    ranked.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let positives = ranked.iter().filter(|r| r.1).count() as u64;
    let negatives = ranked.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }

    // twice the statistic: 2 per win, 1 per tie
    let mut doubled: u64 = 0;
    let mut negatives_below: u64 = 0;
    let mut start = 0;
    while start < ranked.len() {
        let mut end = start;
        while end < ranked.len() && ranked[end].0 == ranked[start].0 {
            end += 1;
        }
        let group_pos = ranked[start..end].iter().filter(|r| r.1).count() as u64;
        let group_neg = (end - start) as u64 - group_pos;
        doubled += group_pos * (2 * negatives_below + group_neg);
        negatives_below += group_neg;
        start = end;
    }
    Some(doubled as f64 / (2.0 * positives as f64 * negatives as f64))
}

/// Mean of per-user AUC values weighted by each user's positive count.
///
/// This is the limit of drawing (held-out link, negative object) pairs
/// uniformly over all held-out links, so users contribute in proportion to
/// their test links.
pub fn auc_over_links(per_user: &[(f64, usize)]) -> Option<f64> {
    let weight: usize = per_user.iter().map(|&(_, w)| w).sum();
    (weight > 0).then(|| per_user.iter().map(|&(a, w)| a * w as f64).sum::<f64>() / weight as f64)
}

fn hits(list: &RecommendationList, test_items: &[usize]) -> usize {
    list.items.iter().filter(|&&o| contains(test_items, o)).count()
}

/// `(1/D) Σ_s s / r_s` over the hits of the list in rank order.
pub fn average_precision(list: &RecommendationList, test_items: &[usize], d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let mut found = 0usize;
    let mut sum = 0.0;
    for (pos, &o) in list.items.iter().enumerate() {
        if contains(test_items, o) {
            found += 1;
            sum += found as f64 / (pos + 1) as f64;
        }
    }
    sum / d as f64
}

pub fn map(per_user_ap: &[f64]) -> Option<f64> {
    mean(per_user_ap)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Hits divided by the requested length.
pub fn precision(list: &RecommendationList, test_items: &[usize]) -> f64 {
    if list.length == 0 {
        return 0.0;
    }
    hits(list, test_items) as f64 / list.length as f64
}

/// Hits divided by the number of held-out objects (0 when there are none).
pub fn recall(list: &RecommendationList, test_items: &[usize]) -> f64 {
    if test_items.is_empty() {
        return 0.0;
    }
    hits(list, test_items) as f64 / test_items.len() as f64
}

fn overlap(a: &[usize], b: &[usize]) -> u64 {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common
}

/// Mean of `1 - |o_i ∩ o_j| / L` over user pairs.
///
/// Lists must not repeat items. All pairs are used when the ordered pair count fits in `pair_budget` (or
/// no budget is given). Otherwise `pair_budget` distinct unordered pairs are
/// drawn uniformly with a generator seeded by `seed`. The overlap is
/// symmetric, so unordered pairs give the same mean as ordered ones.
/// Returns 0 for fewer than two lists.
pub fn hamming(lists: &[RecommendationList], length: usize, pair_budget: Option<usize>, seed: u64) -> f64 {
    let m = lists.len();
    if m < 2 || length == 0 {
        return 0.0;
    }
    let sorted: Vec<Vec<usize>> = lists
        .iter()
        .map(|l| {
            let mut items = l.items.clone();
            items.sort_unstable();
            items
        })
        .collect();
    let ordered_pairs = m as u128 * (m as u128 - 1);

    let (common, pairs) = match pair_budget {
        Some(budget) if (budget as u128) < ordered_pairs && budget > 0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut drawn: HashSet<(usize, usize)> = HashSet::with_capacity(budget);
            let mut common = 0u64;
            while drawn.len() < budget {
                let i = rng.random_range(0..m);
                let j = rng.random_range(0..m);
                if i == j {
                    continue;
                }
                let key = (i.min(j), i.max(j));
                if drawn.insert(key) {
                    common += overlap(&sorted[key.0], &sorted[key.1]);
                }
            }
            (common, budget as u64)
        }
        _ => {
            // Σ_{i<j} |o_i ∩ o_j| = Σ_α c_α (c_α - 1) / 2, with c_α the number
            // of lists holding α.
            let width = sorted.iter().filter_map(|l| l.last()).max().map_or(0, |&o| o + 1);
            let mut holders = vec![0u64; width];
            for l in &sorted {
                for &o in l {
                    holders[o] += 1;
                }
            }
            let common = holders.iter().map(|&c| c * c.saturating_sub(1) / 2).sum();
            (common, (m as u64) * (m as u64 - 1) / 2)
        }
    };
    1.0 - common as f64 / (length as f64 * pairs as f64)
}

/// Mean pairwise cosine similarity inside each list, averaged over lists with
/// at least two items.
pub fn intra_similarity(lists: &[RecommendationList], cos: &SimilarityMatrix) -> Option<f64> {
    let per_user: Vec<f64> = lists
        .iter()
        .filter(|l| l.items.len() >= 2)
        .map(|l| {
            let k = l.items.len();
            let mut sum = 0.0;
            for (a, &alpha) in l.items.iter().enumerate() {
                for (b, &beta) in l.items.iter().enumerate() {
                    if a != b {
                        sum += cos.get(alpha, beta);
                    }
                }
            }
            sum / (k * (k - 1)) as f64
        })
        .collect();
    mean(&per_user)
}

/// Mean training degree of recommended objects, per list then over lists.
pub fn popularity(lists: &[RecommendationList], object_degree: &[usize]) -> Option<f64> {
    let per_user: Vec<f64> = lists
        .iter()
        .filter(|l| !l.items.is_empty())
        .map(|l| l.items.iter().map(|&o| object_degree[o] as f64).sum::<f64>() / l.items.len() as f64)
        .collect();
    mean(&per_user)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(items: &[usize], length: usize) -> RecommendationList {
        RecommendationList {
            user: 0,
            items: items.to_vec(),
            length,
        }
    }

    fn sv(scores: &[f64]) -> ScoreVector {
        ScoreVector {
            user: 0,
            scores: scores.to_vec(),
        }
    }

    #[test]
    fn auc_examples() {
        let all = [0, 1, 2, 3];
        assert_eq!(auc(&sv(&[0.9, 0.8, 0.1, 0.2]), &[0, 1], &all), Some(1.0));
        assert_eq!(auc(&sv(&[0.3; 4]), &[2], &all), Some(0.5));
        assert_eq!(auc(&sv(&[0.9, 0.9, 0.1]), &[0], &[0, 1, 2]), Some(0.75));
        assert_eq!(auc(&sv(&[0.1, 0.2]), &[], &[0, 1]), None);
        assert_eq!(auc(&sv(&[0.1, 0.2]), &[0, 1], &[0, 1]), None);
        // a test item outside the candidate set is not a positive
        assert_eq!(auc(&sv(&[0.1, 0.2, 0.3]), &[2], &[0, 1]), None);
    }

    #[test]
    fn auc_link_weighting() {
        assert_eq!(auc_over_links(&[(1.0, 3), (0.5, 1)]), Some(0.875));
        assert_eq!(auc_over_links(&[(0.7, 2)]), Some(0.7));
        assert_eq!(auc_over_links(&[]), None);
    }

    #[test]
    fn average_precision_examples() {
        assert_eq!(average_precision(&list(&[7], 1), &[7], 1), 1.0);
        let ap = average_precision(&list(&[4, 9, 5], 3), &[4, 5], 2);
        assert!((ap - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-15);
        assert_eq!(average_precision(&list(&[1, 2], 2), &[3], 1), 0.0);
    }

    #[test]
    fn map_examples() {
        assert_eq!(map(&[1.0, 0.0]), Some(0.5));
        assert_eq!(map(&[0.8333]), Some(0.8333));
        assert_eq!(map(&[]), None);
    }

    #[test]
    fn precision_recall_examples() {
        let items: Vec<usize> = (0..50).collect();
        let l = list(&items, 50);
        assert!((precision(&l, &[1, 2, 3, 4, 100]) - 0.08).abs() < 1e-15);
        assert_eq!(precision(&l, &[200]), 0.0);
        assert_eq!(recall(&l, &[3, 9, 12]), 1.0);
        assert_eq!(recall(&l, &[300]), 0.0);
        // requested length, not actual length
        assert_eq!(precision(&list(&[1], 4), &[1]), 0.25);
    }

    #[test]
    fn hamming_examples() {
        let same = vec![list(&[1, 2, 3], 3); 4];
        assert_eq!(hamming(&same, 3, None, 0), 0.0);
        let disjoint = vec![list(&[1, 2], 2), list(&[3, 4], 2), list(&[5, 6], 2)];
        assert_eq!(hamming(&disjoint, 2, None, 0), 1.0);
        let two = vec![list(&[1, 2], 2), list(&[2, 3], 2)];
        assert_eq!(hamming(&two, 2, None, 0), 0.5);
        assert_eq!(hamming(&two[..1], 2, None, 0), 0.0);
    }

    #[test]
    fn hamming_budget_at_or_above_total_is_exact() {
        let lists: Vec<_> = (0..12).map(|u| list(&[u % 5, (u * 3) % 7 + 5, 20], 3)).collect();
        let exact = hamming(&lists, 3, None, 9);
        assert_eq!(exact.to_bits(), hamming(&lists, 3, Some(12 * 11), 9).to_bits());
        assert_eq!(exact.to_bits(), hamming(&lists, 3, Some(usize::MAX), 1).to_bits());
    }

    #[test]
    fn hamming_sampling_is_seeded() {
        let lists: Vec<_> = (0..200).map(|u| list(&[u % 13, u % 17 + 13, u % 5 + 30], 3)).collect();
        let a = hamming(&lists, 3, Some(5000), 42);
        assert_eq!(a, hamming(&lists, 3, Some(5000), 42));
        let exact = hamming(&lists, 3, None, 0);
        assert!((a - exact).abs() < 0.02, "{a} vs {exact}");
    }

    #[test]
    fn intra_examples() {
        use crate::graph::BipartiteGraph;
        use crate::similarity::cosine_object_similarity;
        // o0,o1 share u0: cos = 1/sqrt(1*2); o2 alone with u1
        let g = BipartiteGraph::from_links(3, 4, [(0, 0), (0, 1), (2, 1), (1, 2), (1, 3)]).unwrap();
        let cos = cosine_object_similarity(&g);
        let v = intra_similarity(&[list(&[0, 1], 2)], &cos).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(intra_similarity(&[list(&[0, 2], 2)], &cos), Some(0.0));
        assert_eq!(intra_similarity(&[list(&[2, 3], 2)], &cos), Some(1.0));
        // length-1 lists are skipped
        assert_eq!(intra_similarity(&[list(&[2, 3], 2), list(&[0], 2)], &cos), Some(1.0));
        assert_eq!(intra_similarity(&[list(&[0], 2)], &cos), None);
    }

    #[test]
    fn popularity_examples() {
        let deg = [3, 5, 7, 7];
        assert_eq!(popularity(&[list(&[2, 3], 2), list(&[3], 2)], &deg), Some(7.0));
        assert_eq!(popularity(&[list(&[0, 1], 2)], &deg), Some(4.0));
        assert_eq!(popularity(&[list(&[], 2)], &deg), None);
    }

    #[test]
    fn test_set_construction() {
        let mut t = TestSet::from_links(3, [(0, 5), (0, 2), (2, 1), (0, 2)]);
        assert_eq!(t.items(0), &[2, 5]);
        assert_eq!(t.num_links(), 3);
        t.retain(|_, o| o != 5);
        assert_eq!(t.items(0), &[2]);
    }

    #[test]
    fn row_mean_and_std() {
        let row = |x: f64| MetricsRow {
            auc: x,
            map: x,
            precision: x,
            recall: x,
            hamming: x,
            intra_similarity: x,
            popularity: 10.0 * x,
            length: 50,
            users_evaluated: 10,
            short_lists: 0,
        };
        let m = MetricsRow::mean(&[row(0.2), row(0.4)]).unwrap();
        assert!((m.auc - 0.3).abs() < 1e-15);
        assert!((m.popularity - 3.0).abs() < 1e-15);
        let s = MetricsRow::std_dev(&[row(0.2), row(0.4)]).unwrap();
        assert!((s.auc - 0.02f64.sqrt()).abs() < 1e-15);
        assert_eq!(MetricsRow::std_dev(&[row(0.5)]).unwrap().auc, 0.0);
        assert!(MetricsRow::mean(&[]).is_none());
    }
}
