//! User-object bipartite networks.
//!
//! A [`BipartiteGraph`] stores the unweighted adjacency in two compressed
//! layouts (user-major and object-major) so that both the profile of a user
//! and the audience of an object are contiguous slices. Degrees are the
//! lengths of those slices.

mod format;
mod parse;

use std::collections::HashMap;
use std::sync::Arc;

pub use format::{Column, Delimiter, FormatSpec, RatingScale};
pub use parse::{parse_ratings, parse_ratings_str, RatingRecord};

use crate::error::{Error, Result};

/// Bijection between raw tokens and dense indices.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct IdMap {
    raw: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    fn intern(&mut self, raw: &str) -> usize {
        if let Some(&idx) = self.index.get(raw) {
            return idx;
        }
        let idx = self.raw.len();
        self.raw.push(raw.to_string());
        self.index.insert(raw.to_string(), idx);
        idx
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw(&self, index: usize) -> Option<&str> {
        self.raw.get(index).map(String::as_str)
    }

    pub fn index(&self, raw: &str) -> Option<usize> {
        self.index.get(raw).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub users: usize,
    pub objects: usize,
    pub links: usize,
    pub sparsity: f64,
}

/// CSR adjacency: `targets[offsets[r]..offsets[r + 1]]` are the sorted
/// neighbours of row `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    /// `pairs` must be sorted by (row, col) and free of duplicates.
    fn from_sorted(rows: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Self {
        let mut offsets = vec![0; rows + 1];
        let mut targets = Vec::new();
        for (r, c) in pairs {
            offsets[r + 1] += 1;
            targets.push(c);
        }
        for r in 0..rows {
            offsets[r + 1] += offsets[r];
        }
        Adjacency { offsets, targets }
    }

    fn row(&self, r: usize) -> &[usize] {
        &self.targets[self.offsets[r]..self.offsets[r + 1]]
    }

    fn degree(&self, r: usize) -> usize {
        self.offsets[r + 1] - self.offsets[r]
    }
}

#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    by_user: Adjacency,
    by_object: Adjacency,
    users: Arc<IdMap>,
    objects: Arc<IdMap>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.by_user == other.by_user
            && self.num_users() == other.num_users()
            && self.num_objects() == other.num_objects()
    }
}

impl BipartiteGraph {
    /// Builds a graph over an explicit `users x objects` index space.
    ///
    /// Duplicate links collapse. Nodes without links are kept, which is what
    /// training subgraphs need; use [`build_graph`] for coarse-grained input.
    pub fn from_links(
        num_users: usize,
        num_objects: usize,
        links: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let users = Arc::new(IdMap {
            raw: (0..num_users).map(|i| i.to_string()).collect(),
            index: (0..num_users).map(|i| (i.to_string(), i)).collect(),
        });
        let objects = Arc::new(IdMap {
            raw: (0..num_objects).map(|i| i.to_string()).collect(),
            index: (0..num_objects).map(|i| (i.to_string(), i)).collect(),
        });
        Self::from_parts(users, objects, links)
    }

    fn from_parts(
        users: Arc<IdMap>,
        objects: Arc<IdMap>,
        links: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let (m, n) = (users.len(), objects.len());
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, o) in links {
            if u >= m {
                return Err(Error::IndexOutOfRange {
                    kind: "user",
                    index: u,
                    size: m,
                });
            }
            if o >= n {
                return Err(Error::IndexOutOfRange {
                    kind: "object",
                    index: o,
                    size: n,
                });
            }
            pairs.push((u, o));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let by_user = Adjacency::from_sorted(m, pairs.iter().copied());
        let mut transposed: Vec<(usize, usize)> = pairs.iter().map(|&(u, o)| (o, u)).collect();
        transposed.sort_unstable();
        let by_object = Adjacency::from_sorted(n, transposed.into_iter());
        Ok(BipartiteGraph {
            by_user,
            by_object,
            users,
            objects,
        })
    }

    /// A graph over the same index space (and raw ids) holding only `links`.
    pub fn with_links(&self, links: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_parts(self.users.clone(), self.objects.clone(), links)
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_links(&self) -> usize {
        self.by_user.targets.len()
    }

    /// Objects collected by `user`, ascending.
    pub fn objects_of(&self, user: usize) -> &[usize] {
        self.by_user.row(user)
    }

    /// Users who collected `object`, ascending.
    pub fn users_of(&self, object: usize) -> &[usize] {
        self.by_object.row(object)
    }

    pub fn user_degree(&self, user: usize) -> usize {
        self.by_user.degree(user)
    }

    pub fn object_degree(&self, object: usize) -> usize {
        self.by_object.degree(object)
    }

    pub fn user_degrees(&self) -> Vec<usize> {
        (0..self.num_users()).map(|u| self.user_degree(u)).collect()
    }

    pub fn object_degrees(&self) -> Vec<usize> {
        (0..self.num_objects()).map(|o| self.object_degree(o)).collect()
    }

    pub fn has_link(&self, user: usize, object: usize) -> bool {
        user < self.num_users() && self.objects_of(user).binary_search(&object).is_ok()
    }

    /// All links in user-major order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_users()).flat_map(move |u| self.objects_of(u).iter().map(move |&o| (u, o)))
    }

    pub fn user_ids(&self) -> &IdMap {
        &self.users
    }

    pub fn object_ids(&self) -> &IdMap {
        &self.objects
    }

    pub fn stats(&self) -> GraphStats {
        let (m, n, z) = (self.num_users(), self.num_objects(), self.num_links());
        GraphStats {
            users: m,
            objects: n,
            links: z,
            sparsity: if m == 0 || n == 0 {
                0.0
            } else {
                z as f64 / (m as f64 * n as f64)
            },
        }
    }

    /// The links as unit-rated records keyed by raw ids.
    pub fn to_records(&self) -> Vec<RatingRecord> {
        self.links()
            .map(|(u, o)| {
                RatingRecord::new(
                    self.users.raw(u).unwrap_or_default(),
                    self.objects.raw(o).unwrap_or_default(),
                    1.0,
                )
            })
            .collect()
    }
}

/// Coarse-grains rating records into an unweighted bipartite graph.
///
/// Keeps records with `rating >= threshold`, collapses duplicate
/// (user, object) pairs and numbers the surviving users and objects in order
/// of first appearance. Nodes whose every record is below the threshold never
/// receive an index.
pub fn build_graph(records: &[RatingRecord], threshold: f64) -> Result<BipartiteGraph> {
    let mut users = IdMap::default();
    let mut objects = IdMap::default();
    let mut links = Vec::new();
    for record in records.iter().filter(|r| r.rating >= threshold) {
        let u = users.intern(&record.user);
        let o = objects.intern(&record.object);
        links.push((u, o));
    }
    if links.is_empty() {
        return Err(Error::EmptyGraph { threshold });
    }
    BipartiteGraph::from_parts(Arc::new(users), Arc::new(objects), links)
}

pub fn stats(graph: &BipartiteGraph) -> GraphStats {
    graph.stats()
}
