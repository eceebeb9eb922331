//! Simple undirected graphs, finite metrics and multigraphs.
//!
//! Vertices are always `0..n`. Distances between different connected
//! components are `f64::INFINITY`; the sentinel is propagated by every
//! consumer and never read as zero.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, resource, Error, Result};
use crate::rng;

/// Largest `n` accepted by [`enumerate_regular_graphs`].
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// A simple undirected graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    degree: Option<usize>,
}

impl Graph {
    /// Builds a graph from an edge list in any order.
    ///
    /// Self-loops, duplicate edges and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return param(format!("edge ({u}, {v}) out of range for n = {n}"));
            }
            if u == v {
                return param(format!("self-loop at {u} in a simple graph"));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return param(format!("duplicate edge at vertex {v}"));
            }
        }
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let n = adjacency.len();
        let degree = match adjacency.first() {
            Some(first) if adjacency.iter().all(|a| a.len() == first.len()) => Some(first.len()),
            None => Some(0),
            _ => None,
        };
        Graph { n, adjacency, degree }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// The common degree if the graph is regular.
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Degree `d`, or a parameter error if the graph is not regular.
    pub fn require_regular(&self) -> Result<usize> {
        self.degree.ok_or_else(|| Error::Parameter("graph is not regular".into()))
    }

    /// Neighborhood bitmasks; only for `n <= 64`.
    pub(crate) fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        Some(self.adjacency.iter().map(|list| list.iter().fold(0u64, |m, &v| m | (1u64 << v))).collect())
    }

    /// Component index per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().1 == 1
    }

    /// BFS distances from a set of sources; `u32::MAX` marks unreachable.
    pub fn bfs_levels(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &w in &self.adjacency[u] {
                if dist[w] == u32::MAX {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn complete(k: usize) -> Self {
        let adjacency = (0..k).map(|v| (0..k).filter(|&u| u != v).collect()).collect();
        Self::from_sorted_adjacency(adjacency)
    }

    pub fn cycle(k: usize) -> Self {
        let edges: Vec<_> = (0..k).map(|v| (v, (v + 1) % k)).collect();
        Self::from_edges(k, &edges).expect("cycle needs k >= 3")
    }

    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|v| (v - 1, v)).collect();
        Self::from_edges(k, &edges).expect("valid path")
    }

    /// Outer cycle `0..5`, spokes `i -> i+5`, inner pentagram.
    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).expect("valid Petersen graph")
    }

    /// The `dim`-dimensional hypercube on `2^dim` vertices.
    pub fn hypercube(dim: usize) -> Self {
        let n = 1usize << dim;
        let adjacency = (0..n)
            .map(|v| {
                let mut list: Vec<_> = (0..dim).map(|b| v ^ (1 << b)).collect();
                list.sort_unstable();
                list
            })
            .collect();
        Self::from_sorted_adjacency(adjacency)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges: Vec<_> = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Self::from_edges(a + b, &edges).expect("valid complete bipartite graph")
    }

    /// Vertex-disjoint union; `other` is shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let shift = self.n;
        let mut edges = self.edges();
        edges.extend(other.edges().into_iter().map(|(u, v)| (u + shift, v + shift)));
        Self::from_edges(self.n + other.n, &edges).expect("union of simple graphs is simple")
    }
}

/// Canonical JSON form `{"n": .., "edges": [[u, v], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        GraphFile { n: g.n, edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect() }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(file.n, &edges)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GraphFile::deserialize(d)?;
        Graph::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// A multigraph on `0..k`; loops and repeated pairs allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(k: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= k || v >= k {
                return param(format!("multigraph edge ({u}, {v}) out of range for k = {k}"));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        Ok(Multigraph { k, edges: normalized })
    }

    pub fn complete(k: usize) -> Self {
        let edges = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        Multigraph { k, edges }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Edges in insertion order, each normalized to `u <= v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Number of copies of the pair `{u, v}`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let key = (u.min(v), u.max(v));
        self.edges.iter().filter(|&&e| e == key).count()
    }
}

impl Serialize for Multigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut edges: Vec<[usize; 2]> = self.edges.iter().map(|&(u, v)| [u, v]).collect();
        edges.sort_unstable();
        GraphFile { n: self.k, edges }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Multigraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GraphFile::deserialize(d)?;
        Multigraph::new(file.n, file.edges.iter().map(|e| (e[0], e[1])).collect()).map_err(serde::de::Error::custom)
    }
}

/// Square matrix of pairwise distances, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    k: usize,
    dist: Vec<f64>,
}

impl MetricMatrix {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (over finite triples, with relative slack `1e-9`).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let mut dist = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return param("metric matrix is not square");
            }
            dist.extend_from_slice(row);
        }
        let m = MetricMatrix { k, dist };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let k = self.k;
        for i in 0..k {
            if self.get(i, i) != 0.0 {
                return param(format!("metric has nonzero diagonal at {i}"));
            }
            for j in 0..k {
                let d = self.get(i, j);
                if d.is_nan() || d < 0.0 {
                    return param(format!("metric entry ({i}, {j}) is not a nonnegative value"));
                }
                if d != self.get(j, i) {
                    return param(format!("metric is not symmetric at ({i}, {j})"));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let direct = self.get(i, j);
                    let via = self.get(i, l) + self.get(l, j);
                    if via.is_finite() && direct > via * (1.0 + 1e-9) + 1e-12 {
                        return param(format!("triangle inequality fails for ({i}, {l}, {j})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The discrete metric on `k` points (all off-diagonal distances 1).
    pub fn uniform(k: usize) -> Self {
        let dist = (0..k * k).map(|idx| if idx / k == idx % k { 0.0 } else { 1.0 }).collect();
        MetricMatrix { k, dist }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.dist.iter().all(|d| d.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        MetricMatrix { k: self.k, dist: self.dist.iter().map(|d| d * c).collect() }
    }

    /// Restriction to `points`, in the given order.
    pub fn restrict(&self, points: &[usize]) -> Self {
        let k = points.len();
        let mut dist = Vec::with_capacity(k * k);
        for &i in points {
            dist.extend(points.iter().map(|&j| self.get(i, j)));
        }
        MetricMatrix { k, dist }
    }

    /// Largest entry (infinite if any entry is).
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Entry-wise `p`-th power table, exact at zero.
    pub fn powered(&self, p: f64) -> Vec<f64> {
        self.dist.iter().map(|&d| pow(d, p)).collect()
    }
}

/// `x^p` for `x >= 0` with `0^p = 0` for every `p >= 1`.
#[inline]
pub fn pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}

#[derive(Serialize, Deserialize)]
struct MetricFile {
    k: usize,
    dist: Vec<Vec<Option<f64>>>,
}

impl Serialize for MetricMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dist = (0..self.k).map(|i| self.row(i).iter().map(|&d| d.is_finite().then_some(d)).collect()).collect();
        MetricFile { k: self.k, dist }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MetricFile::deserialize(d)?;
        if file.dist.len() != file.k {
            return Err(serde::de::Error::custom("metric row count differs from k"));
        }
        let rows =
            file.dist.into_iter().map(|row| row.into_iter().map(|d| d.unwrap_or(f64::INFINITY)).collect()).collect();
        MetricMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Uniform random simple `d`-regular graph on `0..n`.
///
/// Configuration model: a uniform perfect matching of the `n·d` half-edges,
/// restarted from scratch whenever it produces a loop or a repeated pair.
/// Every simple graph arises from exactly `(d!)^n` matchings, so accepted
/// outputs are uniform over the labeled graphs.
pub fn sample_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d == 0 || n == 0 {
        return param("n and d must be positive");
    }
    if n * d % 2 == 1 {
        return param(format!("n·d = {} is odd", n * d));
    }
    if n <= d {
        return param(format!("need n > d, got n = {n}, d = {d}"));
    }
    let mut rng = rng::seeded(seed);
    let mut points: Vec<usize> = (0..n * d).map(|h| h / d).collect();
    'attempt: loop {
        points.shuffle(&mut rng);
        let mut adjacency = vec![Vec::with_capacity(d); n];
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adjacency[u].contains(&v) {
                continue 'attempt;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        return Ok(Graph::from_sorted_adjacency(adjacency));
    }
}

/// Every labeled simple `d`-regular graph on `0..n`, each exactly once.
pub fn enumerate_regular_graphs(n: usize, d: usize) -> Result<Vec<Graph>> {
    enumerate_regular_graphs_capped(n, d, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_regular_graphs_capped(n: usize, d: usize, cap: usize) -> Result<Vec<Graph>> {
    if n > cap {
        return resource("labeled regular graph enumeration (n)", n as f64, cap as f64);
    }
    let mut out = Vec::new();
    if n * d % 2 == 1 || d >= n.max(1) {
        return Ok(out);
    }
    let mut deficit = vec![d; n];
    let mut adjacency = vec![Vec::new(); n];
    extend_regular(&mut deficit, &mut adjacency, &mut out);
    Ok(out)
}

// The smallest vertex with remaining degree picks all of its missing
// neighbors among larger vertices, so each graph is produced once.
fn extend_regular(deficit: &mut [usize], adjacency: &mut [Vec<usize>], out: &mut Vec<Graph>) {
    let Some(v) = deficit.iter().position(|&x| x > 0) else {
        let adjacency = adjacency
            .iter()
            .map(|l| {
                let mut l = l.clone();
                l.sort_unstable();
                l
            })
            .collect();
        out.push(Graph::from_sorted_adjacency(adjacency));
        return;
    };
    let candidates: Vec<usize> = (v + 1..deficit.len()).filter(|&w| deficit[w] > 0).collect();
    let need = deficit[v];
    if candidates.len() < need {
        return;
    }
    let mut chosen = Vec::with_capacity(need);
    choose(&candidates, 0, need, &mut chosen, &mut |picked| {
        deficit[v] = 0;
        for &w in picked {
            deficit[w] -= 1;
            adjacency[v].push(w);
            adjacency[w].push(v);
        }
        extend_regular(deficit, adjacency, out);
        for &w in picked {
            deficit[w] += 1;
            adjacency[v].pop();
            adjacency[w].pop();
        }
        deficit[v] = need;
    });
}

fn choose(pool: &[usize], start: usize, need: usize, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if chosen.len() == need {
        visit(chosen);
        return;
    }
    let remaining = need - chosen.len();
    for i in start..=pool.len().saturating_sub(remaining) {
        chosen.push(pool[i]);
        choose(pool, i + 1, need, chosen, visit);
        chosen.pop();
    }
}

/// Exact shortest-path metric by one BFS per source.
pub fn all_pairs_distances(g: &Graph) -> MetricMatrix {
    let n = g.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| g.bfs_levels(&[s]).into_iter().map(|l| if l == u32::MAX { f64::INFINITY } else { l as f64 }).collect())
        .collect();
    MetricMatrix { k: n, dist: rows.concat() }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    pub connected: bool,
    /// Infinite when disconnected.
    pub diameter: f64,
    /// Mean over all `n²` ordered pairs, diagonal included.
    pub average_distance: f64,
}

pub fn metric_summary(g: &Graph) -> MetricSummary {
    let dist = all_pairs_distances(g);
    let connected = dist.is_finite();
    let diameter = dist.diameter();
    let n = g.n();
    let average_distance = if n == 0 { 0.0 } else { dist.dist.iter().sum::<f64>() / (n * n) as f64 };
    MetricSummary { connected, diameter, average_distance }
}

fn normalized_set(n: usize, set: &[usize]) -> Result<Vec<usize>> {
    if set.is_empty() {
        return param("vertex set must be nonempty");
    }
    if let Some(&v) = set.iter().find(|&&v| v >= n) {
        return param(format!("vertex {v} out of range for n = {n}"));
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// Induced subgraph on `set`; vertex `i` of the result is `relabel[i]` of `g`.
pub fn induced_subgraph(g: &Graph, set: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let relabel = normalized_set(g.n(), set)?;
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in relabel.iter().enumerate() {
        index[v] = i;
    }
    let adjacency = relabel
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| index[w] != usize::MAX).map(|&w| index[w]).collect())
        .collect();
    Ok((Graph::from_sorted_adjacency(adjacency), relabel))
}

/// `{v : dist(v, set) <= radius}`, sorted.
pub fn ball(g: &Graph, set: &[usize], radius: usize) -> Result<Vec<usize>> {
    let set = normalized_set(g.n(), set)?;
    let levels = g.bfs_levels(&set);
    Ok((0..g.n()).filter(|&v| levels[v] != u32::MAX && levels[v] as usize <= radius).collect())
}
