//! Vertex-colored undirected multigraphs.
//!
//! Vertices are dense ids `0..n`. Adjacency is stored in compressed rows
//! sorted by neighbor id, each entry carrying an edge multiplicity in
//! `1..=255`. Colors are dense ids `0..c`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// A sorted set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Sorts the ids; repeated ids are rejected.
    pub fn new(mut ids: Vec<usize>) -> Result<Self> {
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("repeated vertex in set".into()));
        }
        Ok(VertexSet(ids))
    }

    pub(crate) fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= n => Err(Error::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

/// Undirected vertex-colored multigraph without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    mults: Vec<u8>,
    colors: Vec<u32>,
    num_colors: usize,
    num_edges: usize,
}

/// Collects edges and colors, validating everything in [`GraphBuilder::build`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    colors: Vec<u32>,
    edges: Vec<(usize, usize, u32)>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            n,
            colors: vec![0; n],
            edges: Vec::new(),
        }
    }

    pub fn color(&mut self, v: usize, color: u32) -> &mut Self {
        if v < self.n {
            self.colors[v] = color;
        } else {
            // reported by build()
            self.edges.push((v, v, 0));
        }
        self
    }

    pub fn colors(&mut self, colors: &[u32]) -> &mut Self {
        assert_eq!(colors.len(), self.n, "one color per vertex");
        self.colors.copy_from_slice(colors);
        self
    }

    pub fn edge(&mut self, u: usize, v: usize) -> &mut Self {
        self.edges.push((u, v, 1));
        self
    }

    pub fn edge_mult(&mut self, u: usize, v: usize, mult: u32) -> &mut Self {
        self.edges.push((u, v, mult));
        self
    }

    /// Builds the graph. Colors must already be contiguous.
    pub fn build(&self) -> Result<ColoredGraph> {
        let num_colors = contiguous_color_count(&self.colors)?;
        self.finish(self.colors.clone(), num_colors)
    }

    /// Builds the graph after renumbering colors densely, preserving their order.
    pub fn build_compacting_colors(&self) -> Result<ColoredGraph> {
        let (colors, num_colors) = compact_colors(&self.colors);
        self.finish(colors, num_colors)
    }

    fn finish(&self, colors: Vec<u32>, num_colors: usize) -> Result<ColoredGraph> {
        let n = self.n;
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(u, v, m) in &self.edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(1..=255).contains(&m) {
                return Err(Error::BadMultiplicity(m));
            }
            edges.push((u.min(v), u.max(v), m as u8));
        }
        edges.sort_unstable();
        if let Some(w) = edges
            .windows(2)
            .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
        {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(ColoredGraph::from_sorted_edges(
            n, &edges, colors, num_colors,
        ))
    }
}

fn contiguous_color_count(colors: &[u32]) -> Result<usize> {
    if colors.is_empty() {
        return Ok(0);
    }
    let max = *colors.iter().max().unwrap() as usize;
    let mut seen = vec![false; max + 1];
    for &c in colors {
        seen[c as usize] = true;
    }
    if seen.iter().all(|&s| s) {
        Ok(max + 1)
    } else {
        Err(Error::NonContiguousColors)
    }
}

/// Order-preserving dense renumbering of arbitrary color values.
pub(crate) fn compact_colors<T: Ord + Copy>(colors: &[T]) -> (Vec<u32>, usize) {
    let mut values: Vec<T> = colors.to_vec();
    values.sort_unstable();
    values.dedup();
    let dense = colors
        .iter()
        .map(|c| values.binary_search(c).unwrap() as u32)
        .collect();
    (dense, values.len())
}

impl ColoredGraph {
    /// `edges` must be sorted, deduplicated, with `u < v` and valid multiplicities.
    fn from_sorted_edges(
        n: usize,
        edges: &[(usize, usize, u8)],
        colors: Vec<u32>,
        num_colors: usize,
    ) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(u, v, _) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        let mut mults = vec![0u8; offsets[n]];
        // Sorted (u, v) with u < v: pushing v into u's row in order, and u
        // into v's row in order, leaves every row sorted.
        for &(u, v, m) in edges {
            targets[fill[v]] = u;
            mults[fill[v]] = m;
            fill[v] += 1;
        }
        for &(u, v, m) in edges {
            targets[fill[u]] = v;
            mults[fill[u]] = m;
            fill[u] += 1;
        }
        ColoredGraph {
            offsets,
            targets,
            mults,
            colors,
            num_colors,
            num_edges: edges.len(),
        }
    }

    /// Uncolored simple graph from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.edge(u, v);
        }
        b.build()
    }

    pub fn empty(n: usize) -> Self {
        ColoredGraph::from_sorted_edges(n, &[], vec![0; n], usize::from(n > 0))
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    /// Number of distinct vertex pairs joined by an edge.
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn is_uncolored(&self) -> bool {
        self.num_colors <= 1
    }

    /// Offsets, neighbor lists and multiplicities in compressed sparse row
    /// form.
    pub(crate) fn raw_adjacency(&self) -> (&[usize], &[usize], &[u8]) {
        (&self.offsets, &self.targets, &self.mults)
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Multiplicities aligned with [`ColoredGraph::neighbors`].
    pub fn multiplicities(&self, v: usize) -> &[u8] {
        &self.mults[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn adjacency(&self, v: usize) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.neighbors(v)
            .iter()
            .copied()
            .zip(self.multiplicities(v).iter().copied())
    }

    /// Multiplicity-weighted degree.
    pub fn degree(&self, v: usize) -> usize {
        self.multiplicities(v).iter().map(|&m| m as usize).sum()
    }

    /// Multiplicity of `{u, v}`, 0 when absent.
    pub fn multiplicity(&self, u: usize, v: usize) -> u8 {
        match self.neighbors(u).binary_search(&v) {
            Ok(i) => self.multiplicities(u)[i],
            Err(_) => 0,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.multiplicity(u, v) > 0
    }

    pub fn is_simple(&self) -> bool {
        self.mults.iter().all(|&m| m == 1)
    }

    /// Edges `(u, v, mult)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.adjacency(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, m)| (u, v, m))
        })
    }

    fn edge_list(&self) -> Vec<(usize, usize, u8)> {
        self.edges().collect()
    }

    /// Same edges, new colors (renumbered densely in value order).
    pub fn with_colors<T: Ord + Copy>(&self, colors: &[T]) -> Self {
        assert_eq!(colors.len(), self.n(), "one color per vertex");
        let (colors, num_colors) = compact_colors(colors);
        ColoredGraph {
            colors,
            num_colors,
            ..self.clone()
        }
    }

    pub fn uncolored(&self) -> Self {
        self.with_colors(&vec![0u32; self.n()])
    }

    /// Vertex-disjoint union; vertices of `other` are shifted by `self.n()`.
    /// Both graphs share one color space.
    pub fn disjoint_union(&self, other: &ColoredGraph) -> Self {
        let shift = self.n();
        let mut edges = self.edge_list();
        edges.extend(other.edges().map(|(u, v, m)| (u + shift, v + shift, m)));
        let mut colors = self.colors.clone();
        colors.extend_from_slice(&other.colors);
        let num_colors = self.num_colors.max(other.num_colors);
        ColoredGraph::from_sorted_edges(shift + other.n(), &edges, colors, num_colors)
    }

    /// The complement of a simple graph; colors are kept.
    pub fn complement(&self) -> Result<Self> {
        if !self.is_simple() {
            return Err(Error::NotSimple);
        }
        let n = self.n();
        let mut edges = Vec::new();
        for u in 0..n {
            let nb = self.neighbors(u);
            let mut k = nb.partition_point(|&w| w <= u);
            for v in u + 1..n {
                if k < nb.len() && nb[k] == v {
                    k += 1;
                } else {
                    edges.push((u, v, 1));
                }
            }
        }
        Ok(ColoredGraph::from_sorted_edges(
            n,
            &edges,
            self.colors.clone(),
            self.num_colors,
        ))
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n();
        assert_eq!(perm.len(), n, "permutation length");
        let mut edges: Vec<_> = self
            .edges()
            .map(|(u, v, m)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b), m)
            })
            .collect();
        edges.sort_unstable();
        let mut colors = vec![0; n];
        for v in 0..n {
            colors[perm[v]] = self.colors[v];
        }
        ColoredGraph::from_sorted_edges(n, &edges, colors, self.num_colors)
    }

    /// `G[X]`.
    pub fn induced(&self, x: &VertexSet) -> Result<Subgraph> {
        x.check_bounds(self.n())?;
        let index = self.index_of(x.as_slice());
        let mut edges = Vec::new();
        for (i, u) in x.iter().enumerate() {
            for (v, m) in self.adjacency(u) {
                if let Some(&j) = index.get(&v) {
                    if i < j {
                        edges.push((i, j, m));
                    }
                }
            }
        }
        Ok(self.subgraph(x.as_slice().to_vec(), edges))
    }

    /// `G[X, Y]`: the bipartite graph of edges between `X` and `Y`.
    /// Vertices of `X` come first in the result.
    pub fn bipartite_induced(&self, x: &VertexSet, y: &VertexSet) -> Result<Subgraph> {
        let ids = self.disjoint_ids(x, y)?;
        let index = self.index_of(&ids);
        let mut edges = Vec::new();
        for (i, u) in x.iter().enumerate() {
            for (v, m) in self.adjacency(u) {
                if y.contains(v) {
                    edges.push((i, index[&v], m));
                }
            }
        }
        edges.sort_unstable();
        Ok(self.subgraph(ids, edges))
    }

    /// Bipartite complement of `G[X, Y]`.
    pub fn bipartite_complement(&self, x: &VertexSet, y: &VertexSet) -> Result<Subgraph> {
        let ids = self.disjoint_ids(x, y)?;
        let mut edges = Vec::new();
        for (i, u) in x.iter().enumerate() {
            for (j, v) in y.iter().enumerate() {
                match self.multiplicity(u, v) {
                    0 => edges.push((i, x.len() + j, 1)),
                    1 => {}
                    _ => return Err(Error::NotSimple),
                }
            }
        }
        Ok(self.subgraph(ids, edges))
    }

    fn disjoint_ids(&self, x: &VertexSet, y: &VertexSet) -> Result<Vec<usize>> {
        x.check_bounds(self.n())?;
        y.check_bounds(self.n())?;
        if x.iter().any(|v| y.contains(v)) {
            return Err(Error::OverlappingSets);
        }
        Ok(x.iter().chain(y.iter()).collect())
    }

    fn index_of(&self, ids: &[usize]) -> BTreeMap<usize, usize> {
        ids.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    }

    fn subgraph(&self, ids: Vec<usize>, edges: Vec<(usize, usize, u8)>) -> Subgraph {
        let sub_colors: Vec<u32> = ids.iter().map(|&v| self.colors[v]).collect();
        let (colors, num_colors) = compact_colors(&sub_colors);
        Subgraph {
            graph: ColoredGraph::from_sorted_edges(ids.len(), &edges, colors, num_colors),
            ids,
        }
    }

    /// Dense 0/multiplicity adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        let mut a = vec![vec![0u8; n]; n];
        for (u, v, m) in self.edges() {
            a[u][v] = m;
            a[v][u] = m;
        }
        a
    }

    /// Checks that `map` (vertex of `self` to vertex of `other`) is a
    /// color-preserving isomorphism, multiplicities included.
    pub fn is_isomorphism(&self, other: &ColoredGraph, map: &[usize]) -> bool {
        let n = self.n();
        if other.n() != n || map.len() != n || self.num_edges != other.num_edges {
            return false;
        }
        let mut hit = vec![false; n];
        for (v, &w) in map.iter().enumerate() {
            if w >= n || hit[w] || self.colors[v] != other.colors[w] {
                return false;
            }
            hit[w] = true;
        }
        self.edges()
            .all(|(u, v, m)| other.multiplicity(map[u], map[v]) == m)
    }
}

/// An induced subgraph with the original id of each of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: ColoredGraph,
    /// `ids[i]` is the original id of vertex `i`.
    pub ids: Vec<usize>,
}
