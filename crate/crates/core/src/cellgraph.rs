//! The cell graph of an equitable partition.
//!
//! Cells are classified by the regular graph they induce, cell pairs by the
//! biregular bipartite graph between them. Because the partition is
//! equitable, every label follows from cell sizes and the degree counts of
//! one representative per cell; a regular graph on `k` vertices with degree
//! in `{0, 1, k-2, k-1}` (or the 5-cycle) and a biregular graph with a side
//! degree in `{0, 1, k-1, k}` are determined by those numbers.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, VertexSet};
use crate::refinement::{is_equitable, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellKind {
    Empty,
    Complete,
    Matching,
    CoMatching,
    Pentagonal,
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellLabel {
    pub kind: CellKind,
    /// Degree of `G[X]`.
    pub degree: usize,
}

impl CellLabel {
    pub fn is_homogeneous(&self) -> bool {
        matches!(self.kind, CellKind::Empty | CellKind::Complete)
    }

    /// Matching, co-matching or pentagonal.
    pub fn is_heterogeneous(&self) -> bool {
        matches!(
            self.kind,
            CellKind::Matching | CellKind::CoMatching | CellKind::Pentagonal
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairKind {
    IsotropicEmpty,
    IsotropicComplete,
    /// `G[X,Y]` is `s K_{1,t}`; `centers` is the cell holding the `s` centers.
    Constellation {
        centers: usize,
        s: usize,
        t: usize,
    },
    /// The bipartite complement of `G[X,Y]` is `s K_{1,t}`.
    CoConstellation {
        centers: usize,
        s: usize,
        t: usize,
    },
    Irregular,
}

/// Label of the unordered cell pair `{x, y}`, stored with `x < y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairLabel {
    pub kind: PairKind,
    pub x: usize,
    pub y: usize,
    /// Neighbors in `y` of each vertex of `x`.
    pub d_xy: usize,
    /// Neighbors in `x` of each vertex of `y`.
    pub d_yx: usize,
}

impl PairLabel {
    pub fn is_isotropic(&self) -> bool {
        matches!(
            self.kind,
            PairKind::IsotropicEmpty | PairKind::IsotropicComplete
        )
    }

    pub fn is_anisotropic(&self) -> bool {
        !self.is_isotropic()
    }
}

/// Label of a regular graph on `size` vertices with degree `degree`.
pub fn cell_label_from_degree(size: usize, degree: usize) -> CellLabel {
    let kind = if degree == 0 {
        CellKind::Empty
    } else if degree + 1 == size {
        CellKind::Complete
    } else if degree == 1 {
        CellKind::Matching
    } else if degree + 2 == size {
        CellKind::CoMatching
    } else if size == 5 && degree == 2 {
        CellKind::Pentagonal
    } else {
        CellKind::Irregular
    };
    CellLabel { kind, degree }
}

/// Label of a biregular bipartite graph between cells `x < y`.
pub fn pair_label_from_degrees(
    (x, size_x): (usize, usize),
    (y, size_y): (usize, usize),
    d_xy: usize,
    d_yx: usize,
) -> PairLabel {
    let kind = if d_xy == 0 {
        PairKind::IsotropicEmpty
    } else if d_xy == size_y {
        PairKind::IsotropicComplete
    } else if d_yx == 1 {
        PairKind::Constellation {
            centers: x,
            s: size_x,
            t: d_xy,
        }
    } else if d_xy == 1 {
        PairKind::Constellation {
            centers: y,
            s: size_y,
            t: d_yx,
        }
    } else if d_yx + 1 == size_x {
        PairKind::CoConstellation {
            centers: x,
            s: size_x,
            t: size_y - d_xy,
        }
    } else if d_xy + 1 == size_y {
        PairKind::CoConstellation {
            centers: y,
            s: size_y,
            t: size_x - d_yx,
        }
    } else {
        PairKind::Irregular
    };
    PairLabel {
        kind,
        x,
        y,
        d_xy,
        d_yx,
    }
}

fn require_simple(g: &ColoredGraph) -> Result<()> {
    if g.is_simple() {
        Ok(())
    } else {
        Err(Error::NotSimple)
    }
}

/// Classifies `G[X]`; a non-regular `G[X]` is `Irregular`.
pub fn classify_cell(g: &ColoredGraph, x: &VertexSet) -> Result<CellLabel> {
    require_simple(g)?;
    let sub = g.induced(x)?.graph;
    let degrees: Vec<usize> = (0..sub.n()).map(|v| sub.degree(v)).collect();
    let d = degrees.first().copied().unwrap_or(0);
    if degrees.iter().any(|&e| e != d) {
        return Ok(CellLabel {
            kind: CellKind::Irregular,
            degree: d,
        });
    }
    Ok(cell_label_from_degree(x.len(), d))
}

/// Classifies `G[X,Y]`, reporting `X` as cell 0 and `Y` as cell 1.
/// A non-biregular `G[X,Y]` is `Irregular`.
pub fn classify_pair(g: &ColoredGraph, x: &VertexSet, y: &VertexSet) -> Result<PairLabel> {
    require_simple(g)?;
    let sub = g.bipartite_induced(x, y)?.graph;
    let dx: Vec<usize> = (0..x.len()).map(|v| sub.degree(v)).collect();
    let dy: Vec<usize> = (x.len()..sub.n()).map(|v| sub.degree(v)).collect();
    let uniform = |d: &[usize]| d.windows(2).all(|w| w[0] == w[1]);
    let d_xy = dx.first().copied().unwrap_or(0);
    let d_yx = dy.first().copied().unwrap_or(0);
    if !uniform(&dx) || !uniform(&dy) {
        return Ok(PairLabel {
            kind: PairKind::Irregular,
            x: 0,
            y: 1,
            d_xy,
            d_yx,
        });
    }
    Ok(pair_label_from_degrees(
        (0, x.len()),
        (1, y.len()),
        d_xy,
        d_yx,
    ))
}

/// Labeled cell graph. Pairs not stored in `pairs` are `IsotropicEmpty`.
#[derive(Debug, Clone, Serialize)]
pub struct CellGraphData {
    pub partition: Partition,
    pub cell_labels: Vec<CellLabel>,
    /// Labels of all pairs with at least one edge, keyed by `(x, y)`, `x < y`.
    #[serde(serialize_with = "pair_values")]
    pub pairs: BTreeMap<(usize, usize), PairLabel>,
    /// Anisotropic neighbors of each cell, sorted.
    pub anisotropic_adjacency: Vec<Vec<usize>>,
    /// Cell sets of the anisotropic components, ordered by smallest cell.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

fn pair_values<S: serde::Serializer>(
    pairs: &BTreeMap<(usize, usize), PairLabel>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(pairs.values())
}

impl CellGraphData {
    pub fn num_cells(&self) -> usize {
        self.cell_labels.len()
    }

    pub fn size(&self, cell: usize) -> usize {
        self.partition.class(cell).len()
    }

    pub fn pair(&self, a: usize, b: usize) -> PairLabel {
        let (x, y) = (a.min(b), a.max(b));
        self.pairs.get(&(x, y)).copied().unwrap_or(PairLabel {
            kind: PairKind::IsotropicEmpty,
            x,
            y,
            d_xy: 0,
            d_yx: 0,
        })
    }

    pub fn is_anisotropic(&self, a: usize, b: usize) -> bool {
        a != b && self.pair(a, b).is_anisotropic()
    }

    pub fn anisotropic_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs
            .values()
            .filter(|p| p.is_anisotropic())
            .map(|p| (p.x, p.y))
    }
}

/// Builds the labeled cell graph of an equitable partition of a simple graph.
pub fn build(g: &ColoredGraph, p: &Partition) -> Result<CellGraphData> {
    require_simple(g)?;
    if !is_equitable(g, p) {
        return Err(Error::NotEquitable);
    }
    let k = p.num_classes();
    let mut inner = vec![0usize; k];
    let mut cross: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (x, class) in p.classes().iter().enumerate() {
        let rep = class.as_slice()[0];
        for &a in g.neighbors(rep) {
            let y = p.class_of(a);
            if y == x {
                inner[x] += 1;
            } else {
                *cross.entry((x, y)).or_insert(0) += 1;
            }
        }
    }
    let cell_labels: Vec<CellLabel> = (0..k)
        .map(|x| cell_label_from_degree(p.class(x).len(), inner[x]))
        .collect();
    let mut pairs = BTreeMap::new();
    let mut anisotropic_adjacency = vec![Vec::new(); k];
    for (&(x, y), &d_xy) in cross.range(..) {
        if x > y {
            continue;
        }
        let d_yx = cross[&(y, x)];
        let label =
            pair_label_from_degrees((x, p.class(x).len()), (y, p.class(y).len()), d_xy, d_yx);
        if label.is_anisotropic() {
            anisotropic_adjacency[x].push(y);
            anisotropic_adjacency[y].push(x);
        }
        pairs.insert((x, y), label);
    }
    for adj in &mut anisotropic_adjacency {
        adj.sort_unstable();
    }

    let mut component_of = vec![usize::MAX; k];
    let mut components = Vec::new();
    for start in 0..k {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut cells = vec![start];
        component_of[start] = id;
        let mut i = 0;
        while i < cells.len() {
            let c = cells[i];
            for &d in &anisotropic_adjacency[c] {
                if component_of[d] == usize::MAX {
                    component_of[d] = id;
                    cells.push(d);
                }
            }
            i += 1;
        }
        cells.sort_unstable();
        components.push(cells);
    }

    Ok(CellGraphData {
        partition: p.clone(),
        cell_labels,
        pairs,
        anisotropic_adjacency,
        components,
        component_of,
    })
}

/// Structure of one anisotropic component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub cells: Vec<usize>,
    pub num_edges: usize,
    pub is_tree: bool,
    /// An anisotropic edge outside the search tree, when the component has a cycle.
    pub extra_edge: Option<(usize, usize)>,
    pub heterogeneous: Vec<usize>,
    pub min_cardinality: usize,
    pub min_cardinality_cells: Vec<usize>,
    /// The heterogeneous cell if there is exactly one and it has minimum
    /// cardinality, otherwise the lowest-id cell of minimum cardinality.
    pub root: usize,
    /// Breadth-first tree from `root`: `parent[c]` for every non-root cell.
    pub parent: BTreeMap<usize, usize>,
    /// A tree edge `(parent, child)` with `|parent| > |child|`, if any.
    pub monotonicity_violation: Option<(usize, usize)>,
}

impl ComponentReport {
    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation.is_none()
    }

    /// Cells from the root down to `cell` along the search tree.
    pub fn path_from_root(&self, cell: usize) -> Vec<usize> {
        let mut path = vec![cell];
        let mut c = cell;
        while let Some(&p) = self.parent.get(&c) {
            path.push(p);
            c = p;
        }
        path.reverse();
        path
    }

    /// Tree path between two cells of the component.
    pub fn tree_path(&self, a: usize, b: usize) -> Vec<usize> {
        let pa = self.path_from_root(a);
        let pb = self.path_from_root(b);
        let common = pa.iter().zip(&pb).take_while(|(x, y)| x == y).count();
        let mut path: Vec<usize> = pa[common - 1..].iter().rev().copied().collect();
        path.extend_from_slice(&pb[common..]);
        path
    }
}

/// Tree-ness, heterogeneous cells and monotonicity for every anisotropic component.
pub fn anisotropic_components(cg: &CellGraphData) -> Vec<ComponentReport> {
    cg.components
        .iter()
        .map(|cells| {
            let num_edges = cells
                .iter()
                .map(|&c| cg.anisotropic_adjacency[c].len())
                .sum::<usize>()
                / 2;
            let heterogeneous: Vec<usize> = cells
                .iter()
                .copied()
                .filter(|&c| cg.cell_labels[c].is_heterogeneous())
                .collect();
            let min_cardinality = cells.iter().map(|&c| cg.size(c)).min().unwrap();
            let min_cardinality_cells: Vec<usize> = cells
                .iter()
                .copied()
                .filter(|&c| cg.size(c) == min_cardinality)
                .collect();
            let root = match heterogeneous.as_slice() {
                [h] if cg.size(*h) == min_cardinality => *h,
                _ => min_cardinality_cells[0],
            };

            let mut parent = BTreeMap::new();
            let mut seen = BTreeMap::new();
            seen.insert(root, ());
            let mut queue = VecDeque::from([root]);
            let mut extra_edge = None;
            let mut monotonicity_violation = None;
            while let Some(c) = queue.pop_front() {
                for &d in &cg.anisotropic_adjacency[c] {
                    if parent.get(&c) == Some(&d) {
                        continue;
                    }
                    if seen.contains_key(&d) {
                        if extra_edge.is_none() {
                            extra_edge = Some((c.min(d), c.max(d)));
                        }
                        continue;
                    }
                    seen.insert(d, ());
                    parent.insert(d, c);
                    if cg.size(c) > cg.size(d) && monotonicity_violation.is_none() {
                        monotonicity_violation = Some((c, d));
                    }
                    queue.push_back(d);
                }
            }
            ComponentReport {
                cells: cells.clone(),
                num_edges,
                is_tree: num_edges + 1 == cells.len(),
                extra_edge,
                heterogeneous,
                min_cardinality,
                min_cardinality_cells,
                root,
                parent,
                monotonicity_violation,
            }
        })
        .collect()
}
