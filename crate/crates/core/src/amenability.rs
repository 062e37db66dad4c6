//! Amenability: color refinement distinguishes `G` from every
//! non-isomorphic graph.
//!
//! [`is_amenable`] decides it from the cell graph of the stable partition:
//!
//! * A: every cell induces an empty, complete, matching, co-matching or
//!   5-cycle graph;
//! * B: every cell pair induces an empty, complete, constellation or
//!   co-constellation graph;
//! * G: every anisotropic component is a tree whose cell sizes do not
//!   decrease away from a cell of minimum size;
//! * H: every anisotropic component has at most one heterogeneous cell,
//!   and that cell has minimum size.
//!
//! [`check_cdef`] decides the same property from A, B and the path
//! conditions C-F by explicit enumeration. [`amenable_bruteforce`] applies
//! the definition.

use std::collections::HashMap;

use serde::Serialize;

use crate::budget::Budget;
use crate::cellgraph::{self, anisotropic_components, CellGraphData, CellKind, PairKind};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphBuilder};
use crate::oracles;
use crate::refinement::{cr_fingerprint, stable_partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

/// Cells of the stable partition, by class id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    Cell(usize),
    Pair(usize, usize),
    /// Consecutive cells are joined by anisotropic pairs.
    Path(Vec<usize>),
    /// Like a path, and the last cell is also joined to the first.
    Cycle(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmenabilityVerdict {
    pub amenable: bool,
    pub violation: Option<Violation>,
    pub num_cells: usize,
}

impl AmenabilityVerdict {
    fn from_cells(cg: &CellGraphData, violation: Option<Violation>) -> Self {
        AmenabilityVerdict {
            amenable: violation.is_none(),
            violation,
            num_cells: cg.num_cells(),
        }
    }
}

fn violation(condition: Condition, witness: Witness) -> Option<Violation> {
    Some(Violation { condition, witness })
}

fn cell_graph(g: &ColoredGraph) -> Result<CellGraphData> {
    let (p, _) = stable_partition(g);
    cellgraph::build(g, &p)
}

fn check_ab(cg: &CellGraphData) -> Option<Violation> {
    if let Some(x) = cg
        .cell_labels
        .iter()
        .position(|l| l.kind == CellKind::Irregular)
    {
        return violation(Condition::A, Witness::Cell(x));
    }
    cg.pairs
        .values()
        .find(|p| p.kind == PairKind::Irregular)
        .and_then(|p| violation(Condition::B, Witness::Pair(p.x, p.y)))
}

/// Conditions A, B, G and H on the cell graph of the stable partition.
///
/// Fails with [`Error::NotSimple`] on multigraphs.
pub fn is_amenable(g: &ColoredGraph) -> Result<AmenabilityVerdict> {
    Ok(verdict(&cell_graph(g)?))
}

/// [`is_amenable`] for an already built cell graph.
pub fn verdict(cg: &CellGraphData) -> AmenabilityVerdict {
    if let Some(v) = check_ab(cg) {
        return AmenabilityVerdict::from_cells(cg, Some(v));
    }
    for comp in anisotropic_components(cg) {
        if !comp.is_tree {
            let (a, b) = comp
                .extra_edge
                .expect("a component with a cycle has a non-tree edge");
            let v = violation(Condition::G, Witness::Cycle(comp.tree_path(a, b)));
            return AmenabilityVerdict::from_cells(cg, v);
        }
        if let Some((_, child)) = comp.monotonicity_violation {
            let v = violation(Condition::G, Witness::Path(comp.path_from_root(child)));
            return AmenabilityVerdict::from_cells(cg, v);
        }
        let v = match comp.heterogeneous.as_slice() {
            [] => None,
            [h] if cg.size(*h) == comp.min_cardinality => None,
            [h] => violation(
                Condition::H,
                Witness::Path(comp.tree_path(*h, comp.min_cardinality_cells[0])),
            ),
            [h1, h2, ..] => violation(Condition::H, Witness::Path(comp.tree_path(*h1, *h2))),
        };
        if v.is_some() {
            return AmenabilityVerdict::from_cells(cg, v);
        }
    }
    AmenabilityVerdict::from_cells(cg, None)
}

/// Depth-first enumeration of simple anisotropic paths whose cells all
/// have the size of the first one.
struct UniformPaths<'a> {
    cg: &'a CellGraphData,
    budget: Budget,
}

impl UniformPaths<'_> {
    /// Calls `f` on every uniform path starting at `start` whose cells
    /// other than `start` satisfy `allowed`, until `f` returns a witness.
    fn search(
        &mut self,
        start: usize,
        allowed: &dyn Fn(usize) -> bool,
        f: &mut dyn FnMut(&[usize]) -> Option<Violation>,
    ) -> Result<Option<Violation>> {
        let mut path = vec![start];
        let mut on_path = vec![false; self.cg.num_cells()];
        on_path[start] = true;
        self.extend(&mut path, &mut on_path, allowed, f)
    }

    fn extend(
        &mut self,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        allowed: &dyn Fn(usize) -> bool,
        f: &mut dyn FnMut(&[usize]) -> Option<Violation>,
    ) -> Result<Option<Violation>> {
        self.budget.charge(1, "uniform path enumeration")?;
        if let Some(v) = f(path) {
            return Ok(Some(v));
        }
        let last = *path.last().unwrap();
        let size = self.cg.size(path[0]);
        for &next in &self.cg.anisotropic_adjacency[last] {
            if on_path[next] || self.cg.size(next) != size || !allowed(next) {
                continue;
            }
            path.push(next);
            on_path[next] = true;
            let found = self.extend(path, on_path, allowed, f)?;
            path.pop();
            on_path[next] = false;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// State cap for [`check_cdef`].
pub const CDEF_STATE_LIMIT: u64 = 1 << 20;

/// Conditions A-F by enumeration of uniform anisotropic paths and cycles.
/// Exponential in the number of equal-size cells; fails with
/// [`Error::BudgetExceeded`] past [`CDEF_STATE_LIMIT`] search states.
pub fn check_cdef(g: &ColoredGraph) -> Result<AmenabilityVerdict> {
    let cg = cell_graph(g)?;
    if let Some(v) = check_ab(&cg) {
        return Ok(AmenabilityVerdict::from_cells(&cg, Some(v)));
    }
    let k = cg.num_cells();
    let het = |c: usize| cg.cell_labels[c].is_heterogeneous();
    let mut paths = UniformPaths {
        cg: &cg,
        budget: Budget::steps(CDEF_STATE_LIMIT),
    };

    // C: a uniform path between two heterogeneous cells
    for x in (0..k).filter(|&x| het(x)) {
        let found = paths.search(x, &|_| true, &mut |p| {
            (p.len() > 1 && het(*p.last().unwrap())).then(|| Violation {
                condition: Condition::C,
                witness: Witness::Path(p.to_vec()),
            })
        })?;
        if found.is_some() {
            return Ok(AmenabilityVerdict::from_cells(&cg, found));
        }
    }

    // D: a uniform cycle, found from its smallest cell
    for x in 0..k {
        let found = paths.search(x, &|c| c > x, &mut |p| {
            (p.len() >= 3 && cg.is_anisotropic(*p.last().unwrap(), x)).then(|| Violation {
                condition: Condition::D,
                witness: Witness::Cycle(p.to_vec()),
            })
        })?;
        if found.is_some() {
            return Ok(AmenabilityVerdict::from_cells(&cg, found));
        }
    }

    // E and F: X Y1 .. Yl with |X| < |Y1| = ... = |Yl|
    for condition in [Condition::E, Condition::F] {
        for x in 0..k {
            for &y1 in &cg.anisotropic_adjacency[x] {
                if cg.size(y1) <= cg.size(x) {
                    continue;
                }
                let found = paths.search(y1, &|_| true, &mut |ys| {
                    let last = *ys.last().unwrap();
                    let with_x = || {
                        let mut p = vec![x];
                        p.extend_from_slice(ys);
                        p
                    };
                    if condition == Condition::F {
                        return het(last).then(|| Violation {
                            condition,
                            witness: Witness::Path(with_x()),
                        });
                    }
                    for &z in &cg.anisotropic_adjacency[last] {
                        if cg.size(z) >= cg.size(last) {
                            continue;
                        }
                        if z != x {
                            let mut p = with_x();
                            p.push(z);
                            return violation(condition, Witness::Path(p));
                        }
                        if ys.len() >= 2 {
                            return violation(condition, Witness::Cycle(with_x()));
                        }
                    }
                    None
                })?;
                if found.is_some() {
                    return Ok(AmenabilityVerdict::from_cells(&cg, found));
                }
            }
        }
    }
    Ok(AmenabilityVerdict::from_cells(&cg, None))
}

impl Violation {
    /// Re-derives the stable partition of `g`, classifies the witness cells
    /// directly from their induced subgraphs and checks that they violate
    /// the named condition.
    pub fn recheck(&self, g: &ColoredGraph) -> bool {
        self.try_recheck(g).unwrap_or(false)
    }

    fn try_recheck(&self, g: &ColoredGraph) -> Result<bool> {
        let (p, _) = stable_partition(g);
        let k = p.num_classes();
        let cell = |c: usize| p.class(c);
        let size = |c: usize| p.class(c).len();
        let het = |c: usize| -> Result<bool> {
            Ok(cellgraph::classify_cell(g, cell(c))?.is_heterogeneous())
        };
        let aniso = |a: usize, b: usize| -> Result<bool> {
            Ok(a != b && cellgraph::classify_pair(g, cell(a), cell(b))?.is_anisotropic())
        };
        let valid_walk = |cells: &[usize], closed: bool| -> Result<bool> {
            let mut seen = vec![false; k];
            for &c in cells {
                if c >= k || std::mem::replace(&mut seen[c], true) {
                    return Ok(false);
                }
            }
            for w in cells.windows(2) {
                if !aniso(w[0], w[1])? {
                    return Ok(false);
                }
            }
            if closed && !aniso(*cells.last().unwrap(), cells[0])? {
                return Ok(false);
            }
            Ok(!cells.is_empty())
        };
        let uniform = |cells: &[usize]| cells.iter().all(|&c| size(c) == size(cells[0]));

        Ok(match (&self.condition, &self.witness) {
            (Condition::A, &Witness::Cell(x)) => {
                x < k && cellgraph::classify_cell(g, cell(x))?.kind == CellKind::Irregular
            }
            (Condition::B, &Witness::Pair(x, y)) => {
                x < k
                    && y < k
                    && x != y
                    && cellgraph::classify_pair(g, cell(x), cell(y))?.kind == PairKind::Irregular
            }
            (Condition::C, Witness::Path(c)) => {
                c.len() >= 2
                    && valid_walk(c, false)?
                    && uniform(c)
                    && het(c[0])?
                    && het(*c.last().unwrap())?
            }
            (Condition::D, Witness::Cycle(c)) => c.len() >= 3 && valid_walk(c, true)? && uniform(c),
            (Condition::E, Witness::Path(c)) => {
                let l = c.len();
                l >= 3
                    && valid_walk(c, false)?
                    && size(c[0]) < size(c[1])
                    && uniform(&c[1..l - 1])
                    && size(c[l - 2]) > size(c[l - 1])
            }
            (Condition::E, Witness::Cycle(c)) => {
                c.len() >= 3 && valid_walk(c, true)? && size(c[0]) < size(c[1]) && uniform(&c[1..])
            }
            (Condition::F, Witness::Path(c)) => {
                c.len() >= 2
                    && valid_walk(c, false)?
                    && size(c[0]) < size(c[1])
                    && uniform(&c[1..])
                    && het(*c.last().unwrap())?
            }
            (Condition::G, Witness::Cycle(c)) => c.len() >= 3 && valid_walk(c, true)?,
            (Condition::G, Witness::Path(c)) => {
                let l = c.len();
                if l < 2 || !valid_walk(c, false)? || size(c[l - 2]) <= size(c[l - 1]) {
                    return Ok(false);
                }
                // the first cell has minimum size in its anisotropic component
                let mut comp = vec![c[0]];
                let mut seen = vec![false; k];
                seen[c[0]] = true;
                let mut i = 0;
                while i < comp.len() {
                    let a = comp[i];
                    for b in 0..k {
                        if !seen[b] && aniso(a, b)? {
                            seen[b] = true;
                            comp.push(b);
                        }
                    }
                    i += 1;
                }
                comp.iter().all(|&b| size(b) >= size(c[0]))
            }
            (Condition::H, Witness::Path(c)) => {
                let last = *c.last().unwrap_or(&0);
                c.len() >= 2
                    && valid_walk(c, false)?
                    && het(c[0])?
                    && (het(last)? || size(last) < size(c[0]))
            }
            _ => false,
        })
    }
}

/// Per vertex `(color, degree)`, sorted: a necessary condition for
/// CR-equivalence that is cheap to evaluate on edge masks.
fn degree_profile(colors: &[u32], pairs: &[(usize, usize)], mask: u64) -> Vec<(u32, u32)> {
    let mut deg = vec![0u32; colors.len()];
    for (bit, &(u, v)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    let mut profile: Vec<(u32, u32)> = colors.iter().copied().zip(deg).collect();
    profile.sort_unstable();
    profile
}

fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

fn graph_from_mask(colors: &[u32], pairs: &[(usize, usize)], mask: u64) -> ColoredGraph {
    let mut b = GraphBuilder::new(colors.len());
    b.colors(colors);
    for (bit, &(u, v)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            b.edge(u, v);
        }
    }
    b.build().expect("mask graphs are valid")
}

/// The definition, by enumeration: every labeled graph on the vertices of
/// `g`, colored like `g`, that color refinement cannot tell apart from `g`
/// is isomorphic to `g`. Only for `n <= n_budget`.
pub fn amenable_bruteforce(g: &ColoredGraph, n_budget: usize, budget: &mut Budget) -> Result<bool> {
    let n = g.n();
    if n > n_budget || n > 11 {
        return Err(Error::BudgetExceeded(format!(
            "brute-force amenability needs n <= {}, got {n}",
            n_budget.min(11)
        )));
    }
    if !g.is_simple() {
        return Err(Error::NotSimple);
    }
    let pairs = vertex_pairs(n);
    let target_mask = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| g.has_edge(u, v))
        .fold(0u64, |m, (bit, _)| m | 1 << bit);
    let profile = degree_profile(g.colors(), &pairs, target_mask);
    let fingerprint = cr_fingerprint(g);
    for mask in 0u64..1 << pairs.len() {
        if mask.count_ones() as usize != g.num_edges() {
            continue;
        }
        budget.charge(1, "brute-force amenability")?;
        if degree_profile(g.colors(), &pairs, mask) != profile {
            continue;
        }
        let h = graph_from_mask(g.colors(), &pairs, mask);
        if cr_fingerprint(&h) == fingerprint && !oracles::isomorphic(g, &h, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All uncolored labeled graphs on `n <= 7` vertices, bucketed by their
/// color refinement fingerprint, for answering many brute-force
/// amenability queries at once.
///
/// A bucket is a union of whole isomorphism classes of labeled graphs. It
/// is a single class exactly when its size is `n! / |Aut(G)|` for any
/// member `G`, which is checked with the automorphism oracle once per
/// bucket.
pub struct AmenabilityCensus {
    n: usize,
    bucket_of: Vec<u32>,
    bucket_size: Vec<u64>,
    verdict: Vec<Option<bool>>,
}

impl AmenabilityCensus {
    pub fn new(n: usize) -> Result<Self> {
        if n > 7 {
            return Err(Error::InvalidParameter(format!(
                "census needs n <= 7, got {n}"
            )));
        }
        let pairs = vertex_pairs(n);
        let colors = vec![0u32; n];
        let total = 1usize << pairs.len();
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut bucket_of = Vec::with_capacity(total);
        let mut bucket_size: Vec<u64> = Vec::new();
        for mask in 0..total as u64 {
            let fp = cr_fingerprint(&graph_from_mask(&colors, &pairs, mask));
            let next = ids.len() as u32;
            let id = *ids.entry(fp).or_insert(next);
            if id == next {
                bucket_size.push(0);
            }
            bucket_size[id as usize] += 1;
            bucket_of.push(id);
        }
        let buckets = bucket_size.len();
        Ok(AmenabilityCensus {
            n,
            bucket_of,
            bucket_size,
            verdict: vec![None; buckets],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_graphs(&self) -> u64 {
        self.bucket_of.len() as u64
    }

    pub fn num_buckets(&self) -> usize {
        self.bucket_size.len()
    }

    /// Brute-force amenability of the labeled graph with edge mask `mask`
    /// (see [`oracles::labeled_graph`]).
    pub fn is_amenable(&mut self, mask: u64, budget: &mut Budget) -> Result<bool> {
        let id = self.bucket_of[mask as usize] as usize;
        if let Some(v) = self.verdict[id] {
            return Ok(v);
        }
        let g = oracles::labeled_graph(self.n, mask);
        let aut = oracles::automorphisms(&g, budget)?.order() as u64;
        let factorial: u64 = (1..=self.n as u64).product();
        let v = self.bucket_size[id] * aut == factorial;
        self.verdict[id] = Some(v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::*;

    fn amenable(g: &ColoredGraph) -> bool {
        let v = is_amenable(g).unwrap();
        if let Some(w) = &v.violation {
            assert!(w.recheck(g), "{w:?}");
        }
        v.amenable
    }

    #[test]
    fn known_verdicts() {
        assert!(amenable(&cycle(5).unwrap()));
        assert!(amenable(&complete(6)));
        assert!(amenable(&ColoredGraph::empty(4)));
        assert!(amenable(&star_forest(3, 4).unwrap()));
        for n in 6..10 {
            assert!(!amenable(&cycle(n).unwrap()));
        }
        assert!(!amenable(&petersen()));
        assert!(matches!(
            is_amenable(&GraphBuilder::new(2).edge_mult(0, 1, 2).build().unwrap()),
            Err(Error::NotSimple)
        ));
    }

    #[test]
    fn cycle_violates_a() {
        let v = is_amenable(&cycle(7).unwrap()).unwrap();
        assert_eq!(v.violation.unwrap().condition, Condition::A);
    }

    #[test]
    fn alternating_matchings_give_a_uniform_cycle() {
        // a 6-cycle colored in three pairs: the cells form a triangle of matchings
        let mut b = GraphBuilder::new(6);
        b.colors(&[0, 0, 1, 1, 2, 2]);
        for (u, v) in [(0, 2), (1, 3), (2, 4), (3, 5), (4, 1), (5, 0)] {
            b.edge(u, v);
        }
        let g = b.build().unwrap();
        let v = check_cdef(&g).unwrap();
        let w = v.violation.unwrap();
        assert_eq!(w.condition, Condition::D);
        assert!(w.recheck(&g));
        let v = is_amenable(&g).unwrap().violation.unwrap();
        assert_eq!(v.condition, Condition::G);
        assert!(v.recheck(&g));
    }

    #[test]
    fn bruteforce_examples() {
        let mut b = Budget::default();
        assert!(!amenable_bruteforce(&cycle(7).unwrap(), 7, &mut b).unwrap());
        assert!(amenable_bruteforce(&complete(4), 7, &mut b).unwrap());
        assert!(amenable_bruteforce(&random_tree(7, 1).unwrap(), 7, &mut b).unwrap());
        assert!(amenable_bruteforce(&complete(8), 7, &mut b).is_err());
    }

    #[test]
    fn three_checkers_agree_up_to_five_vertices() {
        let mut b = Budget::default();
        for n in 0..=5 {
            let mut census = AmenabilityCensus::new(n).unwrap();
            for mask in 0..census.num_graphs() {
                let g = oracles::labeled_graph(n, mask);
                let fast = amenable(&g);
                assert_eq!(check_cdef(&g).unwrap().amenable, fast, "{mask}");
                assert_eq!(census.is_amenable(mask, &mut b).unwrap(), fast, "{mask}");
                if mask % 7 == 0 {
                    assert_eq!(amenable_bruteforce(&g, 7, &mut b).unwrap(), fast);
                }
            }
        }
    }
}
