//! Exhaustive ground truth for small graphs.
//!
//! Everything here is exponential in the worst case and takes a [`Budget`].
//! The searches are individualization-refinement trees: refine, pick the
//! first smallest class that is not yet a singleton on each side, and
//! branch over all its candidates.

use std::collections::HashSet;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::Result;
use crate::graph::{ColoredGraph, GraphBuilder};
use crate::refinement::{is_equitable, refine_labels, stable_partition, Partition};
use crate::tinhofer::{
    self, branching_classes, individualize, IndividualizationStep, Joint, Rejection,
};

struct Search<'a> {
    g: &'a ColoredGraph,
    h: &'a ColoredGraph,
    union: ColoredGraph,
    cost: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a ColoredGraph, h: &'a ColoredGraph) -> Self {
        let union = g.disjoint_union(h);
        let cost = (union.n() + union.num_edges()) as u64 + 1;
        Search { g, h, union, cost }
    }

    /// Visits every isomorphism consistent with `labels`; the visitor
    /// returns `true` to stop. Returns whether the search was stopped.
    fn visit(
        &self,
        labels: &[u32],
        budget: &mut Budget,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<bool> {
        budget.charge(self.cost, "isomorphism search")?;
        let n = self.g.n();
        match tinhofer::settle(&self.union, self.g, self.h, labels) {
            Joint::Rejected(_) => Ok(false),
            Joint::Mapped(map) => Ok(f(&map)),
            Joint::Open(p) => {
                let target = branching_classes(&p)
                    .min_by_key(|&c| (p.class(c).len(), c))
                    .unwrap();
                let members = p.class(target).as_slice();
                let u = members[0];
                for &w in members.iter().filter(|&&w| w >= n) {
                    if self.visit(&individualize(&p, n, u, w - n), budget, f)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    fn start(&self) -> Vec<u32> {
        self.union.colors().to_vec()
    }
}

/// Some isomorphism from `g` to `h`, or `None` after an exhausted search.
pub fn isomorphism(
    g: &ColoredGraph,
    h: &ColoredGraph,
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>> {
    if g.n() != h.n() || g.num_edges() != h.num_edges() {
        return Ok(None);
    }
    let search = Search::new(g, h);
    let mut found = None;
    search.visit(&search.start(), budget, &mut |map| {
        found = Some(map.to_vec());
        true
    })?;
    Ok(found)
}

pub fn isomorphic(g: &ColoredGraph, h: &ColoredGraph, budget: &mut Budget) -> Result<bool> {
    Ok(isomorphism(g, h, budget)?.is_some())
}

/// The full automorphism group as an explicit list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutGroup {
    /// Permutations with `perm[v]` the image of `v`, identity first.
    pub elements: Vec<Vec<usize>>,
    pub orbits: Partition,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Identity present, closed under composition and inverses.
    /// Quadratic in the group order.
    pub fn is_closed(&self) -> bool {
        let set: HashSet<&[usize]> = self.elements.iter().map(Vec::as_slice).collect();
        let n = self.orbits.n();
        let identity: Vec<usize> = (0..n).collect();
        if !set.contains(identity.as_slice()) {
            return false;
        }
        self.elements.iter().all(|a| {
            let mut inv = vec![0; n];
            for (v, &w) in a.iter().enumerate() {
                inv[w] = v;
            }
            set.contains(inv.as_slice())
                && self.elements.iter().all(|b| {
                    let ab: Vec<usize> = (0..n).map(|v| a[b[v]]).collect();
                    set.contains(ab.as_slice())
                })
        })
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = v;
        while self.0[c] != r {
            c = std::mem::replace(&mut self.0[c], r);
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }

    fn partition(&mut self) -> Partition {
        let roots: Vec<usize> = (0..self.0.len()).map(|v| self.find(v)).collect();
        Partition::from_labels(&roots)
    }

    fn absorb(&mut self, perm: &[usize]) {
        for (v, &w) in perm.iter().enumerate() {
            self.union(v, w);
        }
    }
}

/// Enumerates all automorphisms; each one is a distinct leaf of the search.
pub fn automorphisms(g: &ColoredGraph, budget: &mut Budget) -> Result<AutGroup> {
    let search = Search::new(g, g);
    let mut elements = Vec::new();
    search.visit(&search.start(), budget, &mut |map| {
        elements.push(map.to_vec());
        false
    })?;
    elements.sort();
    let mut uf = UnionFind::new(g.n());
    for a in &elements {
        uf.absorb(a);
    }
    Ok(AutGroup {
        elements,
        orbits: uf.partition(),
    })
}

/// The orbit partition of `Aut(g)`, found with one search per pair of
/// candidate orbit representatives instead of a full enumeration.
pub fn orbits(g: &ColoredGraph, budget: &mut Budget) -> Result<Partition> {
    let n = g.n();
    let (stable, _) = stable_partition(g);
    let search = Search::new(g, g);
    let base = search.start();
    let fresh = g.num_colors() as u32;
    let mut uf = UnionFind::new(n);
    for class in stable.classes() {
        let mut reps: Vec<usize> = Vec::new();
        for x in class.iter() {
            if reps.iter().any(|&r| uf.find(r) == uf.find(x)) {
                continue;
            }
            let mut joined = false;
            for &r in &reps {
                let mut labels = base.clone();
                labels[r] = fresh;
                labels[n + x] = fresh;
                let mut found = None;
                search.visit(&labels, budget, &mut |map| {
                    found = Some(map.to_vec());
                    true
                })?;
                if let Some(map) = found {
                    uf.absorb(&map);
                    joined = true;
                    break;
                }
            }
            if !joined {
                reps.push(x);
            }
        }
    }
    Ok(uf.partition())
}

/// The stable partition coincides with the orbit partition.
pub fn is_refinable(g: &ColoredGraph, budget: &mut Budget) -> Result<bool> {
    let (stable, _) = stable_partition(g);
    Ok(stable.same_cells(&orbits(g, budget)?))
}

/// All equitable partitions of `g` whose cells are monochromatic.
///
/// Each of them refines the stable partition, so the enumeration only
/// forms blocks inside stable classes.
pub fn equitable_partitions(g: &ColoredGraph, budget: &mut Budget) -> Result<Vec<Partition>> {
    let n = g.n();
    let (stable, _) = stable_partition(g);
    let mut out = Vec::new();
    let mut block = vec![0u32; n];
    // block id -> stable class of its members
    let mut block_class: Vec<usize> = Vec::new();
    fn rec(
        v: usize,
        g: &ColoredGraph,
        stable: &Partition,
        block: &mut Vec<u32>,
        block_class: &mut Vec<usize>,
        out: &mut Vec<Partition>,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.charge(1, "equitable partition enumeration")?;
        if v == g.n() {
            let p = Partition::from_labels(block);
            budget.charge(g.num_edges() as u64, "equitable partition enumeration")?;
            if is_equitable(g, &p) {
                out.push(p);
            }
            return Ok(());
        }
        let class = stable.class_of(v);
        for b in 0..block_class.len() {
            if block_class[b] == class {
                block[v] = b as u32;
                rec(v + 1, g, stable, block, block_class, out, budget)?;
            }
        }
        block[v] = block_class.len() as u32;
        block_class.push(class);
        rec(v + 1, g, stable, block, block_class, out, budget)?;
        block_class.pop();
        Ok(())
    }
    rec(
        0,
        g,
        &stable,
        &mut block,
        &mut block_class,
        &mut out,
        budget,
    )?;
    Ok(out)
}

/// `p` is the orbit partition of some group of automorphisms of `g`.
///
/// The largest candidate is the group of automorphisms fixing every cell
/// of `p` setwise, which is `Aut` of `g` recolored by `p`.
pub fn is_orbit_partition(g: &ColoredGraph, p: &Partition, budget: &mut Budget) -> Result<bool> {
    let keys: Vec<(u32, u32)> = (0..g.n()).map(|v| (g.color(v), p.labels()[v])).collect();
    let recolored = g.with_colors(&keys);
    Ok(orbits(&recolored, budget)?.same_cells(p))
}

/// Every equitable partition is an orbit partition.
pub fn is_godsil(g: &ColoredGraph, budget: &mut Budget) -> Result<bool> {
    for p in equitable_partitions(g, budget)? {
        if !is_orbit_partition(g, &p, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A sequence of choices on two copies of one graph after which the
/// procedure answers "non-isomorphic".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingTranscript {
    pub steps: Vec<IndividualizationStep>,
    pub reason: Rejection,
}

/// Explores every choice sequence of the procedure on `g` against itself.
/// `None` means `g` is a Tinhofer graph.
///
/// The first-graph vertex is restricted to one representative per orbit
/// of that side's current colored graph; the second-graph vertex ranges
/// over its whole class. Joint colorings already explored are skipped.
pub fn is_tinhofer_bruteforce(
    g: &ColoredGraph,
    budget: &mut Budget,
) -> Result<Option<FailingTranscript>> {
    struct State<'a> {
        g: &'a ColoredGraph,
        union: ColoredGraph,
        seen: HashSet<Vec<u32>>,
        steps: Vec<IndividualizationStep>,
    }
    fn explore(st: &mut State, labels: Vec<u32>, budget: &mut Budget) -> Result<Option<Rejection>> {
        let n = st.g.n();
        budget.charge(
            (st.union.n() + st.union.num_edges()) as u64,
            "Tinhofer exploration",
        )?;
        let p = match tinhofer::settle(&st.union, st.g, st.g, &labels) {
            Joint::Rejected(why) => return Ok(Some(why)),
            Joint::Mapped(_) => return Ok(None),
            Joint::Open(p) => p,
        };
        if !st.seen.insert(p.labels().to_vec()) {
            return Ok(None);
        }
        let left = st.g.with_colors(&p.labels()[..n]);
        let left_orbits = orbits(&left, budget)?;
        let classes: Vec<usize> = branching_classes(&p).collect();
        for class in classes {
            let members = p.class(class).as_slice();
            let mut reps = HashSet::new();
            for &u in members.iter().filter(|&&u| u < n) {
                if !reps.insert(left_orbits.class_of(u)) {
                    continue;
                }
                for &w in members.iter().filter(|&&w| w >= n) {
                    st.steps.push(IndividualizationStep {
                        round: st.steps.len(),
                        class,
                        u,
                        v: w - n,
                    });
                    if let Some(why) = explore(st, individualize(&p, n, u, w - n), budget)? {
                        return Ok(Some(why));
                    }
                    st.steps.pop();
                }
            }
        }
        Ok(None)
    }
    let union = g.disjoint_union(g);
    let start = union.colors().to_vec();
    let mut st = State {
        g,
        union,
        seen: HashSet::new(),
        steps: Vec::new(),
    };
    Ok(
        explore(&mut st, start, budget)?.map(|reason| FailingTranscript {
            steps: st.steps,
            reason,
        }),
    )
}

/// Lexicographically least relabeled encoding over all leaves of the
/// individualization-refinement tree of `g`: a complete isomorphism
/// invariant.
pub fn canonical_certificate(g: &ColoredGraph, budget: &mut Budget) -> Result<Vec<u32>> {
    fn encode(g: &ColoredGraph, position: &[u32]) -> Vec<u32> {
        let n = g.n();
        let mut colors = vec![0u32; n];
        for v in 0..n {
            colors[position[v] as usize] = g.color(v);
        }
        let mut edges: Vec<u32> = g
            .edges()
            .map(|(u, v, m)| {
                let (a, b) = (position[u], position[v]);
                let (a, b) = (a.min(b), a.max(b));
                (a * n as u32 + b) * 256 + m as u32
            })
            .collect();
        edges.sort_unstable();
        let mut out = vec![n as u32];
        out.extend(colors);
        out.extend(edges);
        out
    }
    fn rec(
        g: &ColoredGraph,
        labels: &[u32],
        best: &mut Option<Vec<u32>>,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.charge((g.n() + g.num_edges()) as u64 + 1, "canonical certificate")?;
        let (p, _) = refine_labels(g, labels);
        if p.is_discrete() {
            let cert = encode(g, p.labels());
            if best.as_ref().is_none_or(|b| cert < *b) {
                *best = Some(cert);
            }
            return Ok(());
        }
        let target = (0..p.num_classes())
            .filter(|&c| p.class(c).len() > 1)
            .min_by_key(|&c| (p.class(c).len(), c))
            .unwrap();
        // children related by an automorphism of the current coloring
        // produce the same set of leaves
        let node_orbits = orbits(&g.with_colors(p.labels()), budget)?;
        let mut done = HashSet::new();
        for u in p.class(target).iter() {
            if !done.insert(node_orbits.class_of(u)) {
                continue;
            }
            let mut next = p.labels().to_vec();
            next[u] = p.num_classes() as u32;
            rec(g, &next, best, budget)?;
        }
        Ok(())
    }
    let mut best = None;
    rec(g, g.colors(), &mut best, budget)?;
    Ok(best.unwrap_or_else(|| vec![0]))
}

/// The uncolored simple graph on `n` vertices whose edge set is the bit
/// mask `mask` over the pairs `(u, v)`, `u < v`, in lexicographic order.
pub fn labeled_graph(n: usize, mask: u64) -> ColoredGraph {
    let mut b = GraphBuilder::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                b.edge(u, v);
            }
            bit += 1;
        }
    }
    b.build().unwrap()
}

/// One representative per isomorphism class of uncolored simple graphs on
/// `n` vertices, grown vertex by vertex and deduplicated by certificate.
pub fn graphs_up_to_iso(n: usize, budget: &mut Budget) -> Result<Vec<ColoredGraph>> {
    let mut reps = vec![ColoredGraph::empty(0)];
    for k in 1..=n {
        let mut next = Vec::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for g in &reps {
            let old: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
            for nbrs in 0u64..1 << (k - 1) {
                let mut edges = old.clone();
                edges.extend(
                    (0..k - 1)
                        .filter(|&v| nbrs >> v & 1 == 1)
                        .map(|v| (v, k - 1)),
                );
                let h = ColoredGraph::from_edges(k, &edges)?;
                if seen.insert(canonical_certificate(&h, budget)?) {
                    next.push(h);
                }
            }
        }
        reps = next;
    }
    Ok(reps)
}

/// Representatives of the isomorphism classes of trees on `n >= 1`
/// vertices, grown leaf by leaf and deduplicated by certificate.
pub fn trees_up_to_iso(n: usize, budget: &mut Budget) -> Result<Vec<ColoredGraph>> {
    let mut reps = vec![ColoredGraph::empty(1)];
    for k in 2..=n {
        let mut next = Vec::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for t in &reps {
            let old: Vec<(usize, usize)> = t.edges().map(|(u, v, _)| (u, v)).collect();
            for attach in 0..k - 1 {
                let mut edges = old.clone();
                edges.push((attach, k - 1));
                let grown = ColoredGraph::from_edges(k, &edges)?;
                if seen.insert(canonical_certificate(&grown, budget)?) {
                    next.push(grown);
                }
            }
        }
        reps = next;
    }
    Ok(reps)
}

/// Representatives of the isomorphism classes of forests on `n` vertices:
/// multisets of trees whose orders sum to `n`.
pub fn forests_up_to_iso(n: usize, budget: &mut Budget) -> Result<Vec<ColoredGraph>> {
    let by_order: Vec<Vec<ColoredGraph>> = (0..=n)
        .map(|k| {
            if k == 0 {
                Ok(Vec::new())
            } else {
                trees_up_to_iso(k, budget)
            }
        })
        .collect::<Result<_>>()?;
    // nondecreasing sequences of (order, index) keys
    fn rec(
        remaining: usize,
        min_key: (usize, usize),
        by_order: &[Vec<ColoredGraph>],
        acc: ColoredGraph,
        out: &mut Vec<ColoredGraph>,
    ) {
        if remaining == 0 {
            out.push(acc);
            return;
        }
        for k in min_key.0..=remaining {
            let start = if k == min_key.0 { min_key.1 } else { 0 };
            for i in start..by_order[k].len() {
                rec(
                    remaining - k,
                    (k, i),
                    by_order,
                    acc.disjoint_union(&by_order[k][i]),
                    out,
                );
            }
        }
    }
    let mut out = Vec::new();
    rec(n, (1, 0), &by_order, ColoredGraph::empty(0), &mut out);
    Ok(out)
}
