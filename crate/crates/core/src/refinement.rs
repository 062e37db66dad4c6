//! Color refinement.
//!
//! Two implementations of the same fixpoint:
//!
//! * [`refine_step`] / [`iterate_refinement`] apply the round-by-round rule
//!   `C'(u) = (C(u), {{C(a) : a in N(u)}})` literally, renaming colors by the
//!   sorted order of the distinct signatures. Slow but transparent; also
//!   used for [`cr_fingerprint`].
//! * [`stable_partition`] is a worklist engine that re-splits classes by
//!   neighbor counts into a splitter class, enqueuing all but the largest
//!   fragment of a split. It runs in `O((n + m) log n)` up to the sort of
//!   touched vertices.
//!
//! Both produce the same cells. Both number classes canonically, i.e. class
//! ids depend only on the isomorphism type of the colored graph, but the two
//! numberings differ from each other. Compare their outputs with
//! [`Partition::same_cells`].
//!
//! Parallel edges count with their multiplicity.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::graph::{ColoredGraph, VertexSet};

/// A partition of `0..n` into classes with dense ids.
#[derive(Debug, Clone)]
pub struct Partition {
    class_of: Vec<u32>,
    num_classes: usize,
    /// Member lists, built on first use.
    classes: OnceLock<Vec<VertexSet>>,
    /// Refinement rounds (or effective engine splits) that produced it.
    pub round: usize,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.class_of == other.class_of && self.round == other.round
    }
}

impl Eq for Partition {}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Partition", 3)?;
        st.serialize_field("class_of", &self.class_of)?;
        st.serialize_field("classes", self.classes())?;
        st.serialize_field("round", &self.round)?;
        st.end()
    }
}

impl Partition {
    /// Builds a partition from per-vertex ids, renumbered densely in value order.
    pub fn from_labels<T: Ord + Copy>(labels: &[T]) -> Self {
        let (class_of, k) = crate::graph::compact_colors(labels);
        Self::from_dense(class_of, k, 0)
    }

    fn from_dense(class_of: Vec<u32>, k: usize, round: usize) -> Self {
        Partition {
            class_of,
            num_classes: k,
            classes: OnceLock::new(),
            round,
        }
    }

    /// The partition into color classes of `g`.
    pub fn from_colors(g: &ColoredGraph) -> Self {
        Self::from_dense(g.colors().to_vec(), g.num_colors(), 0)
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.class_of
    }

    pub fn classes(&self) -> &[VertexSet] {
        self.classes.get_or_init(|| {
            let mut members = vec![Vec::new(); self.num_classes];
            for (v, &c) in self.class_of.iter().enumerate() {
                members[c as usize].push(v);
            }
            members.into_iter().map(VertexSet::from_sorted).collect()
        })
    }

    pub fn class(&self, id: usize) -> &VertexSet {
        &self.classes()[id]
    }

    pub fn is_discrete(&self) -> bool {
        self.num_classes == self.class_of.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Equality as set partitions, ignoring class ids.
    pub fn same_cells(&self, other: &Partition) -> bool {
        if self.n() != other.n() || self.num_classes() != other.num_classes() {
            return false;
        }
        let mut map = vec![u32::MAX; self.num_classes()];
        for (a, b) in self.class_of.iter().zip(&other.class_of) {
            let slot = &mut map[*a as usize];
            if *slot == u32::MAX {
                *slot = *b;
            } else if *slot != *b {
                return false;
            }
        }
        true
    }

    /// True iff every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.classes().iter().all(|c| {
            let first = coarser.class_of(c.as_slice()[0]);
            c.iter().all(|v| coarser.class_of(v) == first)
        })
    }
}

/// Class counts per refinement round.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RefinementTrace {
    /// `class_counts[0]` is the initial number of classes.
    pub class_counts: Vec<usize>,
}

impl RefinementTrace {
    /// Number of rounds that changed the partition.
    pub fn rounds(&self) -> usize {
        self.class_counts.len().saturating_sub(1)
    }
}

type Signature = (u32, Vec<u32>);

fn signatures(g: &ColoredGraph, class_of: &[u32]) -> Vec<Signature> {
    (0..g.n())
        .map(|u| {
            let mut nb = Vec::with_capacity(g.degree(u));
            for (a, m) in g.adjacency(u) {
                nb.extend(std::iter::repeat_n(class_of[a], m as usize));
            }
            nb.sort_unstable();
            (class_of[u], nb)
        })
        .collect()
}

/// Distinct signatures in sorted order with multiplicities, and the new
/// class of every vertex (the rank of its signature).
fn signature_table(g: &ColoredGraph, class_of: &[u32]) -> (Vec<u32>, Vec<(Signature, usize)>) {
    let sigs = signatures(g, class_of);
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
    let mut next = vec![0u32; g.n()];
    let mut table: Vec<(Signature, usize)> = Vec::new();
    for &v in &order {
        match table.last_mut() {
            Some((s, count)) if *s == sigs[v] => *count += 1,
            _ => table.push((sigs[v].clone(), 1)),
        }
        next[v] = (table.len() - 1) as u32;
    }
    (next, table)
}

/// One round of color refinement. New class ids follow the lexicographic
/// order of `(old class, sorted neighbor classes)`.
pub fn refine_step(g: &ColoredGraph, p: &Partition) -> Partition {
    assert_eq!(g.n(), p.n(), "partition size");
    let (next, table) = signature_table(g, &p.class_of);
    Partition::from_dense(next, table.len(), p.round + 1)
}

/// Iterates [`refine_step`] from `initial` until the number of classes stops
/// growing. The returned partition has `round` equal to the number of
/// effective rounds.
pub fn iterate_refinement(g: &ColoredGraph, initial: &Partition) -> (Partition, RefinementTrace) {
    let mut p = Partition {
        round: 0,
        ..initial.clone()
    };
    let mut trace = RefinementTrace {
        class_counts: vec![p.num_classes()],
    };
    loop {
        let next = refine_step(g, &p);
        if next.num_classes() == p.num_classes() {
            // Same cells; keep the canonical ids of the last round.
            let mut next = next;
            next.round = p.round;
            return (next, trace);
        }
        trace.class_counts.push(next.num_classes());
        p = next;
    }
}

/// A complete color-refinement invariant: `cr_fingerprint(g) ==
/// cr_fingerprint(h)` iff `g` and `h` have the same order and are not
/// distinguished by color refinement.
pub fn cr_fingerprint(g: &ColoredGraph) -> Vec<u32> {
    let mut out = vec![g.n() as u32];
    // round 0: the color histogram
    let mut hist = vec![0u32; g.num_colors()];
    for &c in g.colors() {
        hist[c as usize] += 1;
    }
    out.push(hist.len() as u32);
    out.extend_from_slice(&hist);
    let mut class_of = g.colors().to_vec();
    let mut k = g.num_colors();
    loop {
        let (next, table) = signature_table(g, &class_of);
        out.push(table.len() as u32);
        for ((parent, nb), count) in &table {
            out.push(*count as u32);
            out.push(*parent);
            out.push(nb.len() as u32);
            out.extend_from_slice(nb);
        }
        if table.len() == k {
            return out;
        }
        k = table.len();
        class_of = next;
    }
}

/// Compact adjacency for the engine: `u32` targets, and multiplicities
/// only when some edge has one above 1.
#[inline(always)]
fn prefetch<T>(at: &[T]) {
    #[cfg(target_arch = "x86_64")]
    if let Some(x) = at.first() {
        // SAFETY: prefetching is a hint and never faults
        unsafe {
            std::arch::x86_64::_mm_prefetch::<{ std::arch::x86_64::_MM_HINT_T0 }>(
                x as *const T as *const i8,
            )
        }
    }
}

/// Adjacency arrays of the graph, borrowed as they are.
struct Csr<'a> {
    offsets: &'a [usize],
    targets: &'a [usize],
    /// Absent for simple graphs.
    mults: Option<&'a [u8]>,
}

impl<'a> Csr<'a> {
    fn new(g: &'a ColoredGraph) -> Self {
        let (offsets, targets, mults) = g.raw_adjacency();
        Csr {
            offsets,
            targets,
            mults: (!g.is_simple()).then_some(mults),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Vert {
    class: u32,
    count: u32,
    /// Index into `elems`.
    pos: u32,
}

/// Groups keys `count << 32 | vertex` by increasing count. Counts span a
/// small range in practice, so a counting sort usually applies.
fn sort_by_count(keys: &mut Vec<u64>, buf: &mut Vec<u64>, tally: &mut Vec<usize>) {
    let lo = keys.iter().map(|&k| k >> 32).min().unwrap_or(0);
    let hi = keys.iter().map(|&k| k >> 32).max().unwrap_or(0);
    let range = (hi - lo) as usize + 1;
    if keys.len() < 32 || range > keys.len() {
        keys.sort_unstable();
        return;
    }
    tally.clear();
    tally.resize(range + 1, 0);
    for &k in keys.iter() {
        tally[((k >> 32) - lo) as usize + 1] += 1;
    }
    for i in 1..=range {
        tally[i] += tally[i - 1];
    }
    buf.clear();
    buf.resize(keys.len(), 0);
    for &k in keys.iter() {
        let slot = &mut tally[((k >> 32) - lo) as usize];
        buf[*slot] = k;
        *slot += 1;
    }
    std::mem::swap(keys, buf);
}

struct Engine<'a> {
    csr: Csr<'a>,
    /// Vertices grouped by class; class `c` occupies `start[c]..end[c]`.
    elems: Vec<u32>,
    /// Class, pending count and position side by side: one cache line per
    /// visit.
    vert: Vec<Vert>,
    start: Vec<usize>,
    end: Vec<usize>,
    /// Vertices of the class hit by the current splitter, kept at the tail
    /// of its block.
    hits: Vec<u32>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
    /// Bitset of vertices whose class is a singleton; they cannot split.
    single: Vec<u64>,
    touched_classes: Vec<u32>,
    keyed: Vec<u64>,
    scratch: Vec<u64>,
    tally: Vec<usize>,
    splitter: Vec<u32>,
    bounds: Vec<usize>,
    trace: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn new(g: &'a ColoredGraph, labels: &[u32], k: usize) -> Self {
        let n = g.n();
        let mut size = vec![0usize; k];
        for &c in labels {
            size[c as usize] += 1;
        }
        let mut start = vec![0usize; k];
        for c in 1..k {
            start[c] = start[c - 1] + size[c - 1];
        }
        let end: Vec<usize> = (0..k).map(|c| start[c] + size[c]).collect();
        let mut fill = start.clone();
        let mut elems = vec![0u32; n];
        let mut vert = vec![Vert::default(); n];
        for (v, &c) in labels.iter().enumerate() {
            elems[fill[c as usize]] = v as u32;
            vert[v].class = c;
            vert[v].pos = fill[c as usize] as u32;
            fill[c as usize] += 1;
        }
        let mut single = vec![0u64; n.div_ceil(64)];
        for c in 0..k {
            if size[c] == 1 {
                let v = elems[start[c]] as usize;
                single[v / 64] |= 1 << (v % 64);
            }
        }
        Engine {
            csr: Csr::new(g),
            elems,
            vert,
            start,
            end,
            hits: vec![0; k],
            in_queue: vec![true; k],
            queue: (0..k as u32).collect(),
            single,
            touched_classes: Vec::new(),
            keyed: Vec::new(),
            scratch: Vec::new(),
            tally: Vec::new(),
            splitter: Vec::new(),
            bounds: Vec::new(),
            trace: vec![k],
        }
    }

    fn num_classes(&self) -> usize {
        self.start.len()
    }

    fn run(&mut self) {
        // once discrete, no queued splitter can change anything
        while self.num_classes() < self.vert.len() {
            let Some(s) = self.queue.pop_front() else {
                break;
            };
            self.in_queue[s as usize] = false;
            self.process(s as usize);
        }
    }

    fn swap_to(&mut self, u: u32, target: usize) {
        let pu = self.vert[u as usize].pos;
        let w = self.elems[target];
        self.elems.swap(pu as usize, target);
        self.vert[w as usize].pos = pu;
        self.vert[u as usize].pos = target as u32;
    }

    fn process(&mut self, s: usize) {
        if self.end[s] - self.start[s] == self.vert.len() {
            self.count_degrees(s);
        } else {
            self.count_neighbors(s);
        }
        if self.touched_classes.is_empty() {
            return;
        }
        // class ids order the splits so that new ids stay canonical
        let mut touched = std::mem::take(&mut self.touched_classes);
        touched.sort_unstable();
        let before = self.num_classes();
        for &c in &touched {
            self.split(c as usize);
        }
        touched.clear();
        self.touched_classes = touched;
        if self.num_classes() > before {
            self.trace.push(self.num_classes());
        }
    }

    /// Counts for the splitter holding every vertex, in one sequential pass.
    fn count_degrees(&mut self, s: usize) {
        for u in 0..self.vert.len() {
            let (lo, hi) = (self.csr.offsets[u], self.csr.offsets[u + 1]);
            let degree = match &self.csr.mults {
                Some(m) => m[lo..hi].iter().map(|&x| x as u32).sum(),
                None => (hi - lo) as u32,
            };
            if degree > 0 {
                self.vert[u].count = degree;
                self.hits[s] += 1;
                self.swap_to(u as u32, self.end[s] - self.hits[s] as usize);
            }
        }
        if self.hits[s] > 0 {
            self.touched_classes.push(s as u32);
        }
    }

    fn count_neighbors(&mut self, s: usize) {
        let mut splitter = std::mem::take(&mut self.splitter);
        splitter.clear();
        splitter.extend_from_slice(&self.elems[self.start[s]..self.end[s]]);
        splitter.sort_unstable();
        for (k, &v) in splitter.iter().enumerate() {
            if let Some(&next) = splitter.get(k + 2) {
                prefetch(&self.csr.targets[self.csr.offsets[next as usize]..]);
            }
            let (lo, hi) = (
                self.csr.offsets[v as usize],
                self.csr.offsets[v as usize + 1],
            );
            for i in lo..hi {
                if let Some(&ahead) = self.csr.targets.get(i + 8) {
                    prefetch(&self.vert[ahead..]);
                }
                let u = self.csr.targets[i] as u32;
                if self.single[u as usize / 64] >> (u % 64) & 1 == 1 {
                    continue;
                }
                let weight = self.csr.mults.as_ref().map_or(1, |m| m[i] as u32);
                let x = &mut self.vert[u as usize];
                x.count += weight;
                if x.count == weight {
                    let c = x.class as usize;
                    if self.hits[c] == 0 {
                        self.touched_classes.push(c as u32);
                    }
                    self.hits[c] += 1;
                    self.swap_to(u, self.end[c] - self.hits[c] as usize);
                }
            }
        }
        self.splitter = splitter;
    }

    /// Splits class `c` by the counts of its hit members, which sit at the
    /// tail of its block; the others have count 0. Resets the counts.
    fn split(&mut self, c: usize) {
        let (st, en) = (self.start[c], self.end[c]);
        let h = self.hits[c] as usize;
        self.hits[c] = 0;
        let tail = en - h;
        let mut keyed = std::mem::take(&mut self.keyed);
        keyed.clear();
        keyed.extend(self.elems[tail..en].iter().map(|&u| {
            let x = &mut self.vert[u as usize];
            let key = (x.count as u64) << 32 | u as u64;
            x.count = 0;
            key
        }));
        let uniform = keyed.iter().all(|&k| k >> 32 == keyed[0] >> 32);
        if h == en - st && uniform {
            self.keyed = keyed;
            return;
        }
        if !uniform {
            sort_by_count(&mut keyed, &mut self.scratch, &mut self.tally);
            for (k, &key) in keyed.iter().enumerate() {
                let u = key as u32;
                self.elems[tail + k] = u;
                self.vert[u as usize].pos = (tail + k) as u32;
            }
        }
        // block boundaries of the fragments, in increasing count order
        let mut bounds = std::mem::take(&mut self.bounds);
        bounds.clear();
        if tail > st {
            bounds.push(st);
        }
        for k in 0..h {
            if k == 0 || keyed[k] >> 32 != keyed[k - 1] >> 32 {
                bounds.push(tail + k);
            }
        }
        bounds.push(en);
        self.keyed = keyed;

        let fragments = bounds.len() - 1;
        let largest = (0..fragments)
            .max_by_key(|&f| (bounds[f + 1] - bounds[f], std::cmp::Reverse(f)))
            .unwrap();
        let was_queued = self.in_queue[c];
        self.end[c] = bounds[1];
        for f in 0..fragments {
            let id = if f == 0 {
                c
            } else {
                let id = self.start.len();
                self.start.push(bounds[f]);
                self.end.push(bounds[f + 1]);
                self.hits.push(0);
                self.in_queue.push(false);
                for p in bounds[f]..bounds[f + 1] {
                    self.vert[self.elems[p] as usize].class = id as u32;
                }
                id
            };
            if bounds[f + 1] - bounds[f] == 1 {
                let v = self.elems[bounds[f]] as usize;
                self.single[v / 64] |= 1 << (v % 64);
            }
            if (was_queued || f != largest) && !self.in_queue[id] {
                self.in_queue[id] = true;
                self.queue.push_back(id as u32);
            }
        }
        self.bounds = bounds;
    }

    fn finish(self) -> (Partition, RefinementTrace) {
        let k = self.num_classes();
        let rounds = self.trace.len() - 1;
        (
            Partition::from_dense(self.vert.iter().map(|x| x.class).collect(), k, rounds),
            RefinementTrace {
                class_counts: self.trace,
            },
        )
    }
}

/// The coarsest equitable partition refining the color classes of `g`.
///
/// The trace records the class count after every engine pass that split
/// something; use [`iterate_refinement`] for per-round counts.
pub fn stable_partition(g: &ColoredGraph) -> (Partition, RefinementTrace) {
    refine_labels(g, g.colors())
}

/// Like [`stable_partition`] but starting from arbitrary vertex labels
/// instead of the graph colors. Labels are ranked by value, so the output
/// is canonical as long as the labels are.
pub fn refine_labels<T: Ord + Copy>(
    g: &ColoredGraph,
    labels: &[T],
) -> (Partition, RefinementTrace) {
    assert_eq!(labels.len(), g.n(), "one label per vertex");
    let (dense, k) = crate::graph::compact_colors(labels);
    let mut engine = Engine::new(g, &dense, k);
    engine.run();
    engine.finish()
}

/// Equitability: monochromatic classes, regular `G[X]` and biregular
/// `G[X,Y]` for all classes, with multiplicity-weighted degrees.
pub fn is_equitable(g: &ColoredGraph, p: &Partition) -> bool {
    if p.n() != g.n() {
        return false;
    }
    let profile = |v: usize| {
        let mut counts: Vec<(usize, u64)> = Vec::new();
        let mut nb: Vec<(usize, u64)> = g
            .adjacency(v)
            .map(|(a, m)| (p.class_of(a), m as u64))
            .collect();
        nb.sort_unstable();
        for (c, m) in nb {
            match counts.last_mut() {
                Some((last, total)) if *last == c => *total += m,
                _ => counts.push((c, m)),
            }
        }
        counts
    };
    p.classes().iter().all(|class| {
        let rep = class.as_slice()[0];
        let expected = profile(rep);
        class
            .iter()
            .skip(1)
            .all(|v| g.color(v) == g.color(rep) && profile(v) == expected)
    })
}

/// True iff color refinement does not distinguish `g` from `h`: in the stable
/// coloring of `g + h`, every class has as many vertices in `g` as in `h`.
pub fn cr_equivalent(g: &ColoredGraph, h: &ColoredGraph) -> bool {
    if g.n() != h.n() {
        return false;
    }
    let union = g.disjoint_union(h);
    let (p, _) = stable_partition(&union);
    class_balance(&p, g.n()).iter().all(|&d| d == 0)
}

/// Per class: (vertices in the first `n`) minus (vertices after).
pub(crate) fn class_balance(p: &Partition, n: usize) -> Vec<i64> {
    let mut balance = vec![0i64; p.num_classes()];
    for v in 0..p.n() {
        balance[p.class_of(v)] += if v < n { 1 } else { -1 };
    }
    balance
}

/// True iff the stable partition consists of singletons only.
pub fn is_discrete(g: &ColoredGraph) -> bool {
    stable_partition(g).0.is_discrete()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, *};
    use crate::graph::GraphBuilder;
    use proptest::prelude::*;

    fn uniform(g: &ColoredGraph) -> Partition {
        Partition::from_colors(g)
    }

    #[test]
    fn step_on_regular_graph_is_unchanged() {
        let c5 = cycle(5).unwrap();
        let p = refine_step(&c5, &uniform(&c5));
        assert_eq!(p.num_classes(), 1);
    }

    #[test]
    fn step_splits_path_and_star() {
        let p3 = path(3).unwrap();
        let p = refine_step(&p3, &uniform(&p3));
        // ends have signature (0,[0]) < middle (0,[0,0])
        assert_eq!(p.labels(), &[0, 1, 0]);
        let star = complete_bipartite(1, 3);
        let p = refine_step(&star, &uniform(&star));
        assert_eq!(p.labels(), &[1, 0, 0, 0]);
    }

    #[test]
    fn complete_graph_is_one_class() {
        for n in 1..8 {
            let (p, _) = stable_partition(&complete(n));
            assert_eq!(p.num_classes(), 1);
        }
    }

    #[test]
    fn triangle_plus_square_vs_heptagon() {
        let a = cycle(3).unwrap().disjoint_union(&cycle(4).unwrap());
        let b = cycle(7).unwrap();
        for g in [&a, &b] {
            let (p, trace) = stable_partition(g);
            assert_eq!(p.sizes(), vec![7]);
            assert_eq!(trace.rounds(), 0);
        }
        assert!(cr_equivalent(&a, &b));
    }

    #[test]
    fn cr_equivalence_basics() {
        assert!(!cr_equivalent(&complete(3), &path(3).unwrap()));
        let g = random_gnp(12, 0.4, 1);
        let h = g.permute(&random_permutation(12, 2));
        assert!(cr_equivalent(&g, &h));
        assert!(!cr_equivalent(&complete(3), &complete(4)));
    }

    #[test]
    fn discreteness() {
        assert!(!is_discrete(&path(4).unwrap()));
        assert!(!is_discrete(&complete(2)));
        let p5 = path(5).unwrap().with_colors(&[1, 0, 0, 0, 0]);
        assert!(is_discrete(&p5));
        assert!(is_discrete(&ColoredGraph::empty(1)));
    }

    #[test]
    fn equitability() {
        let p3 = path(3).unwrap();
        assert!(!is_equitable(&p3, &uniform(&p3)));
        assert!(is_equitable(&p3, &stable_partition(&p3).0));
        // the three-cell partition of K(5,2) by relation to the pair {a,b}
        // and its complement side: {ab,cd}, {ae,be,ce,de}, {ac,ad,bc,bd}
        let pet = petersen(); // vertices are 2-subsets of 0..5 in lex order
        let sets = [
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4),
        ];
        let label = |s: (usize, usize)| match s {
            (0, 1) | (2, 3) => 0,
            (_, 4) => 1,
            _ => 2,
        };
        let labels: Vec<u32> = sets.iter().map(|&s| label(s)).collect();
        let p = Partition::from_labels(&labels);
        assert_eq!(p.sizes(), vec![2, 4, 4]);
        assert!(is_equitable(&pet, &p));
    }

    #[test]
    fn equitability_checks_colors_and_multiplicity() {
        let g = GraphBuilder::new(3)
            .edge_mult(0, 1, 2)
            .edge(1, 2)
            .build()
            .unwrap();
        let p = Partition::from_labels(&[0, 1, 0]);
        assert!(!is_equitable(&g, &p));
        let g2 = GraphBuilder::new(3)
            .edge_mult(0, 1, 2)
            .edge_mult(1, 2, 2)
            .build()
            .unwrap();
        assert!(is_equitable(&g2, &p));
        let colored = complete(2).with_colors(&[0, 1]);
        assert!(!is_equitable(&colored, &Partition::from_labels(&[0, 0])));
    }

    #[test]
    fn multiplicity_refines() {
        // centre 1 joined to 0 twice and to 2 once
        let g = GraphBuilder::new(3)
            .edge_mult(0, 1, 2)
            .edge(1, 2)
            .build()
            .unwrap();
        assert!(is_discrete(&g));
    }

    #[test]
    fn fingerprint_matches_cr_equivalence_on_small_pairs() {
        let graphs: Vec<ColoredGraph> = (0..40).map(|s| random_gnp(6, 0.5, s)).collect();
        for g in &graphs {
            for h in &graphs {
                assert_eq!(cr_fingerprint(g) == cr_fingerprint(h), cr_equivalent(g, h));
            }
        }
        let a = cycle(3).unwrap().disjoint_union(&cycle(4).unwrap());
        assert_eq!(cr_fingerprint(&a), cr_fingerprint(&cycle(7).unwrap()));
        assert_ne!(
            cr_fingerprint(&cycle(6).unwrap()),
            cr_fingerprint(&complete(6))
        );
    }

    #[test]
    fn all_graphs_up_to_eight_vertices_agree_with_iteration() {
        // exhaustive for n <= 6, sampled for 7 and 8
        for n in 1..=6usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = ColoredGraph::from_edges(n, &edges).unwrap();
                let (fast, _) = stable_partition(&g);
                let (slow, _) = iterate_refinement(&g, &uniform(&g));
                assert!(fast.same_cells(&slow), "n={n} mask={mask}");
                assert!(is_equitable(&g, &fast));
            }
        }
        for seed in 0..2000 {
            let n = 7 + (seed % 2) as usize;
            let g = random_gnp(n, 0.5, seed);
            let (fast, _) = stable_partition(&g);
            let (slow, _) = iterate_refinement(&g, &uniform(&g));
            assert!(fast.same_cells(&slow));
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = (ColoredGraph, u64)> {
        (1..=max_n, any::<u64>(), 0.05f64..0.6, 1u32..4).prop_map(|(n, seed, p, colors)| {
            let g = generators::random_gnp(n, p, seed);
            let labels: Vec<u32> = (0..n)
                .map(|v| ((v as u64 * 2654435761) ^ seed) as u32 % colors)
                .collect();
            (g.with_colors(&labels), seed)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn engine_matches_iteration((g, _) in arb_graph(64)) {
            let (fast, trace) = stable_partition(&g);
            let (slow, rounds) = iterate_refinement(&g, &Partition::from_colors(&g));
            prop_assert!(fast.same_cells(&slow));
            prop_assert!(is_equitable(&g, &fast));
            prop_assert!(fast.refines(&Partition::from_colors(&g)));
            prop_assert!(trace.class_counts.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(rounds.class_counts.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(rounds.rounds() < g.n().max(1));
        }

        #[test]
        fn stable_partition_is_a_fixpoint((g, _) in arb_graph(40)) {
            let (p, _) = stable_partition(&g);
            prop_assert!(refine_step(&g, &p).same_cells(&p));
        }

        #[test]
        fn class_ids_are_isomorphism_invariant((g, seed) in arb_graph(40)) {
            let perm = random_permutation(g.n(), seed ^ 0x9e37);
            let h = g.permute(&perm);
            let (pg, _) = stable_partition(&g);
            let (ph, _) = stable_partition(&h);
            let (sg, _) = iterate_refinement(&g, &Partition::from_colors(&g));
            let (sh, _) = iterate_refinement(&h, &Partition::from_colors(&h));
            for v in 0..g.n() {
                prop_assert_eq!(pg.class_of(v), ph.class_of(perm[v]));
                prop_assert_eq!(sg.class_of(v), sh.class_of(perm[v]));
            }
        }
    }
}
