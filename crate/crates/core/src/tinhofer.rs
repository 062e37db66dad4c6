//! Tinhofer's individualization-refinement isomorphism procedure.
//!
//! Both graphs are refined jointly. If the class histograms differ the
//! answer is "non-isomorphic"; if all classes are singletons on both sides
//! the induced bijection is checked edge by edge; otherwise one vertex of
//! each graph from a common class receives a fresh color and the loop
//! repeats. No backtracking ever happens, so the procedure can fail on
//! isomorphic inputs unless the first graph is a Tinhofer graph.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::rng;
use crate::graph::ColoredGraph;
use crate::refinement::{class_balance, refine_labels, Partition};

/// One individualization: `u` in the first graph and `v` in the second get
/// the fresh color. `class` is the class id in the joint stable coloring
/// at the time of the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IndividualizationStep {
    pub round: usize,
    pub class: usize,
    pub u: usize,
    pub v: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Lowest class id, lowest vertex on each side.
    Deterministic,
    /// Uniform class, then uniform vertices, from a seeded generator.
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// A verified isomorphism, `map[u]` is the image of `u`.
    Isomorphic(Vec<usize>),
    NonIsomorphic(Rejection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rejection {
    /// Vertex counts differ.
    Size,
    /// The joint stable coloring has different class histograms.
    Histogram,
    /// All classes became singletons but the bijection is not an isomorphism.
    FinalMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoResult {
    pub verdict: Verdict,
    pub transcript: Vec<IndividualizationStep>,
}

impl IsoResult {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self.verdict, Verdict::Isomorphic(_))
    }

    pub fn isomorphism(&self) -> Option<&[usize]> {
        match &self.verdict {
            Verdict::Isomorphic(map) => Some(map),
            Verdict::NonIsomorphic(_) => None,
        }
    }
}

/// Classes of the joint coloring with at least two vertices in each graph.
/// The coloring must be balanced, so a class of size four or more qualifies.
pub(crate) fn branching_classes(p: &Partition) -> impl Iterator<Item = usize> + '_ {
    (0..p.num_classes()).filter(move |&c| p.class(c).len() > 2)
}

/// Outcome of refining a joint labeling of `g + h`.
pub(crate) enum Joint {
    Rejected(Rejection),
    Mapped(Vec<usize>),
    Open(Partition),
}

pub(crate) fn settle(
    union: &ColoredGraph,
    g: &ColoredGraph,
    h: &ColoredGraph,
    labels: &[u32],
) -> Joint {
    let n = g.n();
    let (p, _) = refine_labels(union, labels);
    if class_balance(&p, n).iter().any(|&d| d != 0) {
        return Joint::Rejected(Rejection::Histogram);
    }
    if p.num_classes() < n {
        return Joint::Open(p);
    }
    let map: Vec<usize> = (0..n)
        .map(|u| p.class(p.class_of(u)).as_slice()[1] - n)
        .collect();
    if g.is_isomorphism(h, &map) {
        Joint::Mapped(map)
    } else {
        Joint::Rejected(Rejection::FinalMap)
    }
}

/// Joint labels with `u` (first graph) and `v` (second graph) individualized.
pub(crate) fn individualize(p: &Partition, n: usize, u: usize, v: usize) -> Vec<u32> {
    let mut labels = p.labels().to_vec();
    let fresh = p.num_classes() as u32;
    labels[u] = fresh;
    labels[n + v] = fresh;
    labels
}

fn run<F>(g: &ColoredGraph, h: &ColoredGraph, mut choose: F) -> Result<IsoResult>
where
    F: FnMut(usize, &Partition) -> Result<IndividualizationStep>,
{
    let mut transcript = Vec::new();
    if g.n() != h.n() {
        return Ok(IsoResult {
            verdict: Verdict::NonIsomorphic(Rejection::Size),
            transcript,
        });
    }
    let n = g.n();
    let union = g.disjoint_union(h);
    let mut labels = union.colors().to_vec();
    loop {
        let verdict = match settle(&union, g, h, &labels) {
            Joint::Rejected(why) => Verdict::NonIsomorphic(why),
            Joint::Mapped(map) => Verdict::Isomorphic(map),
            Joint::Open(p) => {
                let step = choose(transcript.len(), &p)?;
                labels = individualize(&p, n, step.u, step.v);
                transcript.push(step);
                continue;
            }
        };
        return Ok(IsoResult {
            verdict,
            transcript,
        });
    }
}

/// Runs the procedure on `g` and `h` with the given choice policy.
pub fn tinhofer_iso(g: &ColoredGraph, h: &ColoredGraph, policy: Policy) -> IsoResult {
    let n = g.n();
    let mut rng = rng(match policy {
        Policy::Deterministic => 0,
        Policy::SeededRandom(seed) => seed,
    });
    let result = run(g, h, |round, p| {
        let candidates: Vec<usize> = branching_classes(p).collect();
        let class = match policy {
            Policy::Deterministic => candidates[0],
            Policy::SeededRandom(_) => *candidates.choose(&mut rng).unwrap(),
        };
        let members = p.class(class).as_slice();
        let split = members.partition_point(|&w| w < n);
        let (left, right) = members.split_at(split);
        let (u, v) = match policy {
            Policy::Deterministic => (left[0], right[0]),
            Policy::SeededRandom(_) => (
                left[rng.gen_range(0..left.len())],
                right[rng.gen_range(0..right.len())],
            ),
        };
        Ok(IndividualizationStep {
            round,
            class,
            u,
            v: v - n,
        })
    });
    result.expect("built-in policies always make valid choices")
}

/// Re-runs the procedure with the choices of a recorded transcript.
///
/// Fails if a step does not name two vertices of one branching class, or
/// if the transcript ends while the procedure still needs a choice.
pub fn replay(
    g: &ColoredGraph,
    h: &ColoredGraph,
    steps: &[IndividualizationStep],
) -> Result<IsoResult> {
    let n = g.n();
    run(g, h, |round, p| {
        let step = *steps.get(round).ok_or_else(|| {
            Error::InvalidParameter(format!("transcript ends before step {round}"))
        })?;
        let valid = step.u < n
            && step.v < n
            && step.class < p.num_classes()
            && p.class(step.class).len() > 2
            && p.class_of(step.u) == step.class
            && p.class_of(n + step.v) == step.class;
        if !valid {
            return Err(Error::InvalidParameter(format!(
                "step {round} is not a valid choice"
            )));
        }
        Ok(IndividualizationStep { round, ..step })
    })
}

/// Canonical vertex order produced by deterministic individualization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    /// `position[v]` is the canonical index of vertex `v`.
    pub position: Vec<usize>,
    /// `order[i]` is the vertex placed at index `i`.
    pub order: Vec<usize>,
    #[serde(skip)]
    pub graph: ColoredGraph,
}

impl CanonicalForm {
    /// Row-major canonical adjacency matrix with multiplicities, then the
    /// canonical color sequence.
    pub fn bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.graph.adjacency_matrix().concat();
        for &c in self.graph.colors() {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }
}

/// Refines `g`, then repeatedly individualizes the lowest vertex of the
/// lowest-id non-singleton class until the partition is discrete.
///
/// For Tinhofer graphs isomorphic inputs give identical canonical graphs.
/// For other graphs the result is some ordering without that guarantee.
pub fn canonical_form(g: &ColoredGraph) -> CanonicalForm {
    let mut labels = g.colors().to_vec();
    let p = loop {
        let (p, _) = refine_labels(g, &labels);
        let Some(class) = (0..p.num_classes()).find(|&c| p.class(c).len() > 1) else {
            break p;
        };
        labels = p.labels().to_vec();
        labels[p.class(class).as_slice()[0]] = p.num_classes() as u32;
    };
    let position: Vec<usize> = p.labels().iter().map(|&c| c as usize).collect();
    let mut order = vec![0; g.n()];
    for (v, &i) in position.iter().enumerate() {
        order[i] = v;
    }
    CanonicalForm {
        graph: g.permute(&position),
        position,
        order,
    }
}
