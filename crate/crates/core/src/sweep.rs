//! Membership in the class hierarchy, per graph and over all graphs on `n`
//! vertices.

use serde::Serialize;

use crate::amenability::is_amenable;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fractional::{compact_probe, CompactProbe};
use crate::graph::ColoredGraph;
use crate::io::save;
use crate::oracles::{automorphisms, graphs_up_to_iso, is_godsil, is_tinhofer_bruteforce};
use crate::refinement::{is_discrete, stable_partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompactStatus {
    /// Amenable, hence compact.
    Theorem,
    /// The probe found no non-integral vertex (not a proof).
    NoCounterexampleFound,
    NonCompact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub discrete: bool,
    pub amenable: bool,
    pub compact: CompactStatus,
    pub godsil: bool,
    pub tinhofer: bool,
    pub refinable: bool,
    pub aut_order: usize,
}

impl Membership {
    /// Inclusions of the hierarchy that this membership vector breaks.
    pub fn violations(&self) -> Vec<&'static str> {
        let links = [
            ("discrete => amenable", self.discrete, self.amenable),
            (
                "amenable => no non-compact witness",
                self.amenable,
                self.probe_compact(),
            ),
            ("amenable => godsil", self.amenable, self.godsil),
            ("godsil => tinhofer", self.godsil, self.tinhofer),
            ("tinhofer => refinable", self.tinhofer, self.refinable),
        ];
        links
            .into_iter()
            .filter(|&(_, lhs, rhs)| lhs && !rhs)
            .map(|(name, _, _)| name)
            .collect()
    }

    fn probe_compact(&self) -> bool {
        self.compact != CompactStatus::NonCompact
    }
}

/// Runs every membership test on `g`. The compactness probe runs even for
/// amenable graphs so that the theorem-backed answer is cross-checked.
pub fn classify(
    g: &ColoredGraph,
    trials: usize,
    seed: u64,
    budget: &mut Budget,
) -> Result<Membership> {
    let amenable = is_amenable(g)?.amenable;
    let probe = compact_probe(g, trials, seed);
    let compact = match (&probe, amenable) {
        (CompactProbe::NonCompact { .. }, _) => CompactStatus::NonCompact,
        (_, true) => CompactStatus::Theorem,
        (_, false) => CompactStatus::NoCounterexampleFound,
    };
    let aut = automorphisms(g, budget)?;
    let refinable = stable_partition(g).0.same_cells(&aut.orbits);
    Ok(Membership {
        discrete: is_discrete(g),
        amenable,
        compact,
        godsil: is_godsil(g, budget)?,
        tinhofer: is_tinhofer_bruteforce(g, budget)?.is_none(),
        refinable,
        aut_order: aut.order(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub total: u64,
    pub discrete: u64,
    pub amenable: u64,
    pub probe_compact: u64,
    pub godsil: u64,
    pub tinhofer: u64,
    pub refinable: u64,
}

impl ClassCounts {
    fn add(&mut self, m: &Membership, weight: u64) {
        self.total += weight;
        for (flag, count) in [
            (m.discrete, &mut self.discrete),
            (m.amenable, &mut self.amenable),
            (m.probe_compact(), &mut self.probe_compact),
            (m.godsil, &mut self.godsil),
            (m.tinhofer, &mut self.tinhofer),
            (m.refinable, &mut self.refinable),
        ] {
            if flag {
                *count += weight;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionViolation {
    pub link: &'static str,
    /// The offending graph in the text format.
    pub graph: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub n: usize,
    /// Counts over isomorphism classes.
    pub classes: ClassCounts,
    /// Counts over labeled graphs; each class weighs `n! / |Aut|`.
    pub labeled: ClassCounts,
    pub violations: Vec<InclusionViolation>,
}

/// Classifies one representative per isomorphism class of graphs on `n`
/// vertices and aggregates class and labeled counts.
pub fn sweep(n: usize, trials: usize, seed: u64, budget: &mut Budget) -> Result<SweepReport> {
    if n > 7 {
        return Err(Error::InvalidParameter(format!(
            "sweep supports n <= 7, got {n}"
        )));
    }
    let factorial: u64 = (1..=n as u64).product();
    let mut report = SweepReport {
        n,
        classes: ClassCounts::default(),
        labeled: ClassCounts::default(),
        violations: Vec::new(),
    };
    for g in graphs_up_to_iso(n, budget)? {
        let m = classify(&g, trials, seed, budget)?;
        report.classes.add(&m, 1);
        report.labeled.add(&m, factorial / m.aut_order as u64);
        for link in m.violations() {
            report.violations.push(InclusionViolation {
                link,
                graph: save(&g),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, petersen};

    #[test]
    fn small_sweeps() {
        let mut budget = Budget::default();
        let one = sweep(1, 5, 0, &mut budget).unwrap();
        let c = one.classes;
        assert_eq!(c.total, 1);
        assert!([
            c.discrete,
            c.amenable,
            c.probe_compact,
            c.godsil,
            c.tinhofer,
            c.refinable
        ]
        .iter()
        .all(|&k| k == 1));
        let four = sweep(4, 10, 0, &mut budget).unwrap();
        assert_eq!((four.classes.total, four.labeled.total), (11, 64));
        assert!(four.violations.is_empty());
    }

    #[test]
    fn memberships() {
        let mut budget = Budget::default();
        let k3 = classify(&complete(3), 10, 1, &mut budget).unwrap();
        assert!(k3.amenable && !k3.discrete && k3.compact == CompactStatus::Theorem);
        let c6 = classify(&cycle(6).unwrap(), 10, 1, &mut budget).unwrap();
        assert!(!c6.amenable && c6.compact == CompactStatus::NoCounterexampleFound);
        let p = classify(&petersen(), 5, 1, &mut budget).unwrap();
        assert!(p.godsil && p.tinhofer && p.refinable && p.aut_order == 120);
        assert!(p.violations().is_empty());
    }
}
