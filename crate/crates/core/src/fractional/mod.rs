//! Fractional isomorphisms: doubly stochastic `X` with `A X = X B`.
//!
//! Everything is exact. The polytope of fractional isomorphisms from `G`
//! to `H` is written as an equality system over one variable per allowed
//! vertex pair, either all same-color pairs or only the pairs sharing a
//! class of the stable coloring of `G + H` (every fractional isomorphism
//! vanishes outside those blocks, so both systems describe the same set).

mod simplex;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::rng;
use crate::graph::ColoredGraph;
use crate::refinement::stable_partition;

pub use simplex::{LinearProgram, Simplex};

/// Dense square matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix {
            n,
            entries: vec![BigRational::zero(); n * n],
        }
    }

    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zeros(perm.len());
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(
                "matrix rows must have length n".into(),
            ));
        }
        Ok(RatMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        self.entries[i * self.n + j] = x;
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        let n = self.n;
        self.entries.iter().all(|x| !x.is_negative())
            && (0..n).all(|i| (0..n).map(|j| self.get(i, j)).sum::<BigRational>().is_one())
            && (0..n).all(|j| (0..n).map(|i| self.get(i, j)).sum::<BigRational>().is_one())
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    /// The permutation `i -> j` with `X[i][j] = 1`, if `X` is a permutation matrix.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if !self.is_doubly_stochastic() || !self.is_integral() {
            return None;
        }
        Some(
            (0..self.n)
                .map(|i| (0..self.n).find(|&j| self.get(i, j).is_one()).unwrap())
                .collect(),
        )
    }

    /// `A_G X = X A_H`, with multiplicities.
    pub fn intertwines(&self, g: &ColoredGraph, h: &ColoredGraph) -> bool {
        let n = self.n;
        if g.n() != n || h.n() != n {
            return false;
        }
        (0..n).all(|u| {
            (0..n).all(|v| {
                let left: BigRational = g
                    .adjacency(u)
                    .map(|(w, m)| self.get(w, v) * BigRational::from_integer(BigInt::from(m)))
                    .sum();
                let right: BigRational = h
                    .adjacency(v)
                    .map(|(w, m)| self.get(u, w) * BigRational::from_integer(BigInt::from(m)))
                    .sum();
                left == right
            })
        })
    }

    /// Fractional isomorphism from `g` to `h`: doubly stochastic, zero
    /// between differently colored vertices, and intertwining.
    pub fn is_fractional_isomorphism(&self, g: &ColoredGraph, h: &ColoredGraph) -> bool {
        self.n == g.n()
            && self.is_doubly_stochastic()
            && self.intertwines(g, h)
            && (0..self.n)
                .all(|u| (0..self.n).all(|v| self.get(u, v).is_zero() || g.color(u) == h.color(v)))
    }
}

/// Rows of `p/q` entries separated by spaces.
impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        rows.serialize(ser)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockMode {
    /// One variable per pair of equally colored vertices.
    InputColors,
    /// One variable per pair in a common class of the stable coloring of `G + H`.
    StablePartition,
}

/// The equality system of the fractional isomorphisms from `G` to `H`.
#[derive(Debug, Clone)]
pub struct FracIsoPolytope {
    n: usize,
    /// `(u, v)` for each variable.
    pub vars: Vec<(usize, usize)>,
    pub lp: LinearProgram,
}

impl FracIsoPolytope {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    fn matrix(&self, x: &[BigRational]) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.n);
        for (&(u, v), value) in self.vars.iter().zip(x) {
            m.set(u, v, value.clone());
        }
        m
    }
}

pub fn build_polytope(
    g: &ColoredGraph,
    h: &ColoredGraph,
    mode: BlockMode,
) -> Result<FracIsoPolytope> {
    let n = g.n();
    if h.n() != n {
        return Err(Error::SizeMismatch(n, h.n()));
    }
    let allowed: Box<dyn Fn(usize, usize) -> bool> = match mode {
        BlockMode::InputColors => Box::new(|u, v| g.color(u) == h.color(v)),
        BlockMode::StablePartition => {
            let (p, _) = stable_partition(&g.disjoint_union(h));
            Box::new(move |u, v| p.class_of(u) == p.class_of(n + v))
        }
    };
    let mut index = vec![usize::MAX; n * n];
    let mut vars = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if allowed(u, v) {
                index[u * n + v] = vars.len();
                vars.push((u, v));
            }
        }
    }
    let var = |u: usize, v: usize| Some(index[u * n + v]).filter(|&i| i != usize::MAX);
    let mut lp = LinearProgram::new(vars.len());
    for u in 0..n {
        lp.add_row(
            (0..n).filter_map(|v| var(u, v)).map(|i| (i, 1)).collect(),
            1,
        );
    }
    for v in 0..n {
        lp.add_row(
            (0..n).filter_map(|u| var(u, v)).map(|i| (i, 1)).collect(),
            1,
        );
    }
    // (A X)[u][v] - (X B)[u][v] = 0
    for u in 0..n {
        for v in 0..n {
            let mut row: Vec<(usize, i64)> = g
                .adjacency(u)
                .filter_map(|(w, m)| var(w, v).map(|i| (i, m as i64)))
                .collect();
            row.extend(
                h.adjacency(v)
                    .filter_map(|(w, m)| var(u, w).map(|i| (i, -(m as i64)))),
            );
            if !row.is_empty() {
                lp.add_row(row, 0);
            }
        }
    }
    Ok(FracIsoPolytope { n, vars, lp })
}

/// Feasibility of the fractional isomorphism system over same-color pairs,
/// decided by phase one of the simplex method.
pub fn is_fractionally_isomorphic(g: &ColoredGraph, h: &ColoredGraph) -> bool {
    match build_polytope(g, h, BlockMode::InputColors) {
        Ok(poly) => Simplex::feasible(&poly.lp).is_some(),
        Err(_) => false,
    }
}

/// Polytope with a feasible basis, ready for repeated vertex queries.
pub struct VertexSampler {
    poly: FracIsoPolytope,
    basis: Simplex,
}

impl VertexSampler {
    /// `None` when the polytope is empty.
    pub fn new(poly: FracIsoPolytope) -> Option<Self> {
        let basis = Simplex::feasible(&poly.lp)?;
        Some(VertexSampler { poly, basis })
    }

    pub fn polytope(&self) -> &FracIsoPolytope {
        &self.poly
    }

    /// The vertex minimizing `c`, one coefficient per variable.
    pub fn vertex(&self, c: &[i64]) -> RatMatrix {
        let x = self.basis.minimize(c);
        debug_assert!(self.poly.lp.satisfied_by(&x));
        self.poly.matrix(&x)
    }

    /// The vertex minimizing a random objective with integer coefficients
    /// in `[-1000, 1000]` drawn from `rng`.
    pub fn random_vertex(&self, rng: &mut impl Rng) -> RatMatrix {
        let c: Vec<i64> = (0..self.poly.num_vars())
            .map(|_| rng.gen_range(-1000..=1000))
            .collect();
        self.vertex(&c)
    }
}

/// A vertex of the polytope optimal for a random objective seeded by `seed`.
pub fn extreme_point(poly: &FracIsoPolytope, seed: u64) -> Option<RatMatrix> {
    let sampler = VertexSampler::new(poly.clone())?;
    Some(sampler.random_vertex(&mut rng(seed)))
}

/// `trials` vertices of the fractional automorphism polytope of `g` for
/// random objectives from one generator seeded by `seed`.
pub fn sample_vertices(g: &ColoredGraph, trials: usize, seed: u64) -> Vec<RatMatrix> {
    let poly = build_polytope(g, g, BlockMode::StablePartition).expect("same size");
    let sampler = VertexSampler::new(poly).expect("the identity is feasible");
    let mut rng = rng(seed);
    (0..trials)
        .map(|_| sampler.random_vertex(&mut rng))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CompactProbe {
    /// Every sampled vertex was a permutation matrix. Not a proof of
    /// compactness.
    NoCounterexampleFound { trials: usize },
    /// A verified non-integral vertex of the fractional automorphism polytope.
    NonCompact { trial: usize, witness: RatMatrix },
}

/// Searches for a non-integral vertex of the fractional automorphism
/// polytope of `g` with `trials` random objectives. A witness is
/// re-verified before it is returned.
pub fn compact_probe(g: &ColoredGraph, trials: usize, seed: u64) -> CompactProbe {
    let poly = build_polytope(g, g, BlockMode::StablePartition).expect("same size");
    let sampler = VertexSampler::new(poly).expect("the identity is feasible");
    let mut rng = rng(seed);
    for trial in 0..trials {
        let x = sampler.random_vertex(&mut rng);
        if !x.is_integral() {
            assert!(
                x.is_fractional_isomorphism(g, g),
                "simplex returned an infeasible point"
            );
            return CompactProbe::NonCompact { trial, witness: x };
        }
    }
    CompactProbe::NoCounterexampleFound { trials }
}

/// Perfect matching in the support of `x` by augmenting paths.
fn support_matching(x: &RatMatrix) -> Option<Vec<usize>> {
    let n = x.n();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    fn augment(
        x: &RatMatrix,
        row: usize,
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..x.n() {
            if x.get(row, col).is_zero() || seen[col] {
                continue;
            }
            seen[col] = true;
            if match_col[col].is_none_or(|r| augment(x, r, seen, match_col)) {
                match_col[col] = Some(row);
                return true;
            }
        }
        false
    }
    for row in 0..n {
        if !augment(x, row, &mut vec![false; n], &mut match_col) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (col, row) in match_col.into_iter().enumerate() {
        perm[row?] = col;
    }
    Some(perm)
}

/// Writes a doubly stochastic matrix as a convex combination of
/// permutation matrices, `X = sum c_i P_i`, `P_i[j][perm_i[j]] = 1`.
pub fn birkhoff_decompose(x: &RatMatrix) -> Result<Vec<(BigRational, Vec<usize>)>> {
    if !x.is_doubly_stochastic() {
        return Err(Error::NotDoublyStochastic);
    }
    let n = x.n();
    let mut rest = x.clone();
    let mut remaining = BigRational::one();
    let mut terms = Vec::new();
    while remaining.is_positive() {
        let perm = support_matching(&rest)
            .expect("a scaled doubly stochastic matrix has a perfect matching");
        let c = (0..n).map(|i| rest.get(i, perm[i]).clone()).min().unwrap();
        for (i, &j) in perm.iter().enumerate() {
            let e = rest.get(i, j) - &c;
            rest.set(i, j, e);
        }
        remaining -= &c;
        terms.push((c, perm));
    }
    Ok(terms)
}

/// `sum c_i P_i`.
pub fn recompose(terms: &[(BigRational, Vec<usize>)]) -> RatMatrix {
    let n = terms.first().map_or(0, |t| t.1.len());
    let mut m = RatMatrix::zeros(n);
    for (c, perm) in terms {
        for (i, &j) in perm.iter().enumerate() {
            let e = m.get(i, j) + c;
            m.set(i, j, e);
        }
    }
    m
}
