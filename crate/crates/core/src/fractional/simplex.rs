//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Tableaux first run over `i128` rationals with checked arithmetic and are
//! rebuilt over big rationals if any entry overflows.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};

/// `rows * x = rhs`, `x >= 0`, with integer coefficients.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<(Vec<(usize, i64)>, i64)>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `sum coeff * x[var] = rhs`; repeated variables are summed.
    pub fn add_row(&mut self, coeffs: Vec<(usize, i64)>, rhs: i64) {
        assert!(coeffs.iter().all(|&(v, _)| v < self.num_vars));
        self.rows.push((coeffs, rhs));
    }

    /// Checks an exact point against every row and `x >= 0`.
    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|(coeffs, rhs)| {
                let lhs: BigRational = coeffs
                    .iter()
                    .map(|&(v, c)| &x[v] * BigRational::from_integer(BigInt::from(c)))
                    .sum();
                lhs == BigRational::from_integer(BigInt::from(*rhs))
            })
    }
}

#[derive(Debug)]
struct Overflow;

type Step<T = ()> = std::result::Result<T, Overflow>;

trait Scalar: Clone + PartialOrd + Debug {
    fn int(x: i64) -> Self;
    fn nil(&self) -> bool;
    fn pos(&self) -> bool;
    fn neg(&self) -> bool;
    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self) -> Step;
    fn div(&self, other: &Self) -> Step<Self>;
    fn big(&self) -> BigRational;
}

type Small = Ratio<i128>;

impl Scalar for Small {
    fn int(x: i64) -> Self {
        Ratio::from_integer(x as i128)
    }
    fn nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) -> Step {
        let p = a.checked_mul(b).ok_or(Overflow)?;
        *self = self.checked_sub(&p).ok_or(Overflow)?;
        Ok(())
    }
    fn div(&self, other: &Self) -> Step<Self> {
        self.checked_div(other).ok_or(Overflow)
    }
    fn big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Scalar for BigRational {
    fn int(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) -> Step {
        *self -= a * b;
        Ok(())
    }
    fn div(&self, other: &Self) -> Step<Self> {
        Ok(self / other)
    }
    fn big(&self) -> BigRational {
        self.clone()
    }
}

/// Degenerate pivots tolerated before falling back to Bland's rule.
const STALL_LIMIT: usize = 50;

#[derive(Debug, Clone)]
struct Tableau<T> {
    num_vars: usize,
    /// Row-major; the last column is the right-hand side.
    t: Vec<Vec<T>>,
    /// Columns including the right-hand side.
    width: usize,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, obj: &mut [T], r: usize, c: usize) -> Step {
        let p = self.t[r][c].clone();
        for x in self.t[r].iter_mut() {
            if !x.nil() {
                *x = x.div(&p)?;
            }
        }
        let support: Vec<usize> = (0..self.width).filter(|&j| !self.t[r][j].nil()).collect();
        let pivot_row = std::mem::take(&mut self.t[r]);
        let eliminate = |row: &mut [T]| -> Step {
            if row[c].nil() {
                return Ok(());
            }
            let f = row[c].clone();
            for &j in &support {
                row[j].sub_mul(&f, &pivot_row[j])?;
            }
            Ok(())
        };
        let mut status = Ok(());
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r && status.is_ok() {
                status = eliminate(row);
            }
        }
        if status.is_ok() {
            status = eliminate(obj);
        }
        self.t[r] = pivot_row;
        self.basis[r] = c;
        status
    }

    /// Minimizes the objective whose reduced costs are `obj`, entering
    /// only columns below `limit`. Returns `false` when unbounded.
    ///
    /// Prices by most negative reduced cost and switches to Bland's rule
    /// once a run of degenerate pivots grows long, which rules out cycling.
    fn optimize(&mut self, obj: &mut [T], limit: usize) -> Step<bool> {
        let rhs = self.width - 1;
        let mut stalled = 0;
        loop {
            let entering = if stalled < STALL_LIMIT {
                (0..limit)
                    .filter(|&j| obj[j].neg())
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if obj[b] <= obj[j] => Some(b),
                        _ => Some(j),
                    })
            } else {
                (0..limit).find(|&j| obj[j].neg())
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(T, usize)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[c].pos() {
                    continue;
                }
                let ratio = row[rhs].div(&row[c])?;
                let better = match &best {
                    None => true,
                    Some((q, b)) => ratio < *q || (ratio == *q && self.basis[i] < self.basis[*b]),
                };
                if better {
                    best = Some((ratio, i));
                }
            }
            let Some((ratio, r)) = best else {
                return Ok(false);
            };
            if ratio.nil() {
                stalled += 1;
            } else if stalled < STALL_LIMIT {
                stalled = 0;
            }
            self.pivot(obj, r, c)?;
        }
    }

    /// Artificial columns are never re-entered, so they are not stored;
    /// an artificial basic in row `i` is recorded as `num_vars + i`.
    fn phase_one(lp: &LinearProgram) -> Step<Option<Self>> {
        let m = lp.rows.len();
        let nv = lp.num_vars;
        let width = nv + 1;
        let mut t = vec![vec![T::int(0); width]; m];
        for (i, (coeffs, rhs)) in lp.rows.iter().enumerate() {
            let sign = if *rhs < 0 { -1 } else { 1 };
            for &(v, c) in coeffs {
                t[i][v].sub_mul(&T::int(-sign), &T::int(c))?;
            }
            t[i][nv] = T::int(sign * rhs);
        }
        let mut s = Tableau {
            num_vars: nv,
            t,
            width,
            basis: (nv..nv + m).collect(),
        };
        // reduced costs of "minimize the sum of artificials"
        let mut obj = vec![T::int(0); width];
        let one = T::int(1);
        for row in &s.t {
            for (o, x) in obj.iter_mut().zip(row) {
                o.sub_mul(&one, x)?;
            }
        }
        s.optimize(&mut obj, nv)?;
        if !obj[nv].nil() {
            return Ok(None);
        }
        // drive artificials out of the basis or drop their redundant rows
        let mut r = 0;
        while r < s.t.len() {
            if s.basis[r] < nv {
                r += 1;
                continue;
            }
            match (0..nv).find(|&j| !s.t[r][j].nil()) {
                Some(c) => {
                    s.pivot(&mut obj, r, c)?;
                    r += 1;
                }
                None => {
                    s.t.remove(r);
                    s.basis.remove(r);
                }
            }
        }
        Ok(Some(s))
    }

    fn minimize(&self, c: &[i64]) -> Step<Vec<BigRational>> {
        let mut s = self.clone();
        let mut obj: Vec<T> = c.iter().map(|&x| T::int(x)).chain([T::int(0)]).collect();
        for (i, row) in s.t.iter().enumerate() {
            let cb = c[s.basis[i]];
            if cb != 0 {
                let f = T::int(cb);
                for (o, x) in obj.iter_mut().zip(row) {
                    if !x.nil() {
                        o.sub_mul(&f, x)?;
                    }
                }
            }
        }
        let bounded = s.optimize(&mut obj, self.num_vars)?;
        assert!(bounded, "objective unbounded on a bounded polytope");
        let mut x = vec![BigRational::zero(); self.num_vars];
        for (row, &b) in s.t.iter().zip(&s.basis) {
            x[b] = row.last().unwrap().big();
        }
        Ok(x)
    }
}

#[derive(Debug, Clone)]
enum Basis {
    Small(Tableau<Small>),
    Big(Tableau<BigRational>),
}

/// A feasible basis of a [`LinearProgram`], reusable for many objectives.
#[derive(Debug, Clone)]
pub struct Simplex {
    lp: LinearProgram,
    basis: Basis,
}

fn big_phase_one(lp: &LinearProgram) -> Option<Tableau<BigRational>> {
    Tableau::<BigRational>::phase_one(lp).unwrap_or_else(|Overflow| unreachable!())
}

impl Simplex {
    /// Phase one with one artificial variable per row. `None` when the
    /// program is infeasible.
    pub fn feasible(lp: &LinearProgram) -> Option<Simplex> {
        let basis = match Tableau::<Small>::phase_one(lp) {
            Ok(found) => Basis::Small(found?),
            Err(Overflow) => Basis::Big(big_phase_one(lp)?),
        };
        Some(Simplex {
            lp: lp.clone(),
            basis,
        })
    }

    /// A basic optimal solution minimizing `c . x` (the feasible region is
    /// assumed bounded).
    pub fn minimize(&self, c: &[i64]) -> Vec<BigRational> {
        assert_eq!(c.len(), self.lp.num_vars);
        let big = match &self.basis {
            Basis::Small(t) => match t.minimize(c) {
                Ok(x) => return x,
                Err(Overflow) => big_phase_one(&self.lp).expect("feasible before"),
            },
            Basis::Big(t) => t.clone(),
        };
        big.minimize(c).unwrap_or_else(|Overflow| unreachable!())
    }
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;

    #[test]
    fn small_programs() {
        // x + y = 1, x - y = 0
        let mut lp = LinearProgram::new(2);
        lp.add_row(vec![(0, 1), (1, 1)], 1);
        lp.add_row(vec![(0, 1), (1, -1)], 0);
        let s = Simplex::feasible(&lp).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(s.minimize(&[1, 0]), vec![half.clone(), half]);

        // x + y = 1, x + y = 2
        let mut lp = LinearProgram::new(2);
        lp.add_row(vec![(0, 1), (1, 1)], 1);
        lp.add_row(vec![(0, 1), (1, 1)], 2);
        assert!(Simplex::feasible(&lp).is_none());

        // x = -1 has no nonnegative solution
        let mut lp = LinearProgram::new(1);
        lp.add_row(vec![(0, 1)], -1);
        assert!(Simplex::feasible(&lp).is_none());
    }

    #[test]
    fn redundant_rows_and_vertex_choice() {
        // x + y + z = 1 twice, minimize different coordinates
        let mut lp = LinearProgram::new(3);
        lp.add_row(vec![(0, 1), (1, 1), (2, 1)], 1);
        lp.add_row(vec![(0, 2), (1, 2), (2, 2)], 2);
        let s = Simplex::feasible(&lp).unwrap();
        for k in 0..3 {
            let mut c = vec![0; 3];
            c[k] = -1;
            let x = s.minimize(&c);
            assert!(lp.satisfied_by(&x));
            assert!(x[k].is_one());
        }
    }

    #[test]
    fn both_arithmetics_agree() {
        // a transportation polytope with a coupling row
        let n = 4;
        let mut lp = LinearProgram::new(n * n);
        for i in 0..n {
            lp.add_row((0..n).map(|j| (i * n + j, 1)).collect(), 1);
            lp.add_row((0..n).map(|j| (j * n + i, 1)).collect(), 1);
        }
        lp.add_row(vec![(0, 3), (5, -2), (10, 1)], 0);
        let small = Tableau::<Small>::phase_one(&lp).unwrap().unwrap();
        let big = big_phase_one(&lp).unwrap();
        for seed in 0..10i64 {
            let c: Vec<i64> = (0..16)
                .map(|k| (k * 7919 + seed * 104729) % 201 - 100)
                .collect();
            let (xs, xb) = (small.minimize(&c).unwrap(), big.minimize(&c).unwrap());
            assert_eq!(xs, xb);
            assert!(lp.satisfied_by(&xs));
        }
    }
}
