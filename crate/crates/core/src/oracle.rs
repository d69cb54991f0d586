//! Brute-force enumeration of solution tuples.
//!
//! Nested bounded loops over the variables in lexicographic order, each
//! bounded by what is left of the (doubled) right-hand side. Nothing here
//! shares code with [`crate::counting`].

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::params::{check_index, check_prime, scaled_target};
use crate::{CountParams, CountValue, Error, Result};

/// Refuse counts expected to exceed this many tuples unless forced.
pub const FORCE_THRESHOLD: u64 = 10_000_000;

/// Receives `(a0, a, b)` for each quantum solution.
type QuantumVisitor<'a> = dyn FnMut(u64, &[u64], &[u8]) + 'a;

/// One lattice point of a defining equation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SolutionTuple {
    /// Present only for quantum tuples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<u64>,
    pub a: Vec<u64>,
    /// Empty when `p = 2`.
    pub b: Vec<u8>,
}

impl SolutionTuple {
    /// `2 sum a + sum b` for odd `p`, `sum a` for `p = 2`.
    ///
    /// Quantum tuples include `a_0` in the sum of `a`.
    pub fn degree(&self) -> u64 {
        let a: u64 = self.a.iter().sum::<u64>() + self.a0.unwrap_or(0);
        let b: u64 = self.b.iter().map(|&x| x as u64).sum();
        if self.b.is_empty() && self.a0.is_none() {
            a
        } else {
            2 * a + b
        }
    }

    /// Substitutes into the doubled classical equation
    /// `m + 2b_1 + 2 sum_i p^i (a_i + b_(i+1)) = n p^r` (odd `p`) or
    /// `m + sum_i 2^i a_i = 2^r n` (`p = 2`).
    pub fn satisfies(&self, params: &CountParams) -> bool {
        let (p, r) = (params.p() as u128, params.r() as usize);
        if self.a0.is_some() || self.a.len() != r {
            return false;
        }
        let mut lhs = params.m() as u128;
        if p == 2 {
            if !self.b.is_empty() {
                return false;
            }
            for (i, &a) in self.a.iter().enumerate() {
                lhs += a as u128 * 2u128.pow(i as u32 + 1);
            }
        } else {
            if self.b.len() != r || self.b.iter().any(|&x| x > 1) {
                return false;
            }
            for i in 0..r {
                lhs += 2 * self.b[i] as u128 * p.pow(i as u32);
                lhs += 2 * self.a[i] as u128 * p.pow(i as u32 + 1);
            }
        }
        lhs == params.n() as u128 * p.pow(r as u32)
    }

    /// Doubled quantum equation `2 sum_{i=0}^r p^i a_i + 2 sum_{i=1}^r p^(i-1) b_i = n p^r`.
    pub fn satisfies_quantum(&self, p: u64, r: u32, n: u64) -> bool {
        let (p, r) = (p as u128, r as usize);
        let Some(a0) = self.a0 else { return false };
        if self.a.len() != r || self.b.len() != r || self.b.iter().any(|&x| x > 1) {
            return false;
        }
        let mut lhs = 2 * a0 as u128;
        for i in 0..r {
            lhs += 2 * self.b[i] as u128 * p.pow(i as u32);
            lhs += 2 * self.a[i] as u128 * p.pow(i as u32 + 1);
        }
        lhs == n as u128 * p.pow(r as u32)
    }
}

/// Oracle configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Oracle {
    /// Run even when the expected tuple count exceeds [`FORCE_THRESHOLD`].
    pub force: bool,
}

impl Oracle {
    pub fn forced() -> Self {
        Self { force: true }
    }

    fn admit(&self, estimated: f64) -> Result<()> {
        if !self.force && estimated > FORCE_THRESHOLD as f64 {
            Err(Error::OracleRefused {
                estimated: estimated as u64,
                threshold: FORCE_THRESHOLD,
            })
        } else {
            Ok(())
        }
    }

    pub fn enumerate_solutions(&self, params: &CountParams) -> Result<Vec<SolutionTuple>> {
        self.admit(estimate_tuples(params))?;
        let mut out = Vec::new();
        let shape = Shape::classical(params)?;
        shape.walk(None, &mut |a, b| {
            let t = SolutionTuple {
                a0: None,
                a: a.to_vec(),
                b: b.to_vec(),
            };
            assert!(t.satisfies(params), "oracle emitted a non-solution {t:?}");
            out.push(t);
        });
        Ok(out)
    }

    /// Streaming count; never materializes tuples.
    pub fn brute_count(&self, params: &CountParams) -> Result<CountValue> {
        self.admit(estimate_tuples(params))?;
        let shape = Shape::classical(params)?;
        let mut count = 0u64;
        shape.walk(None, &mut |_, _| count += 1);
        Ok(BigUint::from(count))
    }

    /// [`Oracle::brute_count`] split over the outermost variable `a_1`.
    pub fn brute_count_parallel(&self, params: &CountParams) -> Result<CountValue> {
        self.admit(estimate_tuples(params))?;
        let shape = Shape::classical(params)?;
        let outer = shape.bound(0, shape.rhs);
        let Some(outer) = outer else {
            return Ok(BigUint::from(0u32));
        };
        let count: u64 = (0..=outer)
            .into_par_iter()
            .map(|a1| {
                let mut count = 0u64;
                shape.walk(Some(a1), &mut |_, _| count += 1);
                count
            })
            .sum();
        Ok(BigUint::from(count))
    }

    /// Solutions whose cohomological degree equals `d`.
    pub fn brute_graded(&self, params: &CountParams, d: u64) -> Result<CountValue> {
        Ok(BigUint::from(
            self.degree_histogram(params)?.get(d as usize).copied().unwrap_or(0),
        ))
    }

    /// Number of solutions in each degree, indexed by degree.
    pub fn degree_histogram(&self, params: &CountParams) -> Result<Vec<u64>> {
        self.admit(estimate_tuples(params))?;
        let shape = Shape::classical(params)?;
        let odd = params.p() != 2;
        let mut hist = Vec::new();
        shape.walk(None, &mut |a, b| {
            let sa: u64 = a.iter().sum();
            let d = if odd {
                2 * sa + b.iter().map(|&x| x as u64).sum::<u64>()
            } else {
                sa
            } as usize;
            if hist.len() <= d {
                hist.resize(d + 1, 0);
            }
            hist[d] += 1;
        });
        Ok(hist)
    }

    pub fn enumerate_quantum(&self, p: u64, r: u32, n: u64) -> Result<Vec<SolutionTuple>> {
        let mut out = Vec::new();
        self.walk_quantum(p, r, n, &mut |a0, a, b| {
            let t = SolutionTuple {
                a0: Some(a0),
                a: a.to_vec(),
                b: b.to_vec(),
            };
            assert!(t.satisfies_quantum(p, r, n), "oracle emitted a non-solution {t:?}");
            out.push(t);
        })?;
        Ok(out)
    }

    pub fn brute_quantum(&self, p: u64, r: u32, n: u64) -> Result<CountValue> {
        let mut count = 0u64;
        self.walk_quantum(p, r, n, &mut |_, _, _| count += 1)?;
        Ok(BigUint::from(count))
    }

    fn walk_quantum(
        &self,
        p: u64,
        r: u32,
        n: u64,
        visit: &mut QuantumVisitor,
    ) -> Result<()> {
        check_prime(p)?;
        check_index(r)?;
        if p == 2 {
            return Err(Error::WrongCharacteristic {
                operation: "brute_quantum",
                expected: "an odd prime",
                p,
            });
        }
        self.admit(estimate_quantum(p, r, n))?;
        let rhs = scaled_target(p, r, n)?;
        // a_0 is the coefficient of p^0: one extra leading a-variable.
        let shape = Shape {
            p: p as u128,
            r: r as usize + 1,
            first_power: 0,
            scale: 2,
            rhs: Some(rhs),
            b_count: r as usize,
        };
        shape.walk(None, &mut |a, b| visit(a[0], &a[1..], b));
        Ok(())
    }
}

/// Loop nest for `sum_i scale p^(first_power + i) a_i + sum_j 2 p^(j-1) b_j = rhs`.
struct Shape {
    p: u128,
    r: usize,
    first_power: u32,
    /// 2 in the doubled odd-p equations, 1 for `p = 2`.
    scale: u128,
    /// `None` when the right-hand side is already negative.
    rhs: Option<u128>,
    b_count: usize,
}

impl Shape {
    fn classical(params: &CountParams) -> Result<Shape> {
        let rhs = scaled_target(params.p(), params.r(), params.n())?;
        let even = params.p() == 2;
        Ok(Shape {
            p: params.p() as u128,
            r: params.r() as usize,
            first_power: 1,
            scale: if even { 1 } else { 2 },
            rhs: rhs.checked_sub(params.m() as u128),
            b_count: if even { 0 } else { params.r() as usize },
        })
    }

    fn weight(&self, i: usize) -> u128 {
        self.scale * self.p.pow(self.first_power + i as u32)
    }

    /// Largest value of `a_(i+1)` when `remaining` is left.
    fn bound(&self, i: usize, remaining: Option<u128>) -> Option<u64> {
        remaining.map(|rem| (rem / self.weight(i)) as u64)
    }

    fn walk(&self, fixed_first: Option<u64>, visit: &mut dyn FnMut(&[u64], &[u8])) {
        let Some(rhs) = self.rhs else { return };
        let mut a = vec![0u64; self.r];
        let mut b = vec![0u8; self.b_count];
        self.walk_a(0, rhs, fixed_first, &mut a, &mut b, visit);
    }

    fn walk_a(
        &self,
        i: usize,
        remaining: u128,
        fixed_first: Option<u64>,
        a: &mut [u64],
        b: &mut [u8],
        visit: &mut dyn FnMut(&[u64], &[u8]),
    ) {
        if i == self.r {
            self.walk_b(0, remaining, a, b, visit);
            return;
        }
        let w = self.weight(i);
        let hi = (remaining / w) as u64;
        let range = match (i, fixed_first) {
            (0, Some(v)) if v <= hi => v..=v,
            (0, Some(_)) => return,
            _ => 0..=hi,
        };
        for v in range {
            a[i] = v;
            self.walk_a(i + 1, remaining - v as u128 * w, None, a, b, visit);
        }
        a[i] = 0;
    }

    fn walk_b(
        &self,
        j: usize,
        remaining: u128,
        a: &[u64],
        b: &mut [u8],
        visit: &mut dyn FnMut(&[u64], &[u8]),
    ) {
        if j == self.b_count {
            if remaining == 0 {
                visit(a, b);
            }
            return;
        }
        let w = 2 * self.p.pow(j as u32);
        for v in 0..=1u8 {
            if v == 1 && w > remaining {
                break;
            }
            b[j] = v;
            self.walk_b(j + 1, remaining - v as u128 * w, a, b, visit);
        }
        b[j] = 0;
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Continuous estimate of the number of solutions of the classical equation.
pub fn estimate_tuples(params: &CountParams) -> f64 {
    let (p, r) = (params.p() as f64, params.r());
    let rhs = params.n() as f64 * p.powi(r as i32) - params.m() as f64;
    if rhs < 0.0 {
        return 0.0;
    }
    let (target, b_choices) = if params.p() == 2 {
        (rhs, 1.0)
    } else {
        (rhs / 2.0, 2f64.powi(r as i32))
    };
    // lattice points of sum_{i=1}^r c_i p^i = target
    let weights: f64 = (1..=r).map(|i| p.powi(i as i32)).product();
    let simplex = target.powi(r as i32 - 1) / (factorial(r - 1) * weights) * p;
    b_choices * simplex.max(1.0)
}

pub fn estimate_quantum(p: u64, r: u32, n: u64) -> f64 {
    let p = p as f64;
    let target = n as f64 * p.powi(r as i32) / 2.0;
    let weights: f64 = (0..=r).map(|i| p.powi(i as i32)).product();
    let simplex = target.powi(r as i32) / (factorial(r) * weights);
    2f64.powi(r as i32) * simplex.max(1.0)
}

pub fn enumerate_solutions(params: &CountParams) -> Result<Vec<SolutionTuple>> {
    Oracle::default().enumerate_solutions(params)
}

pub fn brute_count(params: &CountParams) -> Result<CountValue> {
    Oracle::default().brute_count(params)
}

pub fn brute_quantum(p: u64, r: u32, n: u64) -> Result<CountValue> {
    Oracle::default().brute_quantum(p, r, n)
}

pub fn brute_graded(params: &CountParams, d: u64) -> Result<CountValue> {
    Oracle::default().brute_graded(params, d)
}
