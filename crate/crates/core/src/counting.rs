//! Memoized digit recursion for `N_r(p, m, n)`, its `p = 2` and quantum
//! variants, and the degree-graded refinement.
//!
//! Everything reduces to one primitive: the number of ways to write a
//! residual target `T` as `c_1 p + c_2 p^2 + ... + c_k p^k` with `c_i >= 0`.
//! That count is `f_k(T)` below, with `f_0(T) = [T = 0]` and
//! `f_k(T) = sum_{c = 0}^{T / p^k} f_(k-1)(T - c p^k)`.
//! Offsets and constant terms of a [`DigitEquation`] are folded into `T`
//! before the recursion starts, so one memo table (keyed by `(p, k, T)`)
//! serves every equation with the same `p`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::params::{check_index, check_prime, checked_pow, scaled_target};
use crate::{CountParams, CountValue, Error, Result};

/// `t + sum_i (c_i + d_i) p^i = N p^r`, counted over `c in ℕ^r`.
///
/// With `constant = 0` this is exactly the equation whose solution count
/// the functions `N_i` compute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitEquation {
    pub p: u64,
    /// `d_1, ..., d_r`; the length fixes `r`.
    pub offsets: Vec<u64>,
    /// The constant `t` on the left-hand side.
    pub constant: u128,
    /// `N`, so that the right-hand side is `N p^r`.
    pub multiplier: u128,
}

impl DigitEquation {
    pub fn new(p: u64, offsets: Vec<u64>, constant: u128, multiplier: u128) -> Self {
        Self {
            p,
            offsets,
            constant,
            multiplier,
        }
    }

    pub fn r(&self) -> u32 {
        self.offsets.len() as u32
    }

    fn validate(&self) -> Result<()> {
        check_prime(self.p)?;
        if self.offsets.is_empty() {
            return Err(Error::MalformedEquation("no free coefficients".into()));
        }
        if self.offsets.len() > u32::MAX as usize {
            return Err(Error::MalformedEquation("too many coefficients".into()));
        }
        Ok(())
    }

    /// `N p^r - t - sum d_i p^i`, or `None` when negative (no solutions).
    pub fn residual(&self) -> Result<Option<u128>> {
        self.validate()?;
        let too_large = || Error::TooLarge("digit equation");
        let p = self.p as u128;
        let mut lhs = self.constant;
        let mut power = 1u128;
        for &d in &self.offsets {
            power = power.checked_mul(p).ok_or_else(too_large)?;
            lhs = (d as u128)
                .checked_mul(power)
                .and_then(|x| x.checked_add(lhs))
                .ok_or_else(too_large)?;
        }
        let rhs = self.multiplier.checked_mul(power).ok_or_else(too_large)?;
        Ok(rhs.checked_sub(lhs))
    }
}

type PlainKey = (u64, u32, u128);
type GradedKey = (u64, u32, u128, u128);

#[derive(Debug, Default)]
struct Tables {
    plain: HashMap<PlainKey, BigUint>,
    graded: HashMap<GradedKey, BigUint>,
}

/// A memo table that outlives single calls and may be shared across
/// threads. Entries are pure functions of their keys, so sharing never
/// changes a result.
#[derive(Debug, Clone, Default)]
pub struct SharedMemo(Arc<Mutex<Tables>>);

impl SharedMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        let tables = self.0.lock().unwrap();
        tables.plain.len() + tables.graded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug)]
enum Memo {
    Local(Tables),
    Shared(SharedMemo),
}

impl Memo {
    fn get_plain(&self, key: &PlainKey) -> Option<BigUint> {
        match self {
            Memo::Local(t) => t.plain.get(key).cloned(),
            Memo::Shared(s) => s.0.lock().unwrap().plain.get(key).cloned(),
        }
    }

    fn put_plain(&mut self, key: PlainKey, value: BigUint) {
        match self {
            Memo::Local(t) => {
                t.plain.insert(key, value);
            }
            Memo::Shared(s) => {
                s.0.lock().unwrap().plain.insert(key, value);
            }
        }
    }

    fn get_graded(&self, key: &GradedKey) -> Option<BigUint> {
        match self {
            Memo::Local(t) => t.graded.get(key).cloned(),
            Memo::Shared(s) => s.0.lock().unwrap().graded.get(key).cloned(),
        }
    }

    fn put_graded(&mut self, key: GradedKey, value: BigUint) {
        match self {
            Memo::Local(t) => {
                t.graded.insert(key, value);
            }
            Memo::Shared(s) => {
                s.0.lock().unwrap().graded.insert(key, value);
            }
        }
    }
}

/// Counting engine. Each instance owns a memo table unless built with
/// [`Counter::with_shared`].
#[derive(Debug)]
pub struct Counter {
    memo: Memo,
}

impl Default for Counter {
    fn default() -> Self {
        Self::new()
    }
}

impl Counter {
    pub fn new() -> Self {
        Self {
            memo: Memo::Local(Tables::default()),
        }
    }

    pub fn with_shared(memo: SharedMemo) -> Self {
        Self {
            memo: Memo::Shared(memo),
        }
    }

    /// Number of `c in ℕ^k` with `sum_{i=1}^k c_i p^i = target`.
    pub fn coin_count(&mut self, p: u64, k: u32, target: u128) -> BigUint {
        if k == 0 {
            return if target == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let p128 = p as u128;
        if !target.is_multiple_of(p128) {
            return BigUint::zero();
        }
        if k == 1 {
            return BigUint::one();
        }
        let key = (p, k, target);
        if let Some(v) = self.memo.get_plain(&key) {
            return v;
        }
        let top = match p128.checked_pow(k) {
            Some(top) => top,
            // p^k > target: only c_k = 0 contributes.
            None => return self.coin_count(p, k - 1, target),
        };
        // f_k(T) = f_(k-1)(T) + f_(k-1)(T - p^k) + ... is a running sum
        // along T mod p^k, T mod p^k + p^k, ..., T. Resume from the last
        // memoized point of that chain and record every partial sum.
        let mut start = target;
        let mut total = BigUint::zero();
        while let Some(prev) = start.checked_sub(top) {
            if let Some(v) = self.memo.get_plain(&(p, k, prev)) {
                total = v;
                break;
            }
            start = prev;
        }
        let mut point = start;
        loop {
            total += self.coin_count(p, k - 1, point);
            self.memo.put_plain((p, k, point), total.clone());
            if point == target {
                break;
            }
            point += top;
        }
        total
    }

    /// Like [`Counter::coin_count`] with the extra constraint
    /// `c_1 + ... + c_k = parts`.
    pub fn graded_coin_count(&mut self, p: u64, k: u32, target: u128, parts: u128) -> BigUint {
        if k == 0 {
            return if target == 0 && parts == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let p128 = p as u128;
        if !target.is_multiple_of(p128) {
            return BigUint::zero();
        }
        // every coin is at least p
        match parts.checked_mul(p128) {
            Some(least) if least <= target => {}
            _ => return BigUint::zero(),
        }
        if k == 1 {
            return if target / p128 == parts {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let top = match p128.checked_pow(k) {
            Some(top) => top,
            None => return self.graded_coin_count(p, k - 1, target, parts),
        };
        // ... and at most p^k
        if let Some(most) = parts.checked_mul(top) {
            if most < target {
                return BigUint::zero();
            }
        }
        let key = (p, k, target, parts);
        if let Some(v) = self.memo.get_graded(&key) {
            return v;
        }
        // Running sum along (T - c p^k, parts - c), as in `coin_count`.
        let (mut start, mut start_parts) = (target, parts);
        let mut total = BigUint::zero();
        while let (Some(prev), Some(prev_parts)) = (start.checked_sub(top), start_parts.checked_sub(1)) {
            if let Some(v) = self.memo.get_graded(&(p, k, prev, prev_parts)) {
                total = v;
                break;
            }
            start = prev;
            start_parts = prev_parts;
        }
        let (mut point, mut point_parts) = (start, start_parts);
        loop {
            total += self.graded_coin_count(p, k - 1, point, point_parts);
            self.memo.put_graded((p, k, point, point_parts), total.clone());
            if point == target {
                break;
            }
            point += top;
            point_parts += 1;
        }
        total
    }

    pub fn count_digit_equation(&mut self, eq: &DigitEquation) -> Result<CountValue> {
        Ok(match eq.residual()? {
            Some(target) => self.coin_count(eq.p, eq.r(), target),
            None => BigUint::zero(),
        })
    }

    /// `N_r(p, m, n)` for odd `p`.
    pub fn n_classical(&mut self, params: &CountParams) -> Result<CountValue> {
        require_odd(params.p(), "n_classical")?;
        let (p, r, m, n) = (params.p(), params.r(), params.m(), params.n());
        if (m ^ n) & 1 == 1 {
            return Ok(BigUint::zero());
        }
        let rhs = scaled_target(p, r, n)?;
        if m as u128 > rhs {
            return Ok(BigUint::zero());
        }
        if m % 2 == 0 {
            self.even_branch(p, r, m as u128 / 2, n as u128 / 2)
        } else {
            self.odd_branch(p, r, (rhs - m as u128) / 2)
        }
    }

    /// Both weights even: `m' + b_1 + (a_1 + b_2) p + ... + a_r p^r = n' p^r`.
    ///
    /// `m'` is expanded in base `p`; digits `d_0 .. d_r` become the constant
    /// and offsets of a digit equation, higher digits are moved to the
    /// right-hand side.
    fn even_branch(&mut self, p: u64, r: u32, m_half: u128, n_half: u128) -> Result<CountValue> {
        let digits = base_p_digits(m_half, p);
        let digit = |i: usize| digits.get(i).copied().unwrap_or(0);
        let r_us = r as usize;

        let mut high = 0u128;
        for j in (r_us + 1..digits.len()).rev() {
            high = high
                .checked_mul(p as u128)
                .and_then(|h| h.checked_add(digits[j] as u128))
                .ok_or(Error::TooLarge("base-p expansion"))?;
        }
        // `high` is the digit tail divided by p^r, with the factor p^r
        // on the right-hand side cancelled.
        let high = high.checked_mul(p as u128).ok_or(Error::TooLarge("base-p expansion"))?;
        let Some(multiplier) = n_half.checked_sub(high) else {
            return Ok(BigUint::zero());
        };

        let mut total = BigUint::zero();
        for b in b_tuples(r) {
            let mut offsets: Vec<u64> = (1..r_us).map(|i| digit(i) + b[i] as u64).collect();
            offsets.push(digit(r_us));
            let constant = digit(0) as u128 + b[0] as u128;
            total += self.count_digit_equation(&DigitEquation::new(p, offsets, constant, multiplier))?;
        }
        Ok(total)
    }

    /// Both weights odd. `half_residual = (n p^r - m) / 2` must equal
    /// `b_1 + (a_1 + b_2) p + ... + a_r p^r`; it is balanced against the
    /// next multiple of `p^r` to obtain digit equations.
    fn odd_branch(&mut self, p: u64, r: u32, half_residual: u128) -> Result<CountValue> {
        let top = checked_pow(p, r)?;
        let multiplier = half_residual.div_ceil(top);
        let slack = multiplier * top - half_residual;
        let mut total = BigUint::zero();
        for b in b_tuples(r) {
            let mut offsets: Vec<u64> = b[1..].iter().map(|&x| x as u64).collect();
            offsets.push(0);
            let constant = slack + b[0] as u128;
            total += self.count_digit_equation(&DigitEquation::new(p, offsets, constant, multiplier))?;
        }
        Ok(total)
    }

    /// The odd-weight step exactly as printed in the source algorithm:
    /// rerun the even branch with `m' = (m+1)/2` and `n' = (n+p^r)/2`.
    ///
    /// This does not balance the defining equation and is kept only so it
    /// can be audited against the enumeration oracle.
    pub fn printed_odd_branch(&mut self, params: &CountParams) -> Result<CountValue> {
        require_odd(params.p(), "printed_odd_branch")?;
        let (p, r, m, n) = (params.p(), params.r(), params.m(), params.n());
        if m % 2 == 0 || n % 2 == 0 {
            return Err(Error::MalformedEquation(
                "printed odd branch needs odd m and odd n".into(),
            ));
        }
        let top = checked_pow(p, r)?;
        let n_prime = (n as u128 + top) / 2;
        self.even_branch(p, r, (m as u128).div_ceil(2), n_prime)
    }

    /// `N_r(2, m, n)`: solutions of `m + 2a_1 + 4a_2 + ... + 2^r a_r = 2^r n`.
    pub fn n_classical_p2(&mut self, params: &CountParams) -> Result<CountValue> {
        if params.p() != 2 {
            return Err(Error::WrongCharacteristic {
                operation: "n_classical_p2",
                expected: "p = 2",
                p: params.p(),
            });
        }
        let eq = DigitEquation::new(
            2,
            vec![0; params.r() as usize],
            params.m() as u128,
            params.n() as u128,
        );
        self.count_digit_equation(&eq)
    }

    /// `N_r(p, m, n)` for any prime, dispatching on `p = 2`.
    pub fn multiplicity(&mut self, params: &CountParams) -> Result<CountValue> {
        if params.p() == 2 {
            self.n_classical_p2(params)
        } else {
            self.n_classical(params)
        }
    }

    /// `N'_r(p, n)`: solutions `(a_0..a_r, b_1..b_r)` of
    /// `(a_0 + b_1) + p (a_1 + b_2) + ... + p^r a_r = (n/2) p^r`.
    ///
    /// Multiplying through by `p` turns `a_0` into an ordinary coefficient
    /// of `p^1`, so this is a digit equation with `r + 1` coefficients.
    pub fn n_quantum(&mut self, p: u64, r: u32, n: u64) -> Result<CountValue> {
        check_prime(p)?;
        require_odd(p, "n_quantum")?;
        check_index(r)?;
        if n % 2 == 1 {
            return Ok(BigUint::zero());
        }
        let mut total = BigUint::zero();
        for b in b_tuples(r) {
            let mut offsets: Vec<u64> = b.iter().map(|&x| x as u64).collect();
            offsets.push(0);
            let eq = DigitEquation::new(p, offsets, 0, n as u128 / 2);
            total += self.count_digit_equation(&eq)?;
        }
        Ok(total)
    }

    /// Solutions of the defining equation in cohomological degree `d`,
    /// where the degree is `2 sum a_i + sum b_j` (`p` odd) or `sum a_i`
    /// (`p = 2`).
    pub fn graded_count(&mut self, params: &CountParams, d: u64) -> Result<CountValue> {
        let (p, r, m, n) = (params.p(), params.r(), params.m(), params.n());
        let rhs = scaled_target(p, r, n)?;
        let Some(residual) = rhs.checked_sub(m as u128) else {
            return Ok(BigUint::zero());
        };
        if p == 2 {
            return Ok(self.graded_coin_count(2, r, residual, d as u128));
        }
        if residual % 2 == 1 {
            return Ok(BigUint::zero());
        }
        let mut total = BigUint::zero();
        for b in b_tuples(r) {
            let ones = b.iter().filter(|&&x| x == 1).count() as u64;
            let Some(rest) = d.checked_sub(ones) else { continue };
            if rest % 2 == 1 {
                continue;
            }
            if let Some(target) = odd_coin_target(p, residual, &b)? {
                total += self.graded_coin_count(p, r, target, rest as u128 / 2);
            }
        }
        Ok(total)
    }
}

fn require_odd(p: u64, operation: &'static str) -> Result<()> {
    if p == 2 {
        Err(Error::WrongCharacteristic {
            operation,
            expected: "an odd prime",
            p,
        })
    } else {
        check_prime(p)
    }
}

/// Coin target `(residual - 2 b_1 - 2 sum b_(i+1) p^i) / 2` for the
/// a-variables once the b-variables are fixed; `residual = n p^r - m`.
fn odd_coin_target(p: u64, residual: u128, b: &[u8]) -> Result<Option<u128>> {
    let mut used = 0u128;
    let mut power = 1u128;
    for &bit in b {
        if bit == 1 {
            used = used.checked_add(2 * power).ok_or(Error::TooLarge("b-part"))?;
        }
        power = power.checked_mul(p as u128).ok_or(Error::TooLarge("b-part"))?;
    }
    Ok(residual.checked_sub(used).map(|t| t / 2))
}

/// Least significant digit first.
pub fn base_p_digits(mut x: u128, p: u64) -> Vec<u64> {
    let mut digits = Vec::new();
    while x > 0 {
        digits.push((x % p as u128) as u64);
        x /= p as u128;
    }
    digits
}

/// All of `{0,1}^r` in lexicographic order.
pub fn b_tuples(r: u32) -> impl Iterator<Item = Vec<u8>> {
    let r = r as usize;
    assert!(r < 64, "2^{r} exterior choices is not enumerable");
    (0u64..1 << r).map(move |mask| (0..r).map(|i| ((mask >> (r - 1 - i)) & 1) as u8).collect())
}

/// Largest cohomological degree any solution for `params` can have.
pub fn degree_bound(params: &CountParams) -> Result<u64> {
    let (p, r, n) = (params.p(), params.r(), params.n());
    let rhs = scaled_target(p, r, n)?;
    let bound = if p == 2 {
        rhs / 2
    } else {
        rhs / p as u128 + r as u128
    };
    u64::try_from(bound).map_err(|_| Error::TooLarge("degree bound"))
}

pub fn count_digit_equation(eq: &DigitEquation) -> Result<CountValue> {
    Counter::new().count_digit_equation(eq)
}

pub fn n_classical(params: &CountParams) -> Result<CountValue> {
    Counter::new().n_classical(params)
}

pub fn n_classical_p2(params: &CountParams) -> Result<CountValue> {
    Counter::new().n_classical_p2(params)
}

pub fn multiplicity(params: &CountParams) -> Result<CountValue> {
    Counter::new().multiplicity(params)
}

pub fn n_quantum(p: u64, r: u32, n: u64) -> Result<CountValue> {
    Counter::new().n_quantum(p, r, n)
}

pub fn graded_count(params: &CountParams, d: u64) -> Result<CountValue> {
    Counter::new().graded_count(params, d)
}
