//! Weight characters assembled from the multiplicities.
//!
//! Weights are integers in units of the fundamental weight ω; the simple
//! root is α = 2ω, so α-weights show up as even integers. All reported
//! weights are untwisted: the Frobenius twist only rescales every weight by
//! `p^r` and carries no combinatorial information.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::Counter;
use crate::params::{check_index, check_prime, checked_pow};
use crate::{decimal, CountParams, CountValue, Error, Result};

/// A finitely supported map from weights to nonnegative multiplicities.
///
/// `trunc` records the largest output weight `n` summed when the character
/// is a truncation of an infinite series; `None` means the character is
/// exact. Truncated characters are lower bounds coefficient by coefficient,
/// not exact values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WireCharacter", try_from = "WireCharacter")]
pub struct CharacterPoly {
    coeffs: BTreeMap<i64, BigUint>,
    trunc: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct WireCharacter {
    unit: String,
    trunc: Option<u64>,
    coeffs: BTreeMap<i64, String>,
}

impl From<CharacterPoly> for WireCharacter {
    fn from(c: CharacterPoly) -> Self {
        WireCharacter {
            unit: "omega".into(),
            trunc: c.trunc,
            coeffs: c.coeffs.into_iter().map(|(w, v)| (w, v.to_string())).collect(),
        }
    }
}

impl TryFrom<WireCharacter> for CharacterPoly {
    type Error = Error;

    fn try_from(w: WireCharacter) -> Result<Self> {
        if w.unit != "omega" {
            return Err(Error::Parse(format!("unsupported weight unit {:?}", w.unit)));
        }
        let mut coeffs = BTreeMap::new();
        for (weight, text) in w.coeffs {
            let value = decimal::parse(&text).map_err(Error::Parse)?;
            if value.is_zero() {
                return Err(Error::Parse(format!("zero coefficient stored at weight {weight}")));
            }
            coeffs.insert(weight, value);
        }
        Ok(CharacterPoly {
            coeffs,
            trunc: w.trunc,
        })
    }
}

impl CharacterPoly {
    /// The exact zero character.
    pub fn zero() -> Self {
        Self::default()
    }

    /// An empty series truncated at `bound`.
    pub fn truncated(bound: u64) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            trunc: Some(bound),
        }
    }

    pub fn monomial(weight: i64, coeff: CountValue) -> Self {
        let mut c = Self::zero();
        c.add_term(weight, &coeff);
        c
    }

    pub fn trunc(&self) -> Option<u64> {
        self.trunc
    }

    pub fn with_trunc(mut self, trunc: Option<u64>) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn add_term(&mut self, weight: i64, coeff: &BigUint) {
        if coeff.is_zero() {
            return;
        }
        *self.coeffs.entry(weight).or_default() += coeff;
    }

    pub fn coeff(&self, weight: i64) -> BigUint {
        self.coeffs.get(&weight).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigUint)> + '_ {
        self.coeffs.iter().map(|(&w, c)| (w, c))
    }

    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of all coefficients; the dimension for an exact character.
    pub fn mass(&self) -> BigUint {
        self.coeffs.values().sum()
    }

    /// Invariant under `w -> -w` (the Weyl group of `SL_2`).
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&w, c)| self.coeffs.get(&-w) == Some(c))
    }

    pub fn scaled(&self, factor: &BigUint) -> Self {
        if factor.is_zero() {
            return Self::zero().with_trunc(self.trunc);
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&w, c)| (w, c * factor)).collect(),
            trunc: self.trunc,
        }
    }

    /// `self - other`, failing if any coefficient would go negative.
    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&w, c) in &other.coeffs {
            let mine = out.coeffs.get(&w).cloned().unwrap_or_default();
            if mine < *c {
                return Err(Error::NegativeCoefficient(w));
            }
            let rest = mine - c;
            if rest.is_zero() {
                out.coeffs.remove(&w);
            } else {
                out.coeffs.insert(w, rest);
            }
        }
        Ok(out)
    }

    /// Coefficient-wise equality of two series with the same truncation.
    pub fn same_series(&self, other: &Self) -> Result<bool> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(self.coeffs == other.coeffs)
    }

    /// Canonical JSON: `{"unit":"omega","trunc":N,"coeffs":{"<w>":"<count>"}}`
    /// with weights ascending.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("character serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// The sum of two characters is truncated at the smaller of their bounds.
impl Add<&CharacterPoly> for CharacterPoly {
    type Output = CharacterPoly;

    fn add(mut self, rhs: &CharacterPoly) -> CharacterPoly {
        for (&w, c) in &rhs.coeffs {
            self.add_term(w, c);
        }
        self.trunc = match (self.trunc, rhs.trunc) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

impl Add for CharacterPoly {
    type Output = CharacterPoly;

    fn add(self, rhs: CharacterPoly) -> CharacterPoly {
        self + &rhs
    }
}

impl fmt::Display for CharacterPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (w, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·e({w}ω)")?;
        }
        if let Some(t) = self.trunc {
            write!(f, " [n ≤ {t}]")?;
        }
        Ok(())
    }
}

/// Characters indexed by cohomological degree, up to an explicit bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedCharacter {
    by_degree: BTreeMap<u64, CharacterPoly>,
    bound: u64,
}

impl GradedCharacter {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn degree(&self, d: u64) -> Result<CharacterPoly> {
        if d > self.bound {
            return Err(Error::BeyondTruncation {
                degree: d,
                bound: self.bound,
            });
        }
        Ok(self.by_degree.get(&d).cloned().unwrap_or_default())
    }

    /// Nonzero degrees in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &CharacterPoly)> + '_ {
        self.by_degree.iter().map(|(&d, c)| (d, c))
    }

    /// All degrees summed into one (exact, untruncated in n) character.
    pub fn total(&self) -> CharacterPoly {
        self.by_degree
            .values()
            .fold(CharacterPoly::zero(), |acc, c| acc + c)
    }
}

/// `ch H⁰(nω) = e(nω) + e((n-2)ω) + ... + e(-nω)`.
pub fn weyl_char_sl2(n: u64) -> CharacterPoly {
    let n = n as i64;
    let mut c = CharacterPoly::zero();
    for w in (-n..=n).step_by(2) {
        c.add_term(w, &BigUint::one());
    }
    c
}

fn base_params(p: u64, r: u32, m: u64) -> Result<CountParams> {
    CountParams::new(p, r, m, 0)
}

/// `sum_{n <= n_max} N_r(p, m, n) e(nω)`: the character of `H(B_r, mω)`.
pub fn char_br(p: u64, r: u32, m: u64, n_max: u64) -> Result<CharacterPoly> {
    let params = base_params(p, r, m)?;
    let mut counter = Counter::new();
    let mut out = CharacterPoly::truncated(n_max);
    for n in 0..=n_max {
        let c = counter.multiplicity(&params.with_n(n))?;
        out.add_term(n as i64, &c);
    }
    Ok(out)
}

/// `sum_{n <= n_max} N_r(p, m, n) ch H⁰(nω)`: the character of
/// `H(G_r, H⁰(mω))`, truncated.
pub fn char_gr(p: u64, r: u32, m: u64, n_max: u64) -> Result<CharacterPoly> {
    let params = base_params(p, r, m)?;
    let mut counter = Counter::new();
    let mut out = CharacterPoly::truncated(n_max);
    for n in 0..=n_max {
        let c = counter.multiplicity(&params.with_n(n))?;
        if !c.is_zero() {
            out = out + weyl_char_sl2(n).scaled(&c);
        }
    }
    Ok(out)
}

/// Degree-wise `B_r` character: degree `d` holds
/// `sum_n #{solutions of degree d for weight n} e(nω)`.
pub fn graded_char_br(p: u64, r: u32, m: u64, d_max: u64) -> Result<GradedCharacter> {
    let params = base_params(p, r, m)?;
    let top = checked_pow(p, r)?;
    let mut counter = Counter::new();
    let mut by_degree = BTreeMap::new();
    for d in 0..=d_max {
        // n p^r <= m + d p^r for any solution in degree d
        let n_hi = u64::try_from(m as u128 / top + d as u128)
            .map_err(|_| Error::TooLarge("weight bound"))?;
        let mut c = CharacterPoly::zero();
        for n in 0..=n_hi {
            c.add_term(n as i64, &counter.graded_count(&params.with_n(n), d)?);
        }
        if !c.is_zero() {
            by_degree.insert(d, c);
        }
    }
    Ok(GradedCharacter {
        by_degree,
        bound: d_max,
    })
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `dim H^d(U_r, k)` for `d = 0..=d_max`.
///
/// For odd `p` this counts `(a, b) in ℕ^r × {0,1}^r` with
/// `2 sum a + sum b = d`; for `p = 2` it is `C(d + r - 1, r - 1)`.
pub fn poincare_ur(p: u64, r: u32, d_max: u64) -> Result<Vec<CountValue>> {
    check_prime(p)?;
    check_index(r)?;
    let r = r as u64;
    Ok((0..=d_max)
        .map(|d| {
            if p == 2 {
                binomial(d + r - 1, r - 1)
            } else {
                (0..=r.min(d))
                    .filter(|j| (d - j) % 2 == 0)
                    .map(|j| binomial(r, j) * binomial((d - j) / 2 + r - 1, r - 1))
                    .sum()
            }
        })
        .collect())
}

/// `sum_{n <= n_max} N'_r(p, n) e(nα)`, with `nα = 2n ω`.
///
/// The root of unity order only rescales weights and cancels from the
/// counts.
pub fn char_quantum_br(p: u64, r: u32, n_max: u64) -> Result<CharacterPoly> {
    let mut counter = Counter::new();
    let mut out = CharacterPoly::truncated(2 * n_max);
    for n in 0..=n_max {
        let c = counter.n_quantum(p, r, n)?;
        out.add_term(2 * n as i64, &c);
    }
    Ok(out)
}

/// `sum_{n <= n_max} N'_r(p, n) ch H⁰(nα)`.
pub fn char_quantum_gr(p: u64, r: u32, n_max: u64) -> Result<CharacterPoly> {
    let mut counter = Counter::new();
    let mut out = CharacterPoly::truncated(2 * n_max);
    for n in 0..=n_max {
        let c = counter.n_quantum(p, r, n)?;
        if !c.is_zero() {
            out = out + weyl_char_sl2(2 * n).scaled(&c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn poly(entries: &[(i64, u64)], trunc: Option<u64>) -> CharacterPoly {
        let mut c = CharacterPoly::zero().with_trunc(trunc);
        for &(w, v) in entries {
            c.add_term(w, &BigUint::from(v));
        }
        c
    }

    #[test]
    fn weyl_characters() {
        assert_eq!(weyl_char_sl2(0), poly(&[(0, 1)], None));
        assert_eq!(weyl_char_sl2(2), poly(&[(-2, 1), (0, 1), (2, 1)], None));
        let five = weyl_char_sl2(5);
        assert_eq!(five.support(), vec![-5, -3, -1, 1, 3, 5]);
        assert_eq!(five.mass(), BigUint::from(6u32));
    }

    #[test]
    fn br_examples() {
        let c = char_br(3, 2, 0, 10).unwrap();
        for n in 0..=10u64 {
            let expected = if n % 2 == 0 { n + 1 } else { 0 };
            assert_eq!(c.coeff(n as i64), BigUint::from(expected));
        }
        assert_eq!(c.trunc(), Some(10));
        assert_eq!(char_br(3, 1, 0, 2).unwrap(), poly(&[(0, 1), (2, 1)], Some(2)));
        // m > n_max p^r
        assert!(char_br(3, 1, 100, 5).unwrap().is_zero());
    }

    #[test]
    fn gr_examples() {
        assert_eq!(
            char_gr(3, 2, 0, 2).unwrap(),
            poly(&[(-2, 3), (0, 4), (2, 3)], Some(2))
        );
        assert_eq!(char_gr(5, 3, 0, 0).unwrap(), poly(&[(0, 1)], Some(0)));
        let params = CountParams::new(3, 2, 1, 0).unwrap();
        let n1 = oracle::brute_count(&params.with_n(1)).unwrap();
        let n3 = oracle::brute_count(&params.with_n(3)).unwrap();
        let expected = (weyl_char_sl2(1).scaled(&n1) + weyl_char_sl2(3).scaled(&n3)).with_trunc(Some(3));
        assert_eq!(char_gr(3, 2, 1, 3).unwrap(), expected);
    }

    #[test]
    fn graded_br_examples() {
        let g = graded_char_br(3, 1, 0, 2).unwrap();
        assert_eq!(g.degree(0).unwrap(), poly(&[(0, 1)], None));
        assert!(g.degree(1).unwrap().is_zero());
        assert_eq!(g.degree(2).unwrap(), poly(&[(2, 1)], None));
        assert_eq!(
            g.degree(3),
            Err(Error::BeyondTruncation { degree: 3, bound: 2 })
        );
        // m divisible by 2 p^r: only the zero tuple in degree 0
        let g = graded_char_br(3, 2, 36, 0).unwrap();
        assert_eq!(g.degree(0).unwrap(), poly(&[(4, 1)], None));
    }

    #[test]
    fn graded_regroups_to_br() {
        let n_cap = 6;
        for p in [2u64, 3, 5] {
            for r in 1..=2 {
                for m in 0..5 {
                    let params = CountParams::new(p, r, m, n_cap).unwrap();
                    let d_max = crate::counting::degree_bound(&params).unwrap();
                    let total = graded_char_br(p, r, m, d_max).unwrap().total();
                    let br = char_br(p, r, m, n_cap).unwrap();
                    for w in 0..=n_cap as i64 {
                        assert_eq!(total.coeff(w), br.coeff(w), "p={p} r={r} m={m} w={w}");
                    }
                }
            }
        }
    }

    #[test]
    fn poincare_examples() {
        let odd = poincare_ur(3, 1, 6).unwrap();
        assert!(odd.iter().all(|c| c.is_one()));
        assert_eq!(poincare_ur(5, 2, 2).unwrap()[2], BigUint::from(3u32));
        assert_eq!(poincare_ur(2, 3, 4).unwrap()[4], BigUint::from(15u32));
    }

    #[test]
    fn poincare_odd_matches_enumeration() {
        for r in 1..=3u32 {
            let series = poincare_ur(7, r, 12).unwrap();
            let mut counts = vec![0u64; 13];
            let mut stack = vec![(0usize, 0u64)];
            // walk (a_i, b_i) pairs, each contributing 2a + b to the degree
            while let Some((i, deg)) = stack.pop() {
                if i == r as usize {
                    counts[deg as usize] += 1;
                    continue;
                }
                for b in 0..=1 {
                    let mut a = 0;
                    while deg + 2 * a + b <= 12 {
                        stack.push((i + 1, deg + 2 * a + b));
                        a += 1;
                    }
                }
            }
            let counts: Vec<BigUint> = counts.into_iter().map(BigUint::from).collect();
            assert_eq!(series, counts, "r={r}");
        }
    }

    #[test]
    fn quantum_characters() {
        assert_eq!(
            char_quantum_br(3, 1, 2).unwrap(),
            poly(&[(0, 1), (4, 3)], Some(4))
        );
        assert_eq!(char_quantum_gr(3, 1, 0).unwrap(), poly(&[(0, 1)], Some(0)));
        let gr = char_quantum_gr(5, 2, 5).unwrap();
        assert!(gr.is_symmetric());
        let br = char_quantum_br(5, 2, 7).unwrap();
        assert!(br.support().iter().all(|w| w % 4 == 0));
    }

    #[test]
    fn json_is_canonical() {
        let c = poly(&[(10, 2), (-2, 1), (2, 7)], Some(10));
        assert_eq!(
            c.to_json(),
            r#"{"unit":"omega","trunc":10,"coeffs":{"-2":"1","2":"7","10":"2"}}"#
        );
        assert_eq!(CharacterPoly::from_json(&c.to_json()).unwrap(), c);
        assert!(CharacterPoly::from_json(r#"{"unit":"alpha","trunc":null,"coeffs":{}}"#).is_err());
        assert!(CharacterPoly::from_json(r#"{"unit":"omega","trunc":1,"coeffs":{"0":"0"}}"#).is_err());
        assert!(CharacterPoly::from_json(r#"{"unit":"omega","trunc":1,"coeffs":{"0":"-3"}}"#).is_err());
    }

    #[test]
    fn truncated_comparison_requires_equal_bounds() {
        let a = char_br(3, 2, 0, 4).unwrap();
        let b = char_br(3, 2, 0, 6).unwrap();
        assert_eq!(a.same_series(&b), Err(Error::TruncationMismatch(Some(4), Some(6))));
        assert_eq!(a.same_series(&a.clone()), Ok(true));
    }

    #[test]
    fn subtraction_refuses_negative_results() {
        let a = poly(&[(0, 1)], None);
        let b = poly(&[(0, 2)], None);
        assert_eq!(a.checked_sub(&b), Err(Error::NegativeCoefficient(0)));
        assert!(b.checked_sub(&b).unwrap().is_zero());
    }

    fn arb_poly() -> impl Strategy<Value = CharacterPoly> {
        prop::collection::btree_map(-40i64..40, 0u64..u64::MAX, 0..12)
            .prop_map(|m| poly(&m.into_iter().collect::<Vec<_>>(), None))
    }

    proptest! {
        #[test]
        fn add_then_subtract_is_identity(x in arb_poly(), y in arb_poly()) {
            let sum = x.clone() + &y;
            prop_assert_eq!(sum.checked_sub(&y).unwrap(), x);
        }

        #[test]
        fn json_round_trip(x in arb_poly(), t in prop::option::of(0u64..1000)) {
            let x = x.with_trunc(t);
            prop_assert_eq!(CharacterPoly::from_json(&x.to_json()).unwrap(), x);
        }
    }
}
