//! The reduced ring `H(B_r, k)_red` as a free module over
//! `R = k[x_1^(p^(r-1)), x_2^(p^(r-2)), ..., x_r]`.
//!
//! Monomials `x_1^a_1 ... x_r^a_r` of the reduced ring are exactly the
//! solutions of `a_1 + a_2 p + ... + a_r p^(r-1) ≡ 0 (mod p^(r-1))`. Reducing
//! each `a_i` modulo `p^(r-i)` splits such a monomial uniquely into an
//! `R`-monomial times a basis element.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::params::{check_index, check_prime};
use crate::{CountValue, Error, Result};

/// Cohomological degree of each polynomial generator `x_i`.
pub fn generator_degree(p: u64) -> u64 {
    if p == 2 {
        1
    } else {
        2
    }
}

/// The finite basis of the reduced ring over `R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedBasis {
    pub p: u64,
    pub r: u32,
    /// Exponent sequences `(a_1, ..., a_(r-1))`, sorted lexicographically.
    pub elements: Vec<Vec<u64>>,
    pub generator_degree: u64,
}

impl ReducedBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, exps: &[u64]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(exps)).is_ok()
    }

    /// Degree of a basis element.
    pub fn degree(&self, exps: &[u64]) -> u64 {
        self.generator_degree * exps.iter().sum::<u64>()
    }

    /// `[[a_1, ..., a_(r-1)], ...]`, lexicographic.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.elements).expect("basis serialization cannot fail")
    }

    pub fn from_json(p: u64, r: u32, text: &str) -> Result<Self> {
        let mut elements: Vec<Vec<u64>> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        elements.sort();
        Ok(Self {
            p,
            r,
            elements,
            generator_degree: generator_degree(p),
        })
    }
}

/// `p^(r-i)` for `i = 1..=r`: the exponent of `x_i` generating `R`.
pub fn ring_exponents(p: u64, r: u32) -> Result<Vec<u64>> {
    (1..=r)
        .map(|i| p.checked_pow(r - i).ok_or(Error::TooLarge("p^(r-i)")))
        .collect()
}

/// Whether `a_1 + a_2 p + ... + a_k p^(k-1) ≡ 0 (mod p^(r-1))`.
pub fn satisfies_congruence(p: u64, r: u32, exps: &[u64]) -> bool {
    let modulus = (p as u128).pow(r - 1);
    let mut power = 1u128;
    let mut acc = 0u128;
    for &a in exps {
        acc = (acc + (a as u128 % modulus) * power) % modulus;
        power = power * p as u128 % modulus;
    }
    acc == 0
}

pub fn basis(p: u64, r: u32) -> Result<ReducedBasis> {
    check_prime(p)?;
    check_index(r)?;
    let bounds = ring_exponents(p, r)?;
    let mut elements = Vec::new();
    if r == 1 {
        elements.push(Vec::new());
    } else {
        // a_2..a_(r-1) range freely; a_1 < p^(r-1) is then forced by the
        // congruence.
        let modulus = bounds[0] as u128;
        let free = &bounds[1..r as usize - 1];
        let mut tail = vec![0u64; free.len()];
        loop {
            let mut weight = 0u128;
            let mut power = p as u128;
            for &a in &tail {
                weight = (weight + a as u128 * power) % modulus;
                power = power * p as u128 % modulus;
            }
            let a1 = ((modulus - weight) % modulus) as u64;
            let mut e = Vec::with_capacity(r as usize - 1);
            e.push(a1);
            e.extend_from_slice(&tail);
            elements.push(e);

            // odometer over the free box
            let mut i = 0;
            while i < tail.len() {
                tail[i] += 1;
                if tail[i] < free[i] {
                    break;
                }
                tail[i] = 0;
                i += 1;
            }
            if i == tail.len() {
                break;
            }
        }
    }
    elements.sort();
    Ok(ReducedBasis {
        p,
        r,
        elements,
        generator_degree: generator_degree(p),
    })
}

/// Split a monomial of the reduced ring into `(R-exponents, basis element)`:
/// `a_i = q_i p^(r-i) + s_i` with `0 <= s_i < p^(r-i)`, so the `R`-monomial
/// is `prod (x_i^(p^(r-i)))^q_i` and the basis element is `(s_1..s_(r-1))`.
pub fn factor(p: u64, r: u32, exps: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    if exps.len() != r as usize {
        return Err(Error::Parse(format!("expected {r} exponents, got {}", exps.len())));
    }
    if !satisfies_congruence(p, r, exps) {
        return Err(Error::Parse(format!("{exps:?} is not a monomial of the reduced ring")));
    }
    let bounds = ring_exponents(p, r)?;
    let quotients = exps.iter().zip(&bounds).map(|(a, m)| a / m).collect();
    let remainders = exps[..r as usize - 1]
        .iter()
        .zip(&bounds)
        .map(|(a, m)| a % m)
        .collect();
    Ok((quotients, remainders))
}

/// Hilbert series coefficients `dim H^d(B_r, k)_red` for `d = 0..=d_max`,
/// counted directly: solutions of the congruence with `g (a_1 + ... + a_r) = d`.
pub fn hilbert_coeffs(p: u64, r: u32, d_max: u64) -> Result<Vec<CountValue>> {
    check_prime(p)?;
    check_index(r)?;
    let g = generator_degree(p);
    let parts = (d_max / g) as usize;
    let modulus = (p as u128)
        .checked_pow(r - 1)
        .and_then(|m| usize::try_from(m).ok())
        .ok_or(Error::TooLarge("p^(r-1)"))?;

    // table[s][res]: tuples of the variables seen so far with coordinate
    // sum s and weighted sum ≡ res.
    let mut table = vec![vec![BigUint::zero(); modulus]; parts + 1];
    table[0][0] = BigUint::one();
    let mut weight = 1usize % modulus;
    for _ in 0..r {
        // unbounded knapsack step for one more variable
        for s in 1..=parts {
            for res in 0..modulus {
                let from = (res + modulus - weight) % modulus;
                let add = table[s - 1][from].clone();
                table[s][res] += add;
            }
        }
        weight = weight * p as usize % modulus;
    }
    Ok((0..=d_max)
        .map(|d| {
            if d % g == 0 {
                table[(d / g) as usize][0].clone()
            } else {
                BigUint::zero()
            }
        })
        .collect())
}

/// Power-series quotient `num / den` to `len` terms; `den[0]` must be 1.
pub fn series_quotient(num: &[BigInt], den: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(den.first().is_some_and(|c| c.is_one()), "denominator must start with 1");
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let mut c = num.get(k).cloned().unwrap_or_default();
        for j in 1..=k.min(den.len().saturating_sub(1)) {
            c -= &den[j] * &out[k - j];
        }
        out.push(c);
    }
    out
}

/// Expansion of `(sum_{b in basis} t^(g|b|)) / prod_i (1 - t^(g p^(r-i)))`
/// to degree `d_max`.
pub fn hilbert_series_rational(p: u64, r: u32, d_max: u64) -> Result<Vec<BigInt>> {
    let b = basis(p, r)?;
    let len = d_max as usize + 1;
    let mut num = vec![BigInt::zero(); len];
    for e in &b.elements {
        let d = b.degree(e) as usize;
        if d < len {
            num[d] += 1;
        }
    }
    let mut den = vec![BigInt::one()];
    for m in ring_exponents(p, r)? {
        let step = (b.generator_degree * m) as usize;
        let mut next = vec![BigInt::zero(); (den.len() + step).min(len)];
        for (i, c) in den.iter().enumerate() {
            if i < next.len() {
                next[i] += c;
            }
            if i + step < next.len() {
                next[i + step] -= c;
            }
        }
        den = next;
    }
    Ok(series_quotient(&num, &den, len))
}

/// Verifies the free-module decomposition through degree `d_max`: every
/// reduced-ring monomial arises from exactly one pair
/// (`R`-monomial, basis element), and every such pair gives a monomial.
///
/// Returns the number of monomials checked.
pub fn verify_free_decomposition(p: u64, r: u32, d_max: u64) -> Result<usize> {
    let b = basis(p, r)?;
    let g = b.generator_degree;
    let parts = d_max / g;
    let ring = ring_exponents(p, r)?;

    // all monomials of total exponent <= parts satisfying the congruence
    let mut monomials = BTreeMap::new();
    for_each_composition(r as usize, parts, &mut |exps| {
        if satisfies_congruence(p, r, exps) {
            monomials.insert(exps.to_vec(), 0u32);
        }
    });

    // every product of an R-monomial and a basis element
    for e in &b.elements {
        let base: u64 = e.iter().sum();
        if base > parts {
            continue;
        }
        for_each_composition(r as usize, parts - base, &mut |q| {
            let exps: Vec<u64> = (0..r as usize)
                .map(|i| q[i] * ring[i] + e.get(i).copied().unwrap_or(0))
                .collect();
            if exps.iter().sum::<u64>() > parts {
                return;
            }
            *monomials.entry(exps).or_insert(0) += 1;
        });
    }
    if let Some((exps, hits)) = monomials.iter().find(|(_, &hits)| hits != 1) {
        return Err(Error::Parse(format!(
            "monomial {exps:?} has {hits} factorizations over R (p={p}, r={r})"
        )));
    }
    Ok(monomials.len())
}

/// Visits every `x in ℕ^k` with `sum x <= total`.
fn for_each_composition(k: usize, total: u64, visit: &mut dyn FnMut(&[u64])) {
    fn go(i: usize, left: u64, x: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        if i == x.len() {
            visit(x);
            return;
        }
        for v in 0..=left {
            x[i] = v;
            go(i + 1, left - v, x, visit);
        }
        x[i] = 0;
    }
    go(0, total, &mut vec![0; k], visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_basis(p: u64, r: u32) -> Vec<Vec<u64>> {
        let bounds = ring_exponents(p, r).unwrap();
        let mut out = Vec::new();
        let mut x = vec![0u64; r as usize - 1];
        loop {
            if satisfies_congruence(p, r, &x) {
                out.push(x.clone());
            }
            let mut i = x.len();
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                x[i] += 1;
                if x[i] < bounds[i] {
                    break;
                }
                x[i] = 0;
            }
        }
    }

    #[test]
    fn small_bases() {
        assert_eq!(basis(3, 2).unwrap().elements, vec![vec![0]]);
        assert_eq!(
            basis(3, 3).unwrap().elements,
            vec![vec![0, 0], vec![3, 2], vec![6, 1]]
        );
        for p in [2, 3, 5, 7] {
            let b = basis(p, 1).unwrap();
            assert_eq!(b.elements, vec![Vec::<u64>::new()]);
        }
        assert_eq!(basis(3, 3).unwrap().to_json(), "[[0,0],[3,2],[6,1]]");
        assert_eq!(basis(4, 2), Err(Error::NotPrime(4)));
        assert_eq!(basis(3, 0), Err(Error::ZeroKernelIndex));
    }

    #[test]
    fn basis_matches_box_enumeration() {
        for p in [2, 3, 5] {
            for r in 2..=4 {
                let b = basis(p, r).unwrap();
                assert_eq!(b.elements, box_basis(p, r), "p={p} r={r}");
                assert!(b.contains(&vec![0; r as usize - 1]));
                let box_size: u64 = ring_exponents(p, r).unwrap()[..r as usize - 1].iter().product();
                assert!(b.len() as u64 <= box_size);
                assert!(b.elements.iter().all(|e| satisfies_congruence(p, r, e)));
            }
        }
    }

    #[test]
    fn hilbert_small_cases() {
        // p = 3, r = 2: a_1 ≡ 0 mod 3, degree 2(a_1 + a_2)
        let h: Vec<u64> = hilbert_coeffs(3, 2, 6)
            .unwrap()
            .iter()
            .map(|c| c.try_into().unwrap())
            .collect();
        assert_eq!(h, vec![1, 0, 1, 0, 1, 0, 2]);
        let k_x1 = hilbert_coeffs(5, 1, 9).unwrap();
        for (d, c) in k_x1.iter().enumerate() {
            assert_eq!(c.is_one(), d % 2 == 0);
        }
        for p in [2, 3] {
            for r in 1..4 {
                assert!(hilbert_coeffs(p, r, 0).unwrap()[0].is_one());
            }
        }
    }

    #[test]
    fn hilbert_equals_rational_expansion() {
        for p in [2, 3, 5] {
            for r in 1..=3 {
                let direct: Vec<BigInt> = hilbert_coeffs(p, r, 40)
                    .unwrap()
                    .into_iter()
                    .map(BigInt::from)
                    .collect();
                assert_eq!(direct, hilbert_series_rational(p, r, 40).unwrap(), "p={p} r={r}");
            }
        }
    }

    #[test]
    fn factorization_is_unique() {
        for p in [2, 3] {
            for r in 1..=3 {
                assert!(verify_free_decomposition(p, r, 20).unwrap() > 0);
            }
        }
        let (q, s) = factor(3, 3, &[15, 4, 2]).unwrap();
        assert_eq!((q, s), (vec![1, 1, 2], vec![6, 1]));
        assert!(factor(3, 3, &[1, 0, 0]).is_err());
    }

    #[test]
    fn series_quotient_geometric() {
        let one = [BigInt::one()];
        let den = [BigInt::one(), BigInt::from(-1)];
        assert_eq!(series_quotient(&one, &den, 4), vec![BigInt::one(); 4]);
    }

    #[test]
    fn json_round_trip() {
        let b = basis(5, 3).unwrap();
        assert_eq!(ReducedBasis::from_json(5, 3, &b.to_json()).unwrap(), b);
    }
}
