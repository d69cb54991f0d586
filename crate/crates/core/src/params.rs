use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Deterministic trial division.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub(crate) fn check_index(r: u32) -> Result<()> {
    if r == 0 {
        Err(Error::ZeroKernelIndex)
    } else {
        Ok(())
    }
}

pub(crate) fn checked_pow(p: u64, e: u32) -> Result<u128> {
    (p as u128).checked_pow(e).ok_or(Error::TooLarge("p^r"))
}

/// `n * p^r`, the doubled right-hand side of the defining equation.
pub(crate) fn scaled_target(p: u64, r: u32, n: u64) -> Result<u128> {
    checked_pow(p, r)?
        .checked_mul(n as u128)
        .ok_or(Error::TooLarge("n p^r"))
}

/// The tuple `(p, r, m, n)` indexing one multiplicity `N_r(p, m, n)`.
///
/// `m` is the highest weight of `λ = mω` and `n` the output weight `nω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct CountParams {
    p: u64,
    r: u32,
    m: u64,
    n: u64,
}

#[derive(Deserialize)]
struct RawParams {
    p: u64,
    r: u32,
    m: u64,
    n: u64,
}

impl TryFrom<RawParams> for CountParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        CountParams::new(raw.p, raw.r, raw.m, raw.n)
    }
}

impl CountParams {
    pub fn new(p: u64, r: u32, m: u64, n: u64) -> Result<Self> {
        check_prime(p)?;
        check_index(r)?;
        Ok(Self { p, r, m, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Same `p` and `r` with a different output weight.
    pub fn with_n(self, n: u64) -> Self {
        Self { n, ..self }
    }

    pub fn with_m(self, m: u64) -> Self {
        Self { m, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_by_trial_division() {
        let primes: Vec<u64> = (0..60).filter(|&p| is_prime(p)).collect();
        assert_eq!(
            primes,
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn params_are_validated() {
        assert_eq!(CountParams::new(4, 1, 0, 0), Err(Error::NotPrime(4)));
        assert_eq!(CountParams::new(1, 1, 0, 0), Err(Error::NotPrime(1)));
        assert_eq!(CountParams::new(3, 0, 0, 0), Err(Error::ZeroKernelIndex));
        assert!(CountParams::new(2, 1, 0, 0).is_ok());
    }

    #[test]
    fn deserialization_validates() {
        let ok: CountParams = serde_json::from_str(r#"{"p":3,"r":2,"m":0,"n":2}"#).unwrap();
        assert_eq!(ok, CountParams::new(3, 2, 0, 2).unwrap());
        assert!(serde_json::from_str::<CountParams>(r#"{"p":9,"r":2,"m":0,"n":2}"#).is_err());
    }
}
