//! Exact arithmetic on the extended rational line Q ∪ {1/0}.
//!
//! Rational tangles are classified by their fraction, an extended rational
//! number beta/alpha with the infinite element 1/0 for the vertical tangle.
//! This module provides the reduced fraction type, the handful of extended
//! operations the tangle calculus needs (addition, reciprocal, negation,
//! all total), modular inverses for the Schubert relation, and the
//! even-length continued fraction scheme
//!
//! ```text
//! beta/alpha = c_n + 1/(c_{n-1} + 1/( ... + 1/c_1))
//! ```
//!
//! evaluated over the base infinity-tangle, vector entries innermost first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("0/0 is not a fraction")]
    UndefinedFraction,
    #[error("{0} has no inverse modulo {1}")]
    NoInverse(BigInt, BigInt),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
    #[error("continued fraction expansion requires a finite nonzero fraction, got {0}")]
    NotFiniteNonzero(String),
    #[error("cannot parse {0:?} as a fraction")]
    Parse(String),
}

/// A reduced fraction num/den on the extended rational line.
///
/// Invariants: `gcd(|num|, den) = 1`, `den >= 0`, and `den = 0` only for
/// the unique infinite element `1/0`. Equality is structural on the
/// reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtRational {
    num: BigInt,
    den: BigInt,
}

impl ExtRational {
    /// Reduce an arbitrary integer pair to canonical form. `(k, 0)` with
    /// `k != 0` collapses to `1/0`; `(0, 0)` is rejected.
    pub fn reduce(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, ExactError> {
        let mut num = num.into();
        let mut den = den.into();
        if num.is_zero() && den.is_zero() {
            return Err(ExactError::UndefinedFraction);
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if den.is_zero() {
            return Ok(ExtRational { num: BigInt::one(), den });
        }
        let g = num.gcd(&den);
        Ok(ExtRational { num: num / &g, den: den / g })
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        ExtRational { num: n.into(), den: BigInt::one() }
    }

    pub fn infinity() -> Self {
        ExtRational { num: BigInt::one(), den: BigInt::zero() }
    }

    pub fn zero() -> Self {
        ExtRational { num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Extended addition: any sum involving the infinite element is
    /// infinite (the vertical tangle absorbs horizontal twisting).
    pub fn add(&self, other: &Self) -> Self {
        if self.is_infinite() || other.is_infinite() {
            return Self::infinity();
        }
        let num = &self.num * &other.den + &other.num * &self.den;
        let den = &self.den * &other.den;
        Self::reduce(num, den).expect("finite sum is a fraction")
    }

    pub fn neg(&self) -> Self {
        ExtRational { num: -&self.num, den: self.den.clone() }
    }

    /// Extended reciprocal: 1/0 = infinity and 1/infinity = 0.
    pub fn recip(&self) -> Self {
        Self::reduce(self.den.clone(), self.num.clone()).expect("num and den never both zero")
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for ExtRational {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, ExactError> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Self::infinity());
        }
        let parse_int =
            |t: &str| BigInt::from_str(t.trim()).map_err(|_| ExactError::Parse(s.to_string()));
        match s.split_once('/') {
            Some((n, d)) => Self::reduce(parse_int(n)?, parse_int(d)?),
            None => Ok(Self::from_int(parse_int(s)?)),
        }
    }
}

/// Inverse of `x` modulo `m`, in `[1, m-1]`. Requires `m >= 2`.
pub fn mod_inverse(x: &BigInt, m: &BigInt) -> Result<BigInt, ExactError> {
    if m < &BigInt::from(2) {
        return Err(ExactError::BadModulus(m.clone()));
    }
    let r = x.mod_floor(m);
    let gcd = r.extended_gcd(m);
    if !gcd.gcd.is_one() {
        return Err(ExactError::NoInverse(x.clone(), m.clone()));
    }
    Ok(gcd.x.mod_floor(m))
}

/// A deterministic unimodular complement: given coprime `(alpha, beta)`,
/// return `(alpha', beta')` with `alpha * beta' - alpha' * beta = 1`.
/// For `alpha != 0` the representative has `alpha'` in `[0, |alpha|)`.
pub fn unimodular_complement(alpha: &BigInt, beta: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(alpha.gcd(beta).is_one());
    if alpha.is_zero() {
        // 0 * beta' - alpha' * beta = 1 with beta = +-1
        return (-beta.clone(), BigInt::zero());
    }
    let gcd = alpha.extended_gcd(beta);
    // gcd.x * alpha + gcd.y * beta = 1, so (alpha', beta') = (-gcd.y, gcd.x)
    let a1 = -gcd.y;
    let b1 = gcd.x;
    let a1_canon = a1.mod_floor(&alpha.abs());
    let k = (&a1_canon - &a1) / alpha;
    (a1_canon, b1 + k * beta)
}

/// Canonical even-length continued fraction vector of a finite nonzero
/// fraction: Euclidean quotients of |f| reversed (innermost first), all
/// entries negated for negative f, and an odd-length result split at the
/// innermost entry, (c1, ...) -> (1, c1 - 1, ...) resp. (-1, c1 + 1, ...).
pub fn cf_expand(f: &ExtRational) -> Result<Vec<BigInt>, ExactError> {
    if f.is_infinite() || f.is_zero() {
        return Err(ExactError::NotFiniteNonzero(f.to_string()));
    }
    let neg = f.num.is_negative();
    let mut p = f.num.abs();
    let mut q = f.den.clone();
    let mut quotients: Vec<BigInt> = Vec::new();
    while !q.is_zero() {
        let (d, r) = p.div_rem(&q);
        quotients.push(d);
        p = q;
        q = r;
    }
    let mut c: Vec<BigInt> = quotients.into_iter().rev().collect();
    if neg {
        for x in c.iter_mut() {
            *x = -x.clone();
        }
    }
    if c.len() % 2 == 1 {
        let c1 = c.remove(0);
        if neg {
            c.insert(0, c1 + 1);
            c.insert(0, BigInt::from(-1));
        } else {
            c.insert(0, c1 - 1);
            c.insert(0, BigInt::one());
        }
    }
    debug_assert_eq!(&cf_eval(&c), f);
    Ok(c)
}

/// Evaluate an integer vector as a continued fraction over the base
/// infinity-tangle: entries alternate vertical twists f -> 1/(1/f + c)
/// (odd positions, innermost first) and horizontal twists f -> f + c.
/// Extended arithmetic makes this total; the empty vector is infinity.
pub fn cf_eval(c: &[BigInt]) -> ExtRational {
    // run the convergent recurrence on a raw (num, den) pair; both twist
    // moves preserve gcd(num, den) = 1, so no intermediate reduction is
    // needed and the pair can never reach (0, 0)
    let mut num = BigInt::one();
    let mut den = BigInt::zero();
    for (i, ci) in c.iter().enumerate() {
        if i % 2 == 0 {
            den += ci * &num;
        } else {
            num += ci * &den;
        }
    }
    ExtRational::reduce(num, den).expect("coprime pair stays defined")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: i64, d: i64) -> ExtRational {
        ExtRational::reduce(n, d).unwrap()
    }

    fn vec_i(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(frac(26, 8), frac(13, 4));
        assert_eq!(frac(26, 8).num(), &BigInt::from(13));
        assert_eq!(frac(-3, -6), frac(1, 2));
        assert_eq!(frac(5, 0), ExtRational::infinity());
        assert_eq!(ExtRational::reduce(0, 0), Err(ExactError::UndefinedFraction));
    }

    #[test]
    fn reduce_is_idempotent_and_scale_invariant() {
        for k in [-7i64, -1, 2, 5] {
            assert_eq!(frac(3 * k, 7 * k), frac(3, 7));
        }
        let f = frac(-9, 12);
        assert_eq!(ExtRational::reduce(f.num().clone(), f.den().clone()).unwrap(), f);
    }

    #[test]
    fn mod_inverse_examples() {
        let inv = |x: i64, m: i64| mod_inverse(&BigInt::from(x), &BigInt::from(m));
        assert_eq!(inv(5, 13).unwrap(), BigInt::from(8));
        assert_eq!(inv(1, 7).unwrap(), BigInt::one());
        assert!(matches!(inv(6, 9), Err(ExactError::NoInverse(_, _))));
        assert!(matches!(inv(3, 1), Err(ExactError::BadModulus(_))));
        // negative representative
        assert_eq!(inv(-4, 13).unwrap(), BigInt::from(3));
    }

    #[test]
    fn mod_inverse_is_an_involution() {
        for m in 2i64..40 {
            for x in 1..m {
                if BigInt::from(x).gcd(&BigInt::from(m)).is_one() {
                    let y = mod_inverse(&BigInt::from(x), &BigInt::from(m)).unwrap();
                    let back = mod_inverse(&y, &BigInt::from(m)).unwrap();
                    assert_eq!(back, BigInt::from(x));
                }
            }
        }
    }

    #[test]
    fn unimodular_complement_determinant() {
        for (a, b) in [(3i64, 8i64), (2, -1), (0, 1), (0, -1), (1, 0), (5, 3), (-4, 9)] {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            if !a.gcd(&b).is_one() {
                continue;
            }
            let (a1, b1) = unimodular_complement(&a, &b);
            assert_eq!(&a * &b1 - &a1 * &b, BigInt::one(), "({a},{b}) -> ({a1},{b1})");
        }
    }

    #[test]
    fn cf_expand_examples() {
        assert_eq!(cf_expand(&frac(13, 4)).unwrap(), vec_i(&[4, 3]));
        assert_eq!(cf_expand(&frac(9, 7)).unwrap(), vec_i(&[1, 1, 3, 1]));
        assert_eq!(cf_expand(&frac(1, 5)).unwrap(), vec_i(&[5, 0]));
        // integers split as (1, n-1); negatives carry the sign everywhere
        assert_eq!(cf_expand(&frac(3, 1)).unwrap(), vec_i(&[1, 2]));
        assert_eq!(cf_expand(&frac(-3, 1)).unwrap(), vec_i(&[-1, -2]));
        assert_eq!(cf_expand(&frac(-1, 2)).unwrap(), vec_i(&[-2, 0]));
        assert!(cf_expand(&ExtRational::zero()).is_err());
        assert!(cf_expand(&ExtRational::infinity()).is_err());
    }

    #[test]
    fn cf_eval_examples() {
        assert_eq!(cf_eval(&vec_i(&[4, 3])), frac(13, 4));
        assert_eq!(cf_eval(&[]), ExtRational::infinity());
        assert_eq!(cf_eval(&vec_i(&[0, 0])), ExtRational::infinity());
    }

    #[test]
    fn cf_round_trip_spot_checks() {
        for (n, d) in [(9i64, 7i64), (-9, 7), (7, 9), (-7, 9), (1, 1), (-1, 1), (355, 113)] {
            let f = frac(n, d);
            let c = cf_expand(&f).unwrap();
            assert_eq!(c.len() % 2, 0, "{f}: {c:?}");
            assert_eq!(cf_eval(&c), f);
        }
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(frac(13, 4).to_string(), "13/4");
        assert_eq!(frac(-3, 1).to_string(), "-3");
        assert_eq!(ExtRational::infinity().to_string(), "inf");
        assert_eq!("13/4".parse::<ExtRational>().unwrap(), frac(13, 4));
        assert_eq!("-6/-4".parse::<ExtRational>().unwrap(), frac(3, 2));
        assert_eq!("inf".parse::<ExtRational>().unwrap(), ExtRational::infinity());
        assert_eq!("7".parse::<ExtRational>().unwrap(), frac(7, 1));
        assert!("x/2".parse::<ExtRational>().is_err());
    }

    #[test]
    fn extended_arithmetic_is_total() {
        let inf = ExtRational::infinity();
        assert_eq!(inf.add(&frac(3, 2)), inf);
        assert_eq!(inf.recip(), ExtRational::zero());
        assert_eq!(ExtRational::zero().recip(), inf);
        assert_eq!(frac(2, 3).recip(), frac(3, 2));
        assert_eq!(frac(-2, 3).recip(), frac(-3, 2));
    }
}
