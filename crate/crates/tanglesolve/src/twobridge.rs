//! Schubert normal forms for 2-bridge links.
//!
//! A 2-bridge link b(alpha, beta) is classified by alpha together with the
//! class of beta up to beta -> beta^{-1} mod alpha. The canonical stored
//! form fixes a unique representative of that class, so strict equivalence
//! is structural equality. b(1,1) is the unknot, b(0,1) the two-component
//! unlink; the double branched cover of b(p,q) is the lens space L(p,q).

use crate::exact::{mod_inverse, ExactError};
use crate::seifert::LensSpace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TwoBridgeError {
    #[error("b({0},{1}) needs coprime parameters")]
    NotCoprime(BigInt, BigInt),
    #[error("b(0,0) is not a link")]
    Degenerate,
}

/// Equivalence mode: `Strict` is the Schubert relation (beta matched up to
/// inverse mod alpha, orientation-sensitive); `Mirror` also accepts the
/// mirror image (beta up to sign).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Strict,
    Mirror,
}

/// A 2-bridge link in canonical Schubert form.
///
/// Canonical means: alpha >= 0; beta = 1 for alpha in {0, 1}; and for
/// alpha >= 2, beta = min(b mod alpha, b^{-1} mod alpha) in [1, alpha-1].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoBridgeLink {
    alpha: BigInt,
    beta: BigInt,
}

impl TwoBridgeLink {
    pub fn unknot() -> Self {
        TwoBridgeLink { alpha: BigInt::one(), beta: BigInt::one() }
    }

    pub fn unlink() -> Self {
        TwoBridgeLink { alpha: BigInt::zero(), beta: BigInt::one() }
    }

    pub fn alpha(&self) -> &BigInt {
        &self.alpha
    }

    pub fn beta(&self) -> &BigInt {
        &self.beta
    }

    pub fn is_unknot(&self) -> bool {
        self.alpha.is_one()
    }

    /// Double branched cover: b(p,q) lifts to L(p,q).
    pub fn dbc_link(&self) -> LensSpace {
        LensSpace::new(self.alpha.clone(), self.beta.clone())
            .expect("canonical link parameters are coprime")
    }
}

/// Canonicalize b(a, b): negate both if a < 0 (b(-a,-b) = b(a,b)), collapse
/// a in {0,1}, otherwise pick the smaller of b mod a and its inverse.
pub fn canonical(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<TwoBridgeLink, TwoBridgeError> {
    let mut a = a.into();
    let mut b = b.into();
    if a.is_zero() && b.is_zero() {
        return Err(TwoBridgeError::Degenerate);
    }
    if !a.gcd(&b).is_one() {
        return Err(TwoBridgeError::NotCoprime(a, b));
    }
    if a.is_negative() {
        a = -a;
        b = -b;
    }
    if a.is_zero() {
        return Ok(TwoBridgeLink::unlink());
    }
    if a.is_one() {
        return Ok(TwoBridgeLink::unknot());
    }
    let r = b.mod_floor(&a);
    let inv = mod_inverse(&r, &a).expect("coprime residue is invertible");
    let beta = r.min(inv);
    Ok(TwoBridgeLink { alpha: a, beta })
}

/// Schubert equivalence test. Inputs are canonical, so strict mode reduces
/// to structural equality; the congruence is still checked explicitly.
pub fn equivalent(x: &TwoBridgeLink, y: &TwoBridgeLink, mode: MatchMode) -> bool {
    if x.alpha != y.alpha {
        return false;
    }
    if x.alpha < BigInt::from(2) {
        return true;
    }
    let a = &x.alpha;
    let inv = mod_inverse(&x.beta, a).expect("canonical beta is invertible");
    if y.beta == x.beta || y.beta == inv {
        return true;
    }
    match mode {
        MatchMode::Strict => false,
        MatchMode::Mirror => {
            y.beta == (-&x.beta).mod_floor(a) || y.beta == (-inv).mod_floor(a)
        }
    }
}

/// Mirror image: b(alpha, beta) -> canonical b(alpha, -beta).
pub fn mirror(x: &TwoBridgeLink) -> TwoBridgeLink {
    canonical(x.alpha.clone(), -&x.beta).expect("mirror of a link is a link")
}

impl fmt::Display for TwoBridgeLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b({},{})", self.alpha, self.beta)
    }
}

/// A connected sum of prime 2-bridge links, stored as a sorted multiset
/// with unknot summands dropped (the unit of #).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnectedSum {
    summands: Vec<TwoBridgeLink>,
}

impl ConnectedSum {
    pub fn new(parts: impl IntoIterator<Item = TwoBridgeLink>) -> Self {
        let mut summands: Vec<_> = parts.into_iter().filter(|l| !l.is_unknot()).collect();
        summands.sort();
        ConnectedSum { summands }
    }

    pub fn summands(&self) -> &[TwoBridgeLink] {
        &self.summands
    }

    /// Summand-wise double branched cover.
    pub fn dbc_sum(&self) -> Vec<LensSpace> {
        self.summands.iter().map(|l| l.dbc_link()).collect()
    }
}

impl fmt::Display for ConnectedSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "b(1,1)");
        }
        let parts: Vec<String> = self.summands.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("#"))
    }
}

/// Parse "a,b" as a (possibly unnormalized) link parameter pair.
pub fn parse_link(s: &str) -> Result<TwoBridgeLink, ExactError> {
    let (a, b) = s.split_once(',').ok_or_else(|| ExactError::Parse(s.to_string()))?;
    let a: BigInt = a.trim().parse().map_err(|_| ExactError::Parse(s.to_string()))?;
    let b: BigInt = b.trim().parse().map_err(|_| ExactError::Parse(s.to_string()))?;
    canonical(a, b).map_err(|_| ExactError::Parse(format!("{s}: parameters must be coprime")))
}
