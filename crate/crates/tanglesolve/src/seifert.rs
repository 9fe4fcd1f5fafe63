//! Seifert fibered spaces and lens space recognition.
//!
//! Fiber data M(g, k; (a1,b1), ...) records a Seifert fibration over a
//! disk-with-holes base (g = 0) or a Mobius-with-holes base (g = -1) with
//! the listed (possibly generalized) fiber coefficients. The operations
//! here are the normalization moves used to recognize closed results of
//! Dehn fillings: unit-fiber absorption, the (0,1) splitting rule, the
//! two-fiber determinant formula, the Mobius one-fiber lens formula, and
//! the torus knot exterior fibration inside a lens space.

use crate::exact::{mod_inverse, unimodular_complement};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeifertError {
    #[error("fiber ({0},{1}) needs coprime coefficients")]
    BadFiber(BigInt, BigInt),
    #[error("lens parameters ({0},{1}) must be coprime")]
    BadLens(BigInt, BigInt),
    #[error("expected a closed space, got {0} boundary components")]
    NotClosed(usize),
    #[error("expected base {expected}, got {got}")]
    WrongBase { expected: &'static str, got: &'static str },
    #[error("expected {expected} fibers, got {got}")]
    WrongFiberCount { expected: &'static str, got: usize },
    #[error("h1 order needs all fibers nonzero; found a (0,*) fiber")]
    ZeroFiber,
    #[error("torus knot exterior needs p >= 1, got {0}")]
    BadCableOrder(BigInt),
    #[error("Mobius lens formula needs a fiber (a,+-1), got ({0},{1})")]
    MobiusScope(BigInt, BigInt),
    #[error("cannot parse {0:?} as Seifert data")]
    Parse(String),
}

/// Base surface of the fibration: a disk/sphere with holes (genus 0) or a
/// Mobius band/projective plane with holes (genus -1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    Orientable0,
    NonOrientable1,
}

impl Base {
    fn genus_str(self) -> &'static str {
        match self {
            Base::Orientable0 => "0",
            Base::NonOrientable1 => "-1",
        }
    }
}

/// Seifert fiber data M(g, k; (a1,b1), ..., (aN,bN)).
///
/// Fibers are stored sign-normalized: (a, b) and (-a, -b) are identified,
/// the representative has a >= 0, and a = 0 forces b = 1. Generalized
/// (0,1) fibers are permitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertData {
    base: Base,
    boundary: usize,
    fibers: Vec<(BigInt, BigInt)>,
}

impl SeifertData {
    pub fn new(
        base: Base,
        boundary: usize,
        fibers: impl IntoIterator<Item = (BigInt, BigInt)>,
    ) -> Result<Self, SeifertError> {
        let mut out = Vec::new();
        for (mut a, mut b) in fibers {
            if !a.gcd(&b).is_one() {
                return Err(SeifertError::BadFiber(a, b));
            }
            if a.is_negative() || (a.is_zero() && b.is_negative()) {
                a = -a;
                b = -b;
            }
            out.push((a, b));
        }
        Ok(SeifertData { base, boundary, fibers: out })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn boundary(&self) -> usize {
        self.boundary
    }

    pub fn fibers(&self) -> &[(BigInt, BigInt)] {
        &self.fibers
    }

    /// Same data with one more fiber; the plugging move of a Dehn filling.
    pub fn with_fiber(&self, a: BigInt, b: BigInt) -> Result<Self, SeifertError> {
        let mut fibers = self.fibers.clone();
        fibers.push((a, b));
        SeifertData::new(self.base, self.boundary.saturating_sub(1), fibers)
    }
}

impl fmt::Display for SeifertData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({},{};", self.base.genus_str(), self.boundary)?;
        for (i, (a, b)) in self.fibers.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, ")")
    }
}

/// A lens space L(p,q), stored with p >= 0, q reduced mod p into
/// [1, p-1] for p >= 2, and q = 1 for p in {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LensSpace {
    p: BigInt,
    q: BigInt,
}

impl LensSpace {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, SeifertError> {
        let mut p = p.into();
        let mut q = q.into();
        if !p.gcd(&q).is_one() {
            return Err(SeifertError::BadLens(p, q));
        }
        if p.is_negative() {
            p = -p;
            q = -q;
        }
        if p <= BigInt::one() {
            return Ok(LensSpace { p, q: BigInt::one() });
        }
        let q = q.mod_floor(&p);
        Ok(LensSpace { p, q })
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_s3(&self) -> bool {
        self.p.is_one()
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.p, self.q)
    }
}

/// Lens space comparison mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LensMode {
    Oriented,
    Unoriented,
}

/// L(p,q) = L(p',q') iff p = p' and q' is congruent to q^{+-1} (oriented),
/// additionally allowing -q^{+-1} in unoriented mode.
pub fn lens_equiv(x: &LensSpace, y: &LensSpace, mode: LensMode) -> bool {
    if x.p != y.p {
        return false;
    }
    if x.p <= BigInt::one() {
        return true;
    }
    let inv = mod_inverse(&x.q, &x.p).expect("canonical q is invertible");
    if y.q == x.q || y.q == inv {
        return true;
    }
    match mode {
        LensMode::Oriented => false,
        LensMode::Unoriented => {
            y.q == (-&x.q).mod_floor(&x.p) || y.q == (-inv).mod_floor(&x.p)
        }
    }
}

/// Outcome of closing up Seifert data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    Lens(LensSpace),
    Sum(Vec<LensSpace>),
    NotLens(String),
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalForm::Lens(l) => write!(f, "{l}"),
            NormalForm::Sum(ls) => {
                let parts: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "{}", parts.join(" # "))
            }
            NormalForm::NotLens(why) => write!(f, "not a lens space or sum of lens spaces: {why}"),
        }
    }
}

/// Two-fiber determinant formula: M(0,0;(a1,b1),(a2,b2)) is the lens space
/// L(a, b) with a = a1*b2 + a2*b1 and b = -(a1*b2' + a2'*b1) for any
/// unimodular complement a2*b2' - a2'*b2 = 1. Inputs with fewer than two
/// fibers are padded with (1,0).
pub fn lens_of_two_fiber(m: &SeifertData) -> Result<LensSpace, SeifertError> {
    if m.base != Base::Orientable0 {
        return Err(SeifertError::WrongBase { expected: "0", got: m.base.genus_str() });
    }
    if m.boundary != 0 {
        return Err(SeifertError::NotClosed(m.boundary));
    }
    if m.fibers.len() > 2 {
        return Err(SeifertError::WrongFiberCount { expected: "at most 2", got: m.fibers.len() });
    }
    let one_zero = (BigInt::one(), BigInt::zero());
    let f1 = m.fibers.first().unwrap_or(&one_zero);
    let f2 = m.fibers.get(1).unwrap_or(&one_zero);
    let (a1, b1) = f1;
    let (a2, b2) = f2;
    let a = a1 * b2 + a2 * b1;
    let (a2p, b2p) = unimodular_complement(a2, b2);
    let b = -(a1 * &b2p + &a2p * b1);
    LensSpace::new(a, b)
}

/// Mobius one-fiber lens formula: M(-1,0;(a,+-1)) is L(4a, +-1 - 2a).
pub fn lens_of_mobius(m: &SeifertData) -> Result<LensSpace, SeifertError> {
    if m.base != Base::NonOrientable1 {
        return Err(SeifertError::WrongBase { expected: "-1", got: m.base.genus_str() });
    }
    if m.boundary != 0 {
        return Err(SeifertError::NotClosed(m.boundary));
    }
    if m.fibers.len() != 1 {
        return Err(SeifertError::WrongFiberCount { expected: "exactly 1", got: m.fibers.len() });
    }
    let (a, b) = &m.fibers[0];
    if b.abs() != BigInt::one() {
        return Err(SeifertError::MobiusScope(a.clone(), b.clone()));
    }
    LensSpace::new(BigInt::from(4) * a, b - BigInt::from(2) * a)
}

/// The boundary-respecting rewrite M(-1,1;) = M(0,1;(2,1),(2,-1)).
pub fn refiber_mobius_piece(m: &SeifertData) -> Result<SeifertData, SeifertError> {
    if m.base != Base::NonOrientable1 {
        return Err(SeifertError::WrongBase { expected: "-1", got: m.base.genus_str() });
    }
    if m.boundary != 1 || !m.fibers.is_empty() {
        return Err(SeifertError::WrongFiberCount { expected: "none (bare M(-1,1;))", got: m.fibers.len() });
    }
    SeifertData::new(
        Base::Orientable0,
        1,
        [(BigInt::from(2), BigInt::one()), (BigInt::from(2), BigInt::from(-1))],
    )
}

/// Exterior of the (p,q) torus knot sitting on the Heegaard torus of
/// L(a,b), fibered as M(0,1;(p,-e),(aq-bp, ad-be)) where pd - qe = 1 with
/// the canonical choice 0 <= e < p (e = -q^{-1} mod p).
pub fn torus_knot_exterior(
    a: &BigInt,
    b: &BigInt,
    p: &BigInt,
    q: &BigInt,
) -> Result<SeifertData, SeifertError> {
    if !a.gcd(b).is_one() {
        return Err(SeifertError::BadLens(a.clone(), b.clone()));
    }
    if !p.gcd(q).is_one() {
        return Err(SeifertError::BadFiber(p.clone(), q.clone()));
    }
    if p < &BigInt::one() {
        return Err(SeifertError::BadCableOrder(p.clone()));
    }
    let (d, e) = if p.is_one() {
        (BigInt::one(), BigInt::zero())
    } else {
        let e = (-mod_inverse(q, p).expect("gcd(p,q)=1")).mod_floor(p);
        let d = (BigInt::one() + q * &e) / p;
        (d, e)
    };
    SeifertData::new(
        Base::Orientable0,
        1,
        [(p.clone(), -&e), (a * q - b * p, a * &d - b * &e)],
    )
}

/// |H1| of a closed Seifert space over an orientable base with all fibers
/// nonzero: the absolute determinant |sum_i b_i prod_{j != i} a_j|.
/// Zero encodes infinite first homology.
pub fn h1_order(m: &SeifertData) -> Result<BigInt, SeifertError> {
    if m.base != Base::Orientable0 {
        return Err(SeifertError::WrongBase { expected: "0", got: m.base.genus_str() });
    }
    if m.boundary != 0 {
        return Err(SeifertError::NotClosed(m.boundary));
    }
    if m.fibers.iter().any(|(a, _)| a.is_zero()) {
        return Err(SeifertError::ZeroFiber);
    }
    let mut total = BigInt::zero();
    for (i, (_, b)) in m.fibers.iter().enumerate() {
        let mut term = b.clone();
        for (j, (a, _)) in m.fibers.iter().enumerate() {
            if i != j {
                term *= a;
            }
        }
        total += term;
    }
    Ok(total.abs())
}

/// Close up arbitrary fiber data into a lens space, a connected sum of
/// lens spaces, or an honest refusal.
///
/// Disk base: unit fibers are absorbed into the largest remaining fiber
/// (or merged together if nothing else is left); a (0,1) fiber splits the
/// space into the connected sum of L(a_i, b_i) over the remaining fibers;
/// otherwise at most two exceptional fibers close to a lens space.
///
/// Mobius base: a (0,1) fiber splits off an S1xS2 = L(0,1) summand and
/// the rest sums as on the disk; with no fibers left the space is
/// RP3 # RP3 = L(2,1) # L(2,1); a single (a,+-1) fiber is the Mobius lens
/// formula; anything else is not a lens space or a sum of them.
pub fn normalize_closed(m: &SeifertData) -> Result<NormalForm, SeifertError> {
    if m.boundary != 0 {
        return Err(SeifertError::NotClosed(m.boundary));
    }
    let mut zeros = 0usize;
    let mut units: Vec<BigInt> = Vec::new();
    let mut others: Vec<(BigInt, BigInt)> = Vec::new();
    for (a, b) in &m.fibers {
        if a.is_zero() {
            zeros += 1;
        } else if a.is_one() {
            units.push(b.clone());
        } else {
            others.push((a.clone(), b.clone()));
        }
    }
    // absorb integer twists
    let twist: BigInt = units.iter().sum();
    if !others.is_empty() {
        let target = others
            .iter()
            .enumerate()
            .max_by(|(i, (a, _)), (j, (a2, _))| a.cmp(a2).then(j.cmp(i)))
            .map(|(i, _)| i)
            .unwrap();
        let add = &twist * &others[target].0;
        others[target].1 += add;
    } else if !units.is_empty() {
        others.push((BigInt::one(), twist));
    }

    match m.base {
        Base::Orientable0 => {
            if zeros > 0 {
                let mut parts: Vec<LensSpace> = Vec::new();
                for _ in 1..zeros {
                    parts.push(LensSpace::new(0, 1).unwrap());
                }
                for (a, b) in &others {
                    if !a.is_one() {
                        parts.push(LensSpace::new(a.clone(), b.clone())?);
                    }
                }
                return Ok(match parts.len() {
                    0 => NormalForm::Lens(LensSpace::new(1, 1).unwrap()),
                    1 => NormalForm::Lens(parts.pop().unwrap()),
                    _ => NormalForm::Sum(parts),
                });
            }
            if others.iter().filter(|(a, _)| a > &BigInt::one()).count() >= 3 {
                return Ok(NormalForm::NotLens(format!(
                    "three or more exceptional fibers: {m}"
                )));
            }
            let closed = SeifertData::new(Base::Orientable0, 0, others.clone())?;
            Ok(NormalForm::Lens(lens_of_two_fiber(&closed)?))
        }
        Base::NonOrientable1 => {
            if zeros > 0 {
                let mut parts = vec![LensSpace::new(0, 1).unwrap()];
                for _ in 1..zeros {
                    parts.push(LensSpace::new(0, 1).unwrap());
                }
                for (a, b) in &others {
                    if !a.is_one() {
                        parts.push(LensSpace::new(a.clone(), b.clone())?);
                    }
                }
                return Ok(if parts.len() == 1 {
                    NormalForm::Lens(parts.pop().unwrap())
                } else {
                    NormalForm::Sum(parts)
                });
            }
            match others.len() {
                0 => {
                    let rp3 = LensSpace::new(2, 1).unwrap();
                    Ok(NormalForm::Sum(vec![rp3.clone(), rp3]))
                }
                1 => {
                    let (a, b) = &others[0];
                    if a.is_one() && b.is_zero() {
                        let rp3 = LensSpace::new(2, 1).unwrap();
                        return Ok(NormalForm::Sum(vec![rp3.clone(), rp3]));
                    }
                    if b.abs().is_one() {
                        let single = SeifertData::new(
                            Base::NonOrientable1,
                            0,
                            [(a.clone(), b.clone())],
                        )?;
                        Ok(NormalForm::Lens(lens_of_mobius(&single)?))
                    } else {
                        Ok(NormalForm::NotLens(format!(
                            "twisted circle bundle over the projective plane: {m}"
                        )))
                    }
                }
                _ => Ok(NormalForm::NotLens(format!(
                    "multiple exceptional fibers over a non-orientable base: {m}"
                ))),
            }
        }
    }
}

/// Parse "M(g,k;(a,b),...)" Seifert notation.
pub fn parse_seifert(s: &str) -> Result<SeifertData, SeifertError> {
    let err = || SeifertError::Parse(s.to_string());
    let t = s.trim();
    let inner = t
        .strip_prefix("M(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(err)?;
    let (head, fibers) = inner.split_once(';').ok_or_else(err)?;
    let (g, k) = head.split_once(',').ok_or_else(err)?;
    let base = match g.trim() {
        "0" => Base::Orientable0,
        "-1" => Base::NonOrientable1,
        _ => return Err(err()),
    };
    let boundary: usize = k.trim().parse().map_err(|_| err())?;
    let mut pairs = Vec::new();
    let fibers = fibers.trim();
    if !fibers.is_empty() {
        for part in fibers.split("),") {
            let part = part.trim().trim_start_matches('(').trim_end_matches(')');
            let (a, b) = part.split_once(',').ok_or_else(err)?;
            let a: BigInt = a.trim().parse().map_err(|_| err())?;
            let b: BigInt = b.trim().parse().map_err(|_| err())?;
            pairs.push((a, b));
        }
    }
    SeifertData::new(base, boundary, pairs)
}
