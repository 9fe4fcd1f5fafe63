//! Dehn surgery calculus on cables and graph manifolds.
//!
//! The operations here classify fillings: slope pushdown through a cabling
//! annulus, the solid-torus/reducible/incompressible trichotomy for cable
//! space fillings, torus-knot surgery in lens spaces presented as Seifert
//! fillings over the disk or Mobius band, the composite closed form for
//! cable knot surgery, lens-producing slopes on depth-one iterated cables,
//! and the piece-by-piece collapse of a linear graph manifold.

use crate::seifert::{
    normalize_closed, torus_knot_exterior, Base, LensSpace, NormalForm,
    SeifertData, SeifertError,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurgeryError {
    #[error("slope 0/0 is not a curve")]
    ZeroSlope,
    #[error("cannot parse {0:?} as a slope")]
    ParseSlope(String),
    #[error("({0},{1}) must be coprime")]
    NotCoprime(BigInt, BigInt),
    #[error("cable order must be at least 2, got {0}")]
    SmallCableOrder(BigInt),
    #[error("Mobius fibration needs q = +-1 mod p, got p={0}, q={1}")]
    MobiusSign(BigInt, BigInt),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("iterated cable needs at least two stages, got {0}")]
    TooFewStages(usize),
    #[error("graph manifold needs at least one piece")]
    EmptyGraph,
    #[error(transparent)]
    Seifert(#[from] SeifertError),
}

/// A boundary slope m/n in the companion-framed (longitude, meridian)
/// basis. Stored reduced with n >= 0; the meridian is 1/0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    m: BigInt,
    n: BigInt,
}

impl Slope {
    pub fn new(m: impl Into<BigInt>, n: impl Into<BigInt>) -> Result<Self, SurgeryError> {
        let mut m = m.into();
        let mut n = n.into();
        if m.is_zero() && n.is_zero() {
            return Err(SurgeryError::ZeroSlope);
        }
        let g = m.gcd(&n);
        m /= &g;
        n /= &g;
        if n.is_negative() {
            m = -m;
            n = -n;
        }
        if n.is_zero() {
            m = BigInt::one();
        }
        Ok(Slope { m, n })
    }

    pub fn meridian() -> Self {
        Slope { m: BigInt::one(), n: BigInt::zero() }
    }

    pub fn integer(c: impl Into<BigInt>) -> Self {
        Slope { m: c.into(), n: BigInt::one() }
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn is_meridian(&self) -> bool {
        self.n.is_zero()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n.is_zero() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.m, self.n)
        }
    }
}

impl FromStr for Slope {
    type Err = SurgeryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" {
            return Ok(Slope::meridian());
        }
        let err = || SurgeryError::ParseSlope(s.to_string());
        match t.split_once('/') {
            Some((m, n)) => {
                let m: BigInt = m.trim().parse().map_err(|_| err())?;
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                Slope::new(m, n)
            }
            None => {
                let m: BigInt = t.parse().map_err(|_| err())?;
                Ok(Slope::integer(m))
            }
        }
    }
}

/// A (p,q)-cable of the (p1,q1) torus knot on the Heegaard torus of the
/// ambient lens space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CableKnot {
    pub ambient: LensSpace,
    pub companion: (BigInt, BigInt),
    pub cable: (BigInt, BigInt),
}

impl CableKnot {
    pub fn new(
        ambient: LensSpace,
        companion: (BigInt, BigInt),
        cable: (BigInt, BigInt),
    ) -> Result<Self, SurgeryError> {
        if !companion.0.gcd(&companion.1).is_one() {
            return Err(SurgeryError::NotCoprime(companion.0, companion.1));
        }
        if !cable.0.gcd(&cable.1).is_one() {
            return Err(SurgeryError::NotCoprime(cable.0, cable.1));
        }
        Ok(CableKnot { ambient, companion, cable })
    }
}

/// An iterated cable [p0,q0; p1,q1; ...]: the (p0,q0)-cable of the
/// (p1,q1)-cable of ... of a torus knot. Every stage needs pi >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedCable {
    stages: Vec<(BigInt, BigInt)>,
}

impl IteratedCable {
    pub fn new(stages: Vec<(BigInt, BigInt)>) -> Result<Self, SurgeryError> {
        if stages.len() < 2 {
            return Err(SurgeryError::TooFewStages(stages.len()));
        }
        for (p, q) in &stages {
            if !p.gcd(q).is_one() {
                return Err(SurgeryError::NotCoprime(p.clone(), q.clone()));
            }
            if p < &BigInt::from(2) {
                return Err(SurgeryError::SmallCableOrder(p.clone()));
            }
        }
        Ok(IteratedCable { stages })
    }

    pub fn stages(&self) -> &[(BigInt, BigInt)] {
        &self.stages
    }
}

/// A linear chain of Seifert pieces with the open boundary on the last
/// piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphManifold {
    pieces: Vec<SeifertData>,
}

impl GraphManifold {
    pub fn new(pieces: Vec<SeifertData>) -> Result<Self, SurgeryError> {
        if pieces.is_empty() {
            return Err(SurgeryError::EmptyGraph);
        }
        Ok(GraphManifold { pieces })
    }

    pub fn pieces(&self) -> &[SeifertData] {
        &self.pieces
    }
}

impl fmt::Display for GraphManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" U "))
    }
}

/// Classification of a Dehn filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FillResult {
    Lens(LensSpace),
    Sum(Vec<LensSpace>),
    SolidTorus,
    SolidTorusSumLens(LensSpace),
    ToroidalOrSFS(String),
}

impl fmt::Display for FillResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FillResult::Lens(l) => write!(f, "{l}"),
            FillResult::Sum(ls) => {
                let parts: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "{}", parts.join(" # "))
            }
            FillResult::SolidTorus => write!(f, "solid torus"),
            FillResult::SolidTorusSumLens(l) => write!(f, "solid torus # {l}"),
            FillResult::ToroidalOrSFS(d) => write!(f, "toroidal or Seifert (not a lens sum): {d}"),
        }
    }
}

fn normal_form_to_fill(nf: NormalForm) -> FillResult {
    match nf {
        NormalForm::Lens(l) => FillResult::Lens(l),
        NormalForm::Sum(ls) => FillResult::Sum(ls),
        NormalForm::NotLens(d) => FillResult::ToroidalOrSFS(d),
    }
}

/// Push a filling slope of a satellite exterior down to its companion:
/// for winding number w the kernel slope is (m/g) / (n w^2 / g) with
/// g = gcd(w, m). Winding zero pushes everything to the meridian.
pub fn pushdown(w: &BigInt, r: &Slope) -> Slope {
    if w.is_zero() {
        return Slope::meridian();
    }
    let g = w.gcd(&r.m);
    let m = &r.m / &g;
    let n = &r.n * w * w / g;
    Slope::new(m, n).expect("w != 0 keeps the slope nonzero")
}

/// Fill the outer boundary of the (p,q) cable space: the pq slope
/// compresses to a solid torus summed with L(p,q), slopes m/n with
/// m = npq +- 1 give a solid torus, and every other slope leaves the
/// boundary incompressible.
pub fn cable_space_fill(p: &BigInt, q: &BigInt, r: &Slope) -> Result<FillResult, SurgeryError> {
    if p < &BigInt::from(2) {
        return Err(SurgeryError::SmallCableOrder(p.clone()));
    }
    if !p.gcd(q).is_one() {
        return Err(SurgeryError::NotCoprime(p.clone(), q.clone()));
    }
    let pq = p * q;
    if r.n.is_one() && r.m == pq {
        return Ok(FillResult::SolidTorusSumLens(LensSpace::new(p.clone(), q.clone())?));
    }
    if (&r.m - &r.n * &pq).abs().is_one() {
        return Ok(FillResult::SolidTorus);
    }
    Ok(FillResult::ToroidalOrSFS(format!(
        "cable space C({p},{q}) filled along {r} has incompressible boundary"
    )))
}

/// s/t surgery on the (p,q) torus knot on the Heegaard torus of L(a,b),
/// as a closed Seifert space over the sphere: the exterior fibration plus
/// the fiber (s - t p q, t).
pub fn tk_fill_disk(
    a: &BigInt,
    b: &BigInt,
    p: &BigInt,
    q: &BigInt,
    s_t: &Slope,
) -> Result<SeifertData, SurgeryError> {
    let ext = torus_knot_exterior(a, b, p, q)?;
    Ok(ext.with_fiber(&s_t.m - &s_t.n * p * q, s_t.n.clone())?)
}

/// s/t surgery on a torus knot whose exterior fibers over the Mobius
/// band, which happens exactly for q = +-1 mod p inside L(4p, +-1-2p):
/// the result is M(-1,0;(p,+-1),(s-tpq,t)).
pub fn tk_fill_mobius(
    p: &BigInt,
    q: &BigInt,
    s_t: &Slope,
) -> Result<SeifertData, SurgeryError> {
    if p < &BigInt::from(2) {
        return Err(SurgeryError::SmallCableOrder(p.clone()));
    }
    if !p.gcd(q).is_one() {
        return Err(SurgeryError::NotCoprime(p.clone(), q.clone()));
    }
    let qm = q.mod_floor(p);
    let sign = if qm.is_one() {
        BigInt::one()
    } else if qm == p - BigInt::one() {
        -BigInt::one()
    } else {
        return Err(SurgeryError::MobiusSign(p.clone(), q.clone()));
    };
    Ok(SeifertData::new(
        Base::NonOrientable1,
        0,
        [(p.clone(), sign), (&s_t.m - &s_t.n * p * q, s_t.n.clone())],
    )?)
}

fn check_cable_hypotheses(k: &CableKnot) -> Result<(BigInt, BigInt), SurgeryError> {
    let (p1, q1) = &k.companion;
    let (p, q) = &k.cable;
    if p < &BigInt::from(2) {
        return Err(SurgeryError::SmallCableOrder(p.clone()));
    }
    if p1 < &BigInt::from(2) {
        return Err(SurgeryError::SmallCableOrder(p1.clone()));
    }
    let eps = q - p * p1 * q1;
    if !eps.abs().is_one() {
        return Err(SurgeryError::Hypothesis(format!(
            "cable slope q={q} must be p*p1*q1 +- 1 = {} +- 1",
            p * p1 * q1
        )));
    }
    let n_big = k.ambient.p() * q1 - k.ambient.q() * p1;
    if n_big.abs() <= BigInt::one() {
        return Err(SurgeryError::Hypothesis(format!(
            "|a q1 - b p1| = {} must exceed 1",
            n_big.abs()
        )));
    }
    Ok((eps, n_big))
}

/// Surgery on a cable knot, classified by pushing the slope through the
/// cable space. The cabling slope pq splits off L(p,q) and leaves q/p
/// surgery on the companion torus knot; slopes m/n with m = npq +- 1
/// compress the cable space and become m/(n p^2) surgery on the
/// companion; everything else keeps the cable torus incompressible.
pub fn cable_fill(k: &CableKnot, r: &Slope) -> Result<FillResult, SurgeryError> {
    if r.is_meridian() {
        return Ok(FillResult::Lens(k.ambient.clone()));
    }
    check_cable_hypotheses(k)?;
    let a = k.ambient.p();
    let b = k.ambient.q();
    let (p1, q1) = &k.companion;
    let (p, q) = &k.cable;
    let pq = p * q;
    if r.n.is_one() && r.m == pq {
        let companion_slope = pushdown(p, r);
        debug_assert_eq!(companion_slope, Slope::new(q.clone(), p.clone()).unwrap());
        let filled = tk_fill_disk(a, b, p1, q1, &companion_slope)?;
        let mut parts = vec![LensSpace::new(p.clone(), q.clone())?];
        match normalize_closed(&filled)? {
            NormalForm::Lens(l) => parts.push(l),
            NormalForm::Sum(ls) => parts.extend(ls),
            NormalForm::NotLens(d) => return Ok(FillResult::ToroidalOrSFS(d)),
        }
        return Ok(FillResult::Sum(parts));
    }
    if (&r.m - &r.n * &pq).abs().is_one() {
        let companion_slope = Slope::new(r.m.clone(), &r.n * p * p)?;
        let filled = tk_fill_disk(a, b, p1, q1, &companion_slope)?;
        return Ok(normal_form_to_fill(normalize_closed(&filled)?));
    }
    Ok(FillResult::ToroidalOrSFS(format!(
        "slope {r} leaves the cabling torus of ({p},{q}) incompressible"
    )))
}

/// The lens-producing surgeries on a depth-one iterated cable in L(a,b).
/// Nonempty exactly when the cable is [2, 2 p1 q1 + e; p1, q1] with
/// e = +-1, p1 >= 2 and |a q1 - b p1| > 1; the single such slope is
/// 4 p1 q1 + e and the result is L(a + 4 e p1 N, b + 4 e q1 N) with
/// N = a q1 - b p1. Deeper iterations admit no lens surgeries at all.
pub fn iterated_lens_surgeries(
    a: &BigInt,
    b: &BigInt,
    ic: &IteratedCable,
) -> Result<Vec<(Slope, LensSpace)>, SurgeryError> {
    if !a.gcd(b).is_one() {
        return Err(SurgeryError::NotCoprime(a.clone(), b.clone()));
    }
    if ic.stages.len() != 2 {
        return Ok(Vec::new());
    }
    let (p0, q0) = &ic.stages[0];
    let (p1, q1) = &ic.stages[1];
    if *p0 != BigInt::from(2) {
        return Ok(Vec::new());
    }
    let eps = q0 - BigInt::from(2) * p1 * q1;
    if !eps.abs().is_one() {
        return Ok(Vec::new());
    }
    let n_big = a * q1 - b * p1;
    if n_big.abs() <= BigInt::one() {
        return Ok(Vec::new());
    }
    let four = BigInt::from(4);
    let slope = Slope::integer(&four * p1 * q1 + &eps);
    let lens = LensSpace::new(a + &four * &eps * p1 * &n_big, b + &four * &eps * q1 * &n_big)?;
    Ok(vec![(slope, lens)])
}

/// Fill the outer boundary of a linear graph manifold along a slant q'/p'
/// (stored as Slope m/n = q'/p') and collapse outermost-first.
///
/// A single piece closes directly: the slant adds the fiber (n, m).
/// A two-piece chain whose outer piece is a one-fiber cable pattern
/// M(0,2;(p,s)) with s = +-1 collapses for the meridian slant (the cable
/// space compresses reducibly, splitting off L(p,s)) and for integer
/// slants c (the cable space becomes a solid torus and the inner piece
/// gains the fiber (1 + p s c, c p^2)). All other chains stay toroidal.
pub fn fill_graph(g: &GraphManifold, r: &Slope) -> Result<FillResult, SurgeryError> {
    match g.pieces.len() {
        1 => {
            let piece = &g.pieces[0];
            if piece.boundary() != 1 {
                return Ok(FillResult::ToroidalOrSFS(format!(
                    "piece {piece} does not have exactly one boundary torus"
                )));
            }
            let closed = piece.with_fiber(r.n.clone(), r.m.clone())?;
            Ok(normal_form_to_fill(normalize_closed(&closed)?))
        }
        2 => {
            let inner = &g.pieces[0];
            let outer = &g.pieces[1];
            let cable_shape = outer.base() == Base::Orientable0
                && outer.boundary() == 2
                && outer.fibers().len() == 1
                && outer.fibers()[0].0 >= BigInt::from(2)
                && outer.fibers()[0].1.abs().is_one();
            if !cable_shape || inner.boundary() != 1 {
                return Ok(FillResult::ToroidalOrSFS(format!(
                    "chain {g} is not a cable pattern over a one-boundary piece"
                )));
            }
            let (p, s) = &outer.fibers()[0];
            if r.is_meridian() {
                // reducible filling: L(p,s) splits off and the inner piece
                // is filled along the pushed-down cabling slope
                let mut parts = vec![LensSpace::new(p.clone(), s.clone())?];
                let closed = inner.with_fiber(s.clone(), p.clone())?;
                match normalize_closed(&closed)? {
                    NormalForm::Lens(l) => parts.push(l),
                    NormalForm::Sum(ls) => parts.extend(ls),
                    NormalForm::NotLens(d) => return Ok(FillResult::ToroidalOrSFS(d)),
                }
                return Ok(FillResult::Sum(parts));
            }
            if r.n.is_one() {
                let c = &r.m;
                let closed = inner.with_fiber(BigInt::one() + p * s * c, c * p * p)?;
                return Ok(normal_form_to_fill(normalize_closed(&closed)?));
            }
            Ok(FillResult::ToroidalOrSFS(format!(
                "slant {r} leaves the splice torus of {g} incompressible"
            )))
        }
        _ => Ok(FillResult::ToroidalOrSFS(format!(
            "chain of {} pieces does not collapse",
            g.pieces.len()
        ))),
    }
}
