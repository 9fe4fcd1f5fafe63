//! Enumerate and invert the solution families of the two tangle-equation
//! systems, build their solution tangles, and verify every family at the
//! double-branched-cover level.
//!
//! The composite system asks for a tangle O with N(O + 0) = b1 and
//! N(O + inf) = b2 # b3; the lens system asks for N(O + 0) = b1 and
//! N(O + c) = b2 with c = +-1. Families come in six cases: cable shapes
//! over a torus knot with cabling sign +-1 (T1i/T1ii), torus knot shapes
//! (T2i), ring shapes (T2ii), and the two depth-one iterated cable cases
//! (S4a/S4b). Every emitted family carries the result of an independent
//! verification pass through the surgery engine.

use crate::exact::{mod_inverse, ExactError, ExtRational};
use crate::exec;
use crate::seifert::{lens_equiv, LensMode, LensSpace, SeifertError};
use crate::surgery::{fill_graph, FillResult, GraphManifold, Slope, SurgeryError};
use crate::tangle::{circle_product_fraction, dbc_of_tangle, Cover, TangleError, TangleExpr};
use crate::twobridge::{canonical, equivalent, ConnectedSum, MatchMode, TwoBridgeError, TwoBridgeLink};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("product factors must not be the unknot b(1,1)")]
    TrivialProduct,
    #[error("the two links must differ")]
    EqualLinks,
    #[error("family is missing parameter {0}")]
    MissingParam(&'static str),
    #[error("bounds need p and p1 at least 2 and q1 at least 1")]
    BadBounds,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    TwoBridge(#[from] TwoBridgeError),
    #[error(transparent)]
    Seifert(#[from] SeifertError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Tangle(#[from] TangleError),
}

/// Which solution family a result belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    T1i,
    T1ii,
    T2i,
    T2ii,
    S4a,
    S4b,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::T1i => "T1i",
            CaseTag::T1ii => "T1ii",
            CaseTag::T2i => "T2i",
            CaseTag::T2ii => "T2ii",
            CaseTag::S4a => "S4a",
            CaseTag::S4b => "S4b",
        };
        write!(f, "{s}")
    }
}

/// Parameter record; entries a case does not use stay None.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Params {
    pub a: Option<BigInt>,
    pub b: Option<BigInt>,
    pub p1: Option<BigInt>,
    pub q1: Option<BigInt>,
    pub p: Option<BigInt>,
    pub q: Option<BigInt>,
    pub d: Option<BigInt>,
    pub e: Option<BigInt>,
}

/// Right side of the second equation: a composite link or a single link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductSpec {
    Composite(ConnectedSum),
    Lens(TwoBridgeLink),
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductSpec::Composite(s) => write!(f, "{s}"),
            ProductSpec::Lens(l) => write!(f, "{l}"),
        }
    }
}

/// One solution family of a tangle-equation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFamily {
    pub case_tag: CaseTag,
    pub params: Params,
    /// The derived quantity N = a*q1 - b*p1 (or a*q - b*p for T2i).
    pub n: Option<BigInt>,
    pub b1: TwoBridgeLink,
    pub o: TangleExpr,
    pub x1: ExtRational,
    pub x2: ExtRational,
    pub products: ProductSpec,
    pub flags: Vec<String>,
    pub verified: bool,
    pub mismatch: Option<String>,
}

/// Search box for the forward enumeration; the inverse solvers need none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub p: u64,
    pub p1: u64,
    pub q1: u64,
}

impl Bounds {
    pub fn new(p1: u64, q1: u64, p: u64) -> Result<Self, SolverError> {
        if p < 2 || p1 < 2 || q1 < 1 {
            return Err(SolverError::BadBounds);
        }
        Ok(Bounds { p, p1, q1 })
    }
}

/// Per-equation verification outcome with both compared values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqCheck {
    pub pass: bool,
    pub expected: String,
    pub got: String,
}

/// Verification report: the first-equation and second-equation checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub eq1: EqCheck,
    pub eq2: EqCheck,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.eq1.pass && self.eq2.pass
    }

    pub fn mismatch(&self) -> Option<String> {
        if self.pass() {
            return None;
        }
        let mut parts = Vec::new();
        if !self.eq1.pass {
            parts.push(format!(
                "first equation: expected {}, got {}",
                self.eq1.expected, self.eq1.got
            ));
        }
        if !self.eq2.pass {
            parts.push(format!(
                "second equation: expected {}, got {}",
                self.eq2.expected, self.eq2.got
            ));
        }
        Some(parts.join("; "))
    }
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Canonical Bezout pair for p1*d - q1*e = 1 with 0 <= e < p1.
fn canonical_de(p1: &BigInt, q1: &BigInt) -> Result<(BigInt, BigInt), SolverError> {
    let e = (-mod_inverse(q1, p1)?).mod_floor(p1);
    let d = (BigInt::one() + q1 * &e) / p1;
    Ok((d, e))
}

fn require<'p>(x: &'p Option<BigInt>, name: &'static str) -> Result<&'p BigInt, SolverError> {
    x.as_ref().ok_or(SolverError::MissingParam(name))
}

/// Build the solution tangle and filling fractions for a family: the
/// glued cable shape for T1/S4, the two-fraction sum for T2i, and the
/// ring shape for T2ii. X1 is always the 0 tangle.
pub fn build_tangle(
    case_tag: CaseTag,
    params: &Params,
) -> Result<(TangleExpr, ExtRational, ExtRational), SolverError> {
    let zero = ExtRational::zero();
    match case_tag {
        CaseTag::T1i | CaseTag::T1ii | CaseTag::S4a | CaseTag::S4b => {
            let a = require(&params.a, "a")?;
            let b = require(&params.b, "b")?;
            let p1 = require(&params.p1, "p1")?;
            let q1 = require(&params.q1, "q1")?;
            let p = require(&params.p, "p")?;
            let (d, e) = canonical_de(p1, q1)?;
            let n = a * q1 - b * p1;
            let aa = ExtRational::reduce(-&e, p1.clone())?;
            let bb = ExtRational::reduce(a * &d - b * &e, n)?;
            let sign: i8 = match case_tag {
                CaseTag::T1i | CaseTag::S4a => 1,
                _ => -1,
            };
            let inner = TangleExpr::sum(
                TangleExpr::sum(TangleExpr::rational(aa), TangleExpr::rational(bb)),
                TangleExpr::Hole,
            );
            let o = TangleExpr::glued_cable(inner, p.clone(), sign)?;
            let x2 = match case_tag {
                CaseTag::S4a => ExtRational::from_int(-1),
                CaseTag::S4b => ExtRational::from_int(1),
                _ => ExtRational::infinity(),
            };
            Ok((o, zero, x2))
        }
        CaseTag::T2i => {
            let a = require(&params.a, "a")?;
            let b = require(&params.b, "b")?;
            let p = require(&params.p, "p")?;
            let q = require(&params.q, "q")?;
            let (d, e) = canonical_de(p, q)?;
            let aa = ExtRational::reduce(-&e, p.clone())?;
            let bb = ExtRational::reduce(a * &d - b * &e, a * q - b * p)?;
            let o = TangleExpr::sum(TangleExpr::rational(aa), TangleExpr::rational(bb));
            Ok((o, zero, ExtRational::infinity()))
        }
        CaseTag::T2ii => {
            let p = require(&params.p, "p")?;
            let o = TangleExpr::sum(
                TangleExpr::Ring,
                TangleExpr::rational(ExtRational::reduce(1, p.clone())?),
            );
            Ok((o, zero, ExtRational::infinity()))
        }
    }
}

fn slant_of(f: &ExtRational) -> Slope {
    if f.is_infinite() {
        Slope::meridian()
    } else {
        Slope::new(f.num().clone(), f.den().clone()).expect("reduced fraction")
    }
}

fn as_graph(cover: Cover) -> Result<GraphManifold, SolverError> {
    Ok(match cover {
        Cover::Graph(g) => g,
        Cover::Seifert(s) => GraphManifold::new(vec![s])?,
    })
}

/// True when the two collections of lens spaces agree summand-wise under
/// oriented equivalence, in some order.
fn lens_multiset_match(xs: &[LensSpace], ys: &[LensSpace]) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    for x in xs {
        let mut found = false;
        for (i, y) in ys.iter().enumerate() {
            if !used[i] && lens_equiv(x, y, LensMode::Oriented) {
                used[i] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

fn show_lens_list(ls: &[LensSpace]) -> String {
    let parts: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
    parts.join(" # ")
}

/// Check both tangle equations of a family at the cover level: filling
/// the double branched cover of O along the X1 slant must give the cover
/// of b1, and filling along the X2 slant must give the cover of the
/// claimed products.
pub fn verify(fam: &SolutionFamily) -> Result<Report, SolverError> {
    let g = as_graph(dbc_of_tangle(&fam.o)?)?;
    let got1 = fill_graph(&g, &slant_of(&fam.x1))?;
    let expected1 = fam.b1.dbc_link();
    let eq1_pass = matches!(&got1, FillResult::Lens(l) if lens_equiv(l, &expected1, LensMode::Oriented));
    let eq1 = EqCheck {
        pass: eq1_pass,
        expected: expected1.to_string(),
        got: got1.to_string(),
    };

    let got2 = fill_graph(&g, &slant_of(&fam.x2))?;
    let eq2 = match &fam.products {
        ProductSpec::Composite(sum) => {
            let expected = sum.dbc_sum();
            let pass = matches!(&got2, FillResult::Sum(ls) if lens_multiset_match(ls, &expected));
            EqCheck {
                pass,
                expected: show_lens_list(&expected),
                got: got2.to_string(),
            }
        }
        ProductSpec::Lens(link) => {
            let expected = link.dbc_link();
            let pass =
                matches!(&got2, FillResult::Lens(l) if lens_equiv(l, &expected, LensMode::Oriented));
            EqCheck {
                pass,
                expected: expected.to_string(),
                got: got2.to_string(),
            }
        }
    };
    Ok(Report { eq1, eq2 })
}

/// Strip top-level vertical-twist circle factors O o (n,0), twisting the
/// second filling fraction correspondingly, until the canonical
/// representative is reached. Only applies when X1 is the 0 tangle;
/// shapes outside the rule come back unchanged.
pub fn normalize_move(
    o: TangleExpr,
    x1: ExtRational,
    x2: ExtRational,
) -> (TangleExpr, ExtRational, ExtRational) {
    if !x1.is_zero() {
        return (o, x1, x2);
    }
    let mut o = o;
    let mut x2 = x2;
    loop {
        match o {
            TangleExpr::Circle(inner, c) if c.len() == 2 && c[1].is_zero() => {
                x2 = circle_product_fraction(&x2, &c);
                o = *inner;
            }
            other => return (other, x1, x2),
        }
    }
}

fn finish_family(mut fam: SolutionFamily) -> Result<SolutionFamily, SolverError> {
    let report = verify(&fam)?;
    fam.verified = report.pass();
    fam.mismatch = report.mismatch();
    Ok(fam)
}

/// Outcome of a family constructor: the parameters violate a case
/// constraint (None), or a full family.
type FamilyResult = Result<Option<SolutionFamily>, SolverError>;

fn t1_family(
    b1: &TwoBridgeLink,
    p1: &BigInt,
    q1: &BigInt,
    p: &BigInt,
    eps: i64,
) -> FamilyResult {
    let a = b1.alpha().clone();
    let b = b1.beta().clone();
    let eps_big = big(eps);
    if p1 < &big(2) || p < &big(2) || !p1.gcd(q1).is_one() {
        return Ok(None);
    }
    let n = &a * q1 - &b * p1;
    if n.abs() <= BigInt::one() {
        return Ok(None);
    }
    let q = p * p1 * q1 + &eps_big;
    let alpha3 = &a + &eps_big * p * p1 * &n;
    let beta3 = &b + &eps_big * p * q1 * &n;
    if alpha3.abs().is_one() {
        // trivial second factor; the products degenerate to a single link
        return Ok(None);
    }
    let mut flags = vec!["ab-variants-equivalent".to_string()];
    if alpha3.is_zero() {
        flags.push("boundary-case".to_string());
    }
    if a.is_zero() {
        flags.push("infinite-family:q1-mod-p1".to_string());
    }
    let first = canonical(p.clone(), q.clone())?;
    let second = canonical(alpha3, beta3)?;
    let (d, e) = canonical_de(p1, q1)?;
    let params = Params {
        a: Some(a),
        b: Some(b),
        p1: Some(p1.clone()),
        q1: Some(q1.clone()),
        p: Some(p.clone()),
        q: Some(q),
        d: Some(d),
        e: Some(e),
    };
    let case_tag = if eps == 1 { CaseTag::T1i } else { CaseTag::T1ii };
    let (o, x1, x2) = build_tangle(case_tag, &params)?;
    let fam = SolutionFamily {
        case_tag,
        params,
        n: Some(n),
        b1: b1.clone(),
        o,
        x1,
        x2,
        products: ProductSpec::Composite(ConnectedSum::new([first, second])),
        flags,
        verified: false,
        mismatch: None,
    };
    Ok(Some(finish_family(fam)?))
}

fn t2i_family(b1: &TwoBridgeLink, p: &BigInt, q: &BigInt) -> FamilyResult {
    let a = b1.alpha().clone();
    let b = b1.beta().clone();
    if p < &big(2) || !p.gcd(q).is_one() {
        return Ok(None);
    }
    let n = &a * q - &b * p;
    if n.abs() <= BigInt::one() {
        return Ok(None);
    }
    let (d, e) = canonical_de(p, q)?;
    let first = canonical(p.clone(), -&e)?;
    let second = canonical(n.clone(), &a * &d - &b * &e)?;
    let mut flags = Vec::new();
    if a.is_zero() {
        flags.push("infinite-family:q-mod-p".to_string());
    }
    let params = Params {
        a: Some(a),
        b: Some(b),
        p: Some(p.clone()),
        q: Some(q.clone()),
        d: Some(d),
        e: Some(e),
        ..Params::default()
    };
    let (o, x1, x2) = build_tangle(CaseTag::T2i, &params)?;
    let fam = SolutionFamily {
        case_tag: CaseTag::T2i,
        params,
        n: Some(n),
        b1: b1.clone(),
        o,
        x1,
        x2,
        products: ProductSpec::Composite(ConnectedSum::new([first, second])),
        flags,
        verified: false,
        mismatch: None,
    };
    Ok(Some(finish_family(fam)?))
}

fn t2ii_family(b1: &TwoBridgeLink, p: &BigInt) -> FamilyResult {
    if p.abs() <= BigInt::one() {
        return Ok(None);
    }
    let expected_b1 = canonical(big(4) * p, BigInt::one() - big(2) * p)?;
    if &expected_b1 != b1 {
        return Ok(None);
    }
    let first = TwoBridgeLink::unlink();
    let second = canonical(p.clone(), BigInt::one())?;
    let params = Params {
        p: Some(p.clone()),
        ..Params::default()
    };
    let (o, x1, x2) = build_tangle(CaseTag::T2ii, &params)?;
    let fam = SolutionFamily {
        case_tag: CaseTag::T2ii,
        params,
        n: None,
        b1: b1.clone(),
        o,
        x1,
        x2,
        products: ProductSpec::Composite(ConnectedSum::new([first, second])),
        flags: Vec::new(),
        verified: false,
        mismatch: None,
    };
    Ok(Some(finish_family(fam)?))
}

fn s4_family(b1: &TwoBridgeLink, p1: &BigInt, q1: &BigInt, eps: i64) -> FamilyResult {
    let a = b1.alpha().clone();
    let b = b1.beta().clone();
    let eps_big = big(eps);
    if p1 < &big(2) || !p1.gcd(q1).is_one() {
        return Ok(None);
    }
    let n = &a * q1 - &b * p1;
    if n.abs() <= BigInt::one() {
        return Ok(None);
    }
    let alpha2 = &a + big(4) * &eps_big * p1 * &n;
    let beta2 = &b + big(4) * &eps_big * q1 * &n;
    if alpha2.abs().is_one() {
        return Ok(None);
    }
    let mut flags = vec!["ab-variants-equivalent".to_string()];
    if alpha2.is_zero() {
        flags.push("boundary-case".to_string());
    }
    if a.is_zero() {
        flags.push("infinite-family:q1-mod-p1".to_string());
    }
    let b2 = canonical(alpha2, beta2)?;
    let (d, e) = canonical_de(p1, q1)?;
    let q0 = big(2) * p1 * q1 + &eps_big;
    let params = Params {
        a: Some(a),
        b: Some(b),
        p1: Some(p1.clone()),
        q1: Some(q1.clone()),
        p: Some(big(2)),
        q: Some(q0),
        d: Some(d),
        e: Some(e),
    };
    let case_tag = if eps == 1 { CaseTag::S4a } else { CaseTag::S4b };
    let (o, x1, x2) = build_tangle(case_tag, &params)?;
    let fam = SolutionFamily {
        case_tag,
        params,
        n: Some(n),
        b1: b1.clone(),
        o,
        x1,
        x2,
        products: ProductSpec::Lens(b2),
        flags,
        verified: false,
        mismatch: None,
    };
    Ok(Some(finish_family(fam)?))
}

fn sort_and_dedupe(mut fams: Vec<SolutionFamily>) -> Vec<SolutionFamily> {
    fams.sort_by(|x, y| {
        (x.case_tag, &x.params).cmp(&(y.case_tag, &y.params))
    });
    let mut seen: BTreeSet<(CaseTag, Params)> = BTreeSet::new();
    fams.retain(|f| seen.insert((f.case_tag, f.params.clone())));
    fams
}

/// Forward enumeration of composite-system families with b1 fixed:
/// every cable family (T1i/T1ii) and torus-knot family (T2i) inside the
/// bounds, plus the ring family (T2ii) when b1 has the b(4p, 1-2p) shape.
pub fn enumerate_composite(
    b1: &TwoBridgeLink,
    bounds: &Bounds,
) -> Result<Vec<SolutionFamily>, SolverError> {
    let a_is_zero = b1.alpha().is_zero();
    let q1_max = bounds.q1 as i64;

    let mut t1_tuples: Vec<(i64, i64, i64, i64)> = Vec::new();
    for p1 in 2..=bounds.p1 as i64 {
        // with a = 0 the products depend on q1 only mod p1, so the class
        // representatives 1..p1 enumerate the distinct families
        let q1_range: Vec<i64> = if a_is_zero {
            (1..=p1.min(q1_max)).collect()
        } else {
            (-q1_max..=q1_max).collect()
        };
        for q1 in q1_range {
            for p in 2..=bounds.p as i64 {
                for eps in [1, -1] {
                    t1_tuples.push((p1, q1, p, eps));
                }
            }
        }
    }
    let b1_for_t1 = b1.clone();
    let t1_results: Vec<Result<Option<SolutionFamily>, SolverError>> =
        exec::flat_map(t1_tuples, move |&(p1, q1, p, eps)| {
            vec![t1_family(&b1_for_t1, &big(p1), &big(q1), &big(p), eps)]
        });

    let mut fams: Vec<SolutionFamily> = Vec::new();
    for r in t1_results {
        if let Some(f) = r? {
            fams.push(f);
        }
    }

    let q_max = bounds.q1 as i64;
    let q_range: Vec<i64> = if a_is_zero {
        (1..=q_max).collect()
    } else {
        (-q_max..=q_max).collect()
    };
    for p in 2..=bounds.p as i64 {
        for &q in &q_range {
            if a_is_zero && q > p {
                continue;
            }
            if let Some(f) = t2i_family(b1, &big(p), &big(q))? {
                fams.push(f);
            }
        }
    }

    let four = big(4);
    if (b1.alpha() % &four).is_zero() && !b1.alpha().is_zero() {
        let k = b1.alpha() / &four;
        for p in [k.clone(), -k] {
            if let Some(f) = t2ii_family(b1, &p)? {
                fams.push(f);
            }
        }
    }

    Ok(sort_and_dedupe(fams))
}

/// Positive divisors of |n|.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let root = n.sqrt();
    let mut d = BigInt::one();
    while d <= root {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

fn product_pair_matches(
    fam: &SolutionFamily,
    b2: &TwoBridgeLink,
    b3: &TwoBridgeLink,
    mode: MatchMode,
) -> bool {
    let ProductSpec::Composite(sum) = &fam.products else {
        return false;
    };
    let got = sum.summands();
    let want = [b2.clone(), b3.clone()];
    if got.len() != want.len() {
        return false;
    }
    // two-element multiset match under the requested link equivalence
    (equivalent(&got[0], &want[0], mode)
        && equivalent(&got[1], &want[1], mode))
        || (equivalent(&got[0], &want[1], mode)
            && equivalent(&got[1], &want[0], mode))
}

/// Candidate (p1, q1) splits of the product identity alpha3 = a + eps*p*p1*N
/// with N = a*q1 - b*p1, via exact divisor enumeration of T = p1*N.
fn divisor_splits(
    a: &BigInt,
    b: &BigInt,
    t: &BigInt,
) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    if a.is_zero() {
        // N = -p1 is forced, so T = -p1^2: p1 comes from the square root
        // and q1 runs over the residues mod p1 (same products throughout)
        if t.is_positive() || t.is_zero() {
            return out;
        }
        let abs = t.abs();
        let p1 = abs.sqrt();
        if &p1 * &p1 != abs || p1 < big(2) {
            return out;
        }
        let mut q1 = BigInt::one();
        while q1 <= p1 {
            if p1.gcd(&q1).is_one() {
                out.push((p1.clone(), q1.clone()));
            }
            q1 += 1;
        }
        return out;
    }
    for p1 in divisors(t) {
        if p1 < big(2) {
            continue;
        }
        let n = t / &p1;
        if n.abs() <= BigInt::one() {
            continue;
        }
        let num = &n + b * &p1;
        if !(&num % a).is_zero() {
            continue;
        }
        let q1 = num / a;
        if !p1.gcd(&q1).is_one() {
            continue;
        }
        out.push((p1, q1));
    }
    out
}

pub fn solve_composite(
    b1: &TwoBridgeLink,
    b2: &TwoBridgeLink,
    b3: &TwoBridgeLink,
) -> Result<Vec<SolutionFamily>, SolverError> {
    solve_composite_with_mode(b1, b2, b3, MatchMode::Strict)
}

/// Complete inverse of the composite system N(O+0) = b1, N(O+inf) = b2 # b3
/// over the six families, by exact divisor enumeration. Both assignments
/// of {b2, b3} to the two factors are tried; duplicates are removed and
/// the output is sorted by (case, parameters).
pub fn solve_composite_with_mode(
    b1: &TwoBridgeLink,
    b2: &TwoBridgeLink,
    b3: &TwoBridgeLink,
    mode: MatchMode,
) -> Result<Vec<SolutionFamily>, SolverError> {
    if b2.is_unknot() || b3.is_unknot() {
        return Err(SolverError::TrivialProduct);
    }
    let a = b1.alpha().clone();
    let b = b1.beta().clone();
    let mut fams: Vec<SolutionFamily> = Vec::new();
    let push_if_match = |f: Option<SolutionFamily>, fams: &mut Vec<SolutionFamily>| {
        if let Some(f) = f {
            if product_pair_matches(&f, b2, b3, mode) {
                fams.push(f);
            }
        }
    };

    for (first, second) in [(b2, b3), (b3, b2)] {
        // cable families: first factor b(p, q) with q = p*p1*q1 + eps
        let p = first.alpha();
        if p >= &big(2) {
            for eps in [1i64, -1] {
                let first_class = canonical(p.clone(), big(eps))?;
                if !equivalent(first, &first_class, MatchMode::Strict) {
                    continue;
                }
                for delta in [1i64, -1] {
                    // alpha3 = a + eps*p*T with T = p1*N
                    let d_num = big(delta) * second.alpha() - &a;
                    let denom = big(eps) * p;
                    if !(&d_num % &denom).is_zero() {
                        continue;
                    }
                    let t = d_num / denom;
                    for (p1, q1) in divisor_splits(&a, &b, &t) {
                        push_if_match(t1_family(b1, &p1, &q1, p, eps)?, &mut fams);
                    }
                }
            }
        }

        // torus knot families: a*q - b*p = +-alpha3
        if p >= &big(2) && second.alpha() >= &big(2) {
            if a.is_zero() {
                // N = -p is forced; q matters only mod p
                if second.alpha() == p {
                    let mut q = BigInt::one();
                    while &q <= p {
                        push_if_match(t2i_family(b1, p, &q)?, &mut fams);
                        q += 1;
                    }
                }
            } else {
                for delta in [1i64, -1] {
                    let num = big(delta) * second.alpha() + &b * p;
                    if !(&num % &a).is_zero() {
                        continue;
                    }
                    let q = num / &a;
                    push_if_match(t2i_family(b1, p, &q)?, &mut fams);
                }
            }
        }

        // ring families: b(0,1) # b(p,1) pattern
        if first == &TwoBridgeLink::unlink() {
            let cap = second.alpha();
            if cap >= &big(2) {
                for p in [cap.clone(), -cap] {
                    push_if_match(t2ii_family(b1, &p)?, &mut fams);
                }
            }
        }
    }
    Ok(sort_and_dedupe(fams))
}

pub fn solve_lens(
    b1: &TwoBridgeLink,
    b2: &TwoBridgeLink,
) -> Result<Vec<SolutionFamily>, SolverError> {
    solve_lens_with_mode(b1, b2, MatchMode::Strict)
}

/// Complete inverse of the lens system N(O+0) = b1, N(O+c) = b2 with
/// c = -1 (case a) or +1 (case b), through the identity
/// b2 = b(a + 4*eps*p1*N, b + 4*eps*q1*N).
pub fn solve_lens_with_mode(
    b1: &TwoBridgeLink,
    b2: &TwoBridgeLink,
    mode: MatchMode,
) -> Result<Vec<SolutionFamily>, SolverError> {
    if equivalent(b1, b2, MatchMode::Strict) {
        return Err(SolverError::EqualLinks);
    }
    let a = b1.alpha().clone();
    let b = b1.beta().clone();
    let mut fams: Vec<SolutionFamily> = Vec::new();
    for eps in [1i64, -1] {
        for delta in [1i64, -1] {
            let num = big(delta) * b2.alpha() - &a;
            let denom = big(4 * eps);
            if !(&num % &denom).is_zero() {
                continue;
            }
            let t = num / denom;
            for (p1, q1) in divisor_splits(&a, &b, &t) {
                if let Some(f) = s4_family(b1, &p1, &q1, eps)? {
                    let matches = match &f.products {
                        ProductSpec::Lens(l) => equivalent(l, b2, mode),
                        _ => false,
                    };
                    if matches {
                        fams.push(f);
                    }
                }
            }
        }
    }
    Ok(sort_and_dedupe(fams))
}

/// Sweep every slant m/n with |m| <= max, 0 <= n <= max other than the
/// family's own two slants, and report any that reproduces either target:
/// the first equation's lens space or the second equation's products.
/// Ok(()) means the two family slants are the only producers in the
/// window.
pub fn uniqueness_sweep(fam: &SolutionFamily, max: i64) -> Result<(), String> {
    let g = as_graph(dbc_of_tangle(&fam.o).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let s1 = slant_of(&fam.x1);
    let s2 = slant_of(&fam.x2);
    let target1 = fam.b1.dbc_link();
    for n in 0..=max {
        for m in -max..=max {
            let Ok(s) = Slope::new(m, n) else { continue };
            if (s.m(), s.n()) != (&big(m), &big(n)) {
                continue; // only reduced representatives once
            }
            if s == s1 || s == s2 {
                continue;
            }
            let filled = fill_graph(&g, &s).map_err(|e| e.to_string())?;
            match (&filled, &fam.products) {
                (FillResult::Lens(l), ProductSpec::Lens(b2)) => {
                    if lens_equiv(l, &target1, LensMode::Oriented) {
                        return Err(format!("slant {s} also yields {l} matching the first equation"));
                    }
                    if lens_equiv(l, &b2.dbc_link(), LensMode::Oriented) {
                        return Err(format!("slant {s} also yields {l} matching the second equation"));
                    }
                }
                (FillResult::Lens(l), _) => {
                    if lens_equiv(l, &target1, LensMode::Oriented) {
                        return Err(format!("slant {s} also yields {l} matching the first equation"));
                    }
                }
                (FillResult::Sum(ls), ProductSpec::Composite(sum))
                    if lens_multiset_match(ls, &sum.dbc_sum()) =>
                {
                    return Err(format!(
                        "slant {s} also yields {} matching the second equation",
                        show_lens_list(ls)
                    ));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::print_tangle;

    fn link(a: i64, b: i64) -> TwoBridgeLink {
        canonical(a, b).unwrap()
    }

    fn bounds() -> Bounds {
        Bounds::new(4, 5, 4).unwrap()
    }

    fn find<'f>(
        fams: &'f [SolutionFamily],
        case_tag: CaseTag,
        pick: &[(&str, i64)],
    ) -> Option<&'f SolutionFamily> {
        fams.iter().find(|f| {
            f.case_tag == case_tag
                && pick.iter().all(|(k, v)| {
                    let slot = match *k {
                        "a" => &f.params.a,
                        "b" => &f.params.b,
                        "p1" => &f.params.p1,
                        "q1" => &f.params.q1,
                        "p" => &f.params.p,
                        "q" => &f.params.q,
                        "d" => &f.params.d,
                        "e" => &f.params.e,
                        _ => unreachable!(),
                    };
                    slot.as_ref() == Some(&big(*v))
                })
        })
    }

    fn composite_products(f: &SolutionFamily) -> Vec<TwoBridgeLink> {
        match &f.products {
            ProductSpec::Composite(s) => s.summands().to_vec(),
            _ => panic!("expected composite products"),
        }
    }

    #[test]
    fn enumerate_unknot_contains_the_cable_example() {
        let fams = enumerate_composite(&link(1, 1), &bounds()).unwrap();
        let f = find(&fams, CaseTag::T1i, &[("p1", 2), ("q1", 5), ("p", 2)])
            .expect("cable family (2,5,2) present");
        assert_eq!(f.params.q, Some(big(21)));
        assert_eq!(
            composite_products(f),
            vec![link(2, 1), link(13, 5)]
        );
        assert_eq!(
            print_tangle(&f.o),
            "glue(-1/2 + 2/3 + []; p=2, s=+1)"
        );
        assert!(f.x1.is_zero());
        assert!(f.x2.is_infinite());
        assert!(f.verified, "{:?}", f.mismatch);
        assert!(fams.iter().all(|f| f.verified));
    }

    #[test]
    fn enumerate_t2i_example() {
        let fams = enumerate_composite(&link(5, 1), &bounds()).unwrap();
        let f = find(&fams, CaseTag::T2i, &[("p", 2), ("q", 1)]).expect("torus knot family (2,1)");
        assert_eq!(f.params.d, Some(big(1)));
        assert_eq!(f.params.e, Some(big(1)));
        assert_eq!(composite_products(f), vec![link(2, 1), link(3, 1)]);
        assert_eq!(print_tangle(&f.o), "-1/2 + 4/3");
        assert!(f.verified, "{:?}", f.mismatch);
    }

    #[test]
    fn enumerate_t2ii_example() {
        let fams = enumerate_composite(&link(8, 5), &bounds()).unwrap();
        let f = find(&fams, CaseTag::T2ii, &[("p", 2)]).expect("ring family p=2");
        assert_eq!(composite_products(f), vec![link(0, 1), link(2, 1)]);
        assert_eq!(print_tangle(&f.o), "ring + 1/2");
        assert!(f.verified, "{:?}", f.mismatch);
        // negative p side: b(-12,7) = b(12,5)
        let fams2 = enumerate_composite(&link(12, 5), &bounds()).unwrap();
        let f2 = find(&fams2, CaseTag::T2ii, &[("p", -3)]).expect("ring family p=-3");
        assert_eq!(composite_products(f2), vec![link(0, 1), link(3, 2)]);
        assert_eq!(print_tangle(&f2.o), "ring + -1/3");
    }

    #[test]
    fn solve_composite_recovers_the_cable_example() {
        let fams = solve_composite(&link(1, 1), &link(2, 1), &link(13, 5)).unwrap();
        let f = find(&fams, CaseTag::T1i, &[("p1", 2), ("q1", 5), ("p", 2), ("q", 21)])
            .expect("recovered (2,5,2,21)");
        assert!(f.verified, "{:?}", f.mismatch);
        assert!(fams.iter().all(|f| f.verified));
        // exactly one family carries these parameters
        let count = fams
            .iter()
            .filter(|f| {
                f.case_tag == CaseTag::T1i
                    && f.params.p1 == Some(big(2))
                    && f.params.q1 == Some(big(5))
            })
            .count();
        assert_eq!(count, 1);
    }

    #[test]
    fn solve_composite_t2_examples() {
        let fams = solve_composite(&link(5, 1), &link(2, 1), &link(3, 1)).unwrap();
        assert!(find(&fams, CaseTag::T2i, &[("p", 2), ("q", 1)]).is_some());

        let fams2 = solve_composite(&link(8, 5), &link(0, 1), &link(2, 1)).unwrap();
        assert!(find(&fams2, CaseTag::T2ii, &[("p", 2)]).is_some());
        // assignment order must not matter
        let fams3 = solve_composite(&link(8, 5), &link(2, 1), &link(0, 1)).unwrap();
        assert_eq!(fams2.len(), fams3.len());
    }

    #[test]
    fn solve_composite_negative_and_precondition() {
        assert!(solve_composite(&link(1, 1), &link(2, 1), &link(2, 1))
            .unwrap()
            .is_empty());
        assert!(matches!(
            solve_composite(&link(1, 1), &link(1, 1), &link(13, 5)),
            Err(SolverError::TrivialProduct)
        ));
    }

    #[test]
    fn solve_round_trips_through_enumerate() {
        let b1 = link(1, 1);
        for f in enumerate_composite(&b1, &Bounds::new(3, 3, 3).unwrap()).unwrap() {
            let prods = composite_products(&f);
            let back = solve_composite(&b1, &prods[0], &prods[1]).unwrap();
            assert!(
                back.iter()
                    .any(|g| g.case_tag == f.case_tag && g.params == f.params),
                "family {:?} {:?} not recovered",
                f.case_tag,
                f.params
            );
        }
    }

    #[test]
    fn solve_lens_examples() {
        let fams = solve_lens(&link(1, 1), &link(25, 11)).unwrap();
        let f = find(&fams, CaseTag::S4a, &[("p1", 2), ("q1", 5)]).expect("S4a (2,5)");
        assert_eq!(f.params.q, Some(big(21)));
        assert_eq!(f.x2, ExtRational::from_int(-1));
        assert!(f.verified, "{:?}", f.mismatch);
        assert!(fams.iter().all(|f| f.verified));

        let fams2 = solve_lens(&link(1, 1), &link(23, 13)).unwrap();
        let f2 = find(&fams2, CaseTag::S4b, &[("p1", 2), ("q1", 5)]).expect("S4b (2,5)");
        assert_eq!(f2.params.q, Some(big(19)));
        assert_eq!(f2.x2, ExtRational::from_int(1));
        assert!(f2.verified, "{:?}", f2.mismatch);

        assert!(solve_lens(&link(1, 1), &link(2, 1)).unwrap().is_empty());
        assert!(matches!(
            solve_lens(&link(5, 2), &link(5, 3)),
            Err(SolverError::EqualLinks)
        ));
    }

    #[test]
    fn build_tangle_examples() {
        let params = Params {
            a: Some(big(1)),
            b: Some(big(1)),
            p1: Some(big(2)),
            q1: Some(big(5)),
            p: Some(big(2)),
            q: Some(big(21)),
            d: Some(big(3)),
            e: Some(big(1)),
        };
        let (o, x1, x2) = build_tangle(CaseTag::T1i, &params).unwrap();
        assert_eq!(print_tangle(&o), "glue(-1/2 + 2/3 + []; p=2, s=+1)");
        assert!(x1.is_zero());
        assert!(x2.is_infinite());

        let (o2, _, x2b) = build_tangle(CaseTag::S4b, &params).unwrap();
        assert_eq!(print_tangle(&o2), "glue(-1/2 + 2/3 + []; p=2, s=-1)");
        assert_eq!(x2b, ExtRational::from_int(1));

        let t2 = Params {
            a: Some(big(5)),
            b: Some(big(1)),
            p: Some(big(2)),
            q: Some(big(1)),
            ..Params::default()
        };
        let (o3, _, _) = build_tangle(CaseTag::T2i, &t2).unwrap();
        assert_eq!(print_tangle(&o3), "-1/2 + 4/3");

        let ring = Params { p: Some(big(3)), ..Params::default() };
        let (o4, _, _) = build_tangle(CaseTag::T2ii, &ring).unwrap();
        assert_eq!(print_tangle(&o4), "ring + 1/3");
    }

    #[test]
    fn changing_bezout_choice_keeps_products() {
        // (d,e) -> (d + t*q1, e + t*p1) shifts (A,B) to (A-t, B+t) and
        // canonical products are unchanged
        for (a, b, p1, q1) in [(1i64, 1i64, 2i64, 5i64), (5, 2, 3, 4), (7, 3, 2, -3)] {
            let (d, e) = canonical_de(&big(p1), &big(q1)).unwrap();
            for t in [-2i64, 1, 3] {
                let d2 = &d + big(t) * big(q1);
                let e2 = &e + big(t) * big(p1);
                assert_eq!(&big(p1) * &d2 - &big(q1) * &e2, big(1));
                let n = big(a) * big(q1) - big(b) * big(p1);
                let b_of = |d: &BigInt, e: &BigInt| {
                    ExtRational::reduce(big(a) * d - big(b) * e, n.clone()).unwrap()
                };
                let a_of =
                    |e: &BigInt| ExtRational::reduce(-e, big(p1)).unwrap();
                let shift = ExtRational::from_int(t);
                assert_eq!(a_of(&e2), a_of(&e).add(&shift.neg()));
                assert_eq!(b_of(&d2, &e2), b_of(&d, &e).add(&shift));
            }
        }
    }

    #[test]
    fn verify_negative_controls() {
        let fams = solve_composite(&link(1, 1), &link(2, 1), &link(13, 5)).unwrap();
        let f = find(&fams, CaseTag::T1i, &[("p1", 2), ("q1", 5), ("p", 2)]).unwrap();

        // corrupt the inner companion parameter and rebuild the tangle,
        // keeping the claimed products: the second equation must fail
        let mut corrupted = f.clone();
        let q1 = corrupted.params.q1.take().unwrap() + big(2);
        corrupted.params.q1 = Some(q1);
        let (o, x1, x2) = build_tangle(corrupted.case_tag, &corrupted.params).unwrap();
        corrupted.o = o;
        corrupted.x1 = x1;
        corrupted.x2 = x2;
        let report = verify(&corrupted).unwrap();
        assert!(report.eq1.pass, "ambient filling is insensitive to q1");
        assert!(!report.eq2.pass);
        assert!(report.mismatch().unwrap().contains("second equation"));

        // corrupt the claimed products: the second equation must fail
        let mut wrong_products = f.clone();
        wrong_products.products =
            ProductSpec::Composite(ConnectedSum::new([link(3, 1), link(13, 5)]));
        let report2 = verify(&wrong_products).unwrap();
        assert!(report2.eq1.pass);
        assert!(!report2.eq2.pass);

        // corrupt the first-equation target: the first equation must fail
        let mut wrong_b1 = f.clone();
        wrong_b1.b1 = link(3, 1);
        let report3 = verify(&wrong_b1).unwrap();
        assert!(!report3.eq1.pass);
        assert!(report3.eq2.pass);
        assert!(report3.mismatch().unwrap().contains("first equation"));
    }

    #[test]
    fn normalize_move_examples() {
        let fams = solve_composite(&link(5, 1), &link(2, 1), &link(3, 1)).unwrap();
        let f = find(&fams, CaseTag::T2i, &[("p", 2), ("q", 1)]).unwrap();

        // twist O by (3,0) and untwist X2 accordingly: the move undoes it
        let twisted_o = TangleExpr::Circle(Box::new(f.o.clone()), vec![big(3), big(0)]);
        let twisted_x2 =
            circle_product_fraction(&f.x2, &[big(-3), big(0)]);
        let (o, x1, x2) = normalize_move(twisted_o, f.x1.clone(), twisted_x2);
        assert_eq!(o, f.o);
        assert!(x1.is_zero());
        assert_eq!(x2, f.x2);

        // fixed point
        let (o2, _, x2b) = normalize_move(f.o.clone(), f.x1.clone(), f.x2.clone());
        assert_eq!(o2, f.o);
        assert_eq!(x2b, f.x2);

        // empty twist strips without changing X2
        let wrapped = TangleExpr::Circle(Box::new(f.o.clone()), vec![big(0), big(0)]);
        let (o3, _, x2c) = normalize_move(wrapped, f.x1.clone(), f.x2.clone());
        assert_eq!(o3, f.o);
        assert_eq!(x2c, f.x2);

        // nonzero X1 is outside the rule: unchanged
        let wrapped2 = TangleExpr::Circle(Box::new(f.o.clone()), vec![big(2), big(0)]);
        let (o4, _, _) = normalize_move(
            wrapped2.clone(),
            ExtRational::from_int(1),
            f.x2.clone(),
        );
        assert_eq!(o4, wrapped2);
    }

    #[test]
    fn uniqueness_sweep_on_representatives() {
        let fams = solve_composite(&link(1, 1), &link(2, 1), &link(13, 5)).unwrap();
        let f = find(&fams, CaseTag::T1i, &[("p1", 2), ("q1", 5), ("p", 2)]).unwrap();
        uniqueness_sweep(f, 12).unwrap();

        let t2 = solve_composite(&link(5, 1), &link(2, 1), &link(3, 1)).unwrap();
        uniqueness_sweep(&t2[0], 12).unwrap();

        let s4 = solve_lens(&link(1, 1), &link(25, 11)).unwrap();
        let f4 = find(&s4, CaseTag::S4a, &[("p1", 2), ("q1", 5)]).unwrap();
        uniqueness_sweep(f4, 12).unwrap();
    }

    #[test]
    fn unlink_ambient_families_are_class_representatives() {
        let fams = enumerate_composite(&link(0, 1), &bounds()).unwrap();
        assert!(!fams.is_empty());
        for f in &fams {
            assert!(f.verified, "{:?} {:?}", f.params, f.mismatch);
            if matches!(f.case_tag, CaseTag::T1i | CaseTag::T1ii) {
                assert!(f.flags.iter().any(|x| x == "infinite-family:q1-mod-p1"));
                let q1 = f.params.q1.clone().unwrap();
                let p1 = f.params.p1.clone().unwrap();
                assert!(BigInt::one() <= q1 && q1 <= p1);
            }
        }
        // the inverse solver returns the same class representatives
        let f = fams
            .iter()
            .find(|f| matches!(f.case_tag, CaseTag::T1i))
            .expect("a cable family over the unlink");
        let prods = composite_products(f);
        let back = solve_composite(&link(0, 1), &prods[0], &prods[1]).unwrap();
        assert!(back
            .iter()
            .any(|g| g.case_tag == f.case_tag && g.params == f.params));
    }

    #[test]
    fn divisor_enumeration() {
        let ds = divisors(&big(12));
        assert_eq!(ds, vec![big(1), big(2), big(3), big(4), big(6), big(12)]);
        assert_eq!(divisors(&big(-49)), vec![big(1), big(7), big(49)]);
        assert!(divisors(&big(0)).is_empty());
    }
}
