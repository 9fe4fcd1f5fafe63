//! Symbolic tangles: the fraction calculus, numerator/denominator
//! closures, and the double-branched-cover dictionary.
//!
//! A tangle expression is a tree of rational leaves combined by addition,
//! multiplication and circle products, plus the special shapes that occur
//! in solution tangles: the ring tangle, Montesinos pairs with holes, and
//! the glued cable pattern (an inner Montesinos piece with one hole whose
//! boundary is wrapped by a (p, p*k +- 1) cable pattern).

use crate::exact::ExtRational;
use crate::seifert::{Base, SeifertData, SeifertError};
use crate::surgery::{GraphManifold, SurgeryError};
use crate::twobridge::{canonical, TwoBridgeLink};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TangleError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no double branched cover rule for this shape: {0}")]
    Unsupported(String),
    #[error("cable pattern order must be at least 2, got {0}")]
    BadCableOrder(BigInt),
    #[error("cable pattern sign must be +1 or -1, got {0}")]
    BadCableSign(i8),
    #[error("montesinos pair lists {listed} hole entries but declares {declared} holes")]
    HoleMismatch { listed: usize, declared: usize },
    #[error(transparent)]
    Seifert(#[from] SeifertError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// Entry of a Montesinos pair: a rational slot or an open hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MpEntry {
    Fraction(ExtRational),
    Hole,
}

/// A tangle expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TangleExpr {
    Rational(ExtRational),
    Hole,
    Ring,
    Sum(Box<TangleExpr>, Box<TangleExpr>),
    Mult(Box<TangleExpr>, Box<TangleExpr>),
    Circle(Box<TangleExpr>, Vec<BigInt>),
    MontesinosPair {
        base: Base,
        holes: usize,
        entries: Vec<MpEntry>,
    },
    GluedCable {
        inner: Box<TangleExpr>,
        p: BigInt,
        sign: i8,
    },
}

impl TangleExpr {
    pub fn rational(f: ExtRational) -> Self {
        TangleExpr::Rational(f)
    }

    pub fn sum(left: TangleExpr, right: TangleExpr) -> Self {
        TangleExpr::Sum(Box::new(left), Box::new(right))
    }

    pub fn mult(left: TangleExpr, right: TangleExpr) -> Self {
        TangleExpr::Mult(Box::new(left), Box::new(right))
    }

    pub fn glued_cable(inner: TangleExpr, p: BigInt, sign: i8) -> Result<Self, TangleError> {
        if p < BigInt::from(2) {
            return Err(TangleError::BadCableOrder(p));
        }
        if sign != 1 && sign != -1 {
            return Err(TangleError::BadCableSign(sign));
        }
        Ok(TangleExpr::GluedCable { inner: Box::new(inner), p, sign })
    }
}

/// One vertical-then-horizontal twist pair of the circle product: entries
/// at even index are bottom twists f -> 1/(1/f + c), entries at odd index
/// are right twists f -> f + c.
pub fn circle_product_fraction(f: &ExtRational, c: &[BigInt]) -> ExtRational {
    let mut acc = f.clone();
    for (i, twist) in c.iter().enumerate() {
        let t = ExtRational::from_int(twist.clone());
        if i % 2 == 0 {
            acc = acc.recip().add(&t).recip();
        } else {
            acc = acc.add(&t);
        }
    }
    acc
}

/// Classifying fraction of a rational construction, or None when the
/// expression is not rational (Montesinos sums of non-integer tangles,
/// rings, holes, pairs, glued cables).
pub fn fraction_of(t: &TangleExpr) -> Option<ExtRational> {
    match t {
        TangleExpr::Rational(f) => Some(f.clone()),
        TangleExpr::Circle(inner, c) => {
            let f = fraction_of(inner)?;
            Some(circle_product_fraction(&f, c))
        }
        TangleExpr::Sum(l, r) => {
            let fl = fraction_of(l)?;
            let fr = fraction_of(r)?;
            // the infinity tangle absorbs sums; otherwise addition stays
            // rational only when one side is an integer twist
            if fl.is_infinite() || fr.is_infinite() {
                return Some(ExtRational::infinity());
            }
            if fl.is_integer() || fr.is_integer() {
                Some(fl.add(&fr))
            } else {
                None
            }
        }
        TangleExpr::Mult(l, r) => {
            let fl = fraction_of(l)?;
            let fr = fraction_of(r)?;
            // the zero tangle absorbs products; otherwise multiplication
            // stays rational only when one side is a vertical twist 1/c
            if fl.is_zero() || fr.is_zero() {
                return Some(ExtRational::zero());
            }
            if fl.num().abs().is_one() || fr.num().abs().is_one() {
                Some(fl.recip().add(&fr.recip()).recip())
            } else {
                None
            }
        }
        TangleExpr::Hole
        | TangleExpr::Ring
        | TangleExpr::MontesinosPair { .. }
        | TangleExpr::GluedCable { .. } => None,
    }
}

/// Which closure of a tangle's free ends to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    N,
    D,
}

/// Close a rational tangle's ends: the numerator closure of b/a is
/// b(b,-a), the denominator closure is b(a,b).
pub fn closure(f: &ExtRational, kind: Kind) -> TwoBridgeLink {
    let (num, den) = (f.num(), f.den());
    match kind {
        Kind::N => canonical(num.clone(), -den),
        Kind::D => canonical(den.clone(), num.clone()),
    }
    .expect("reduced fraction closes to a coprime pair")
}

/// Numerator closure of a sum of two rational tangles b1/a1 + b2/a2:
/// b(a1 b2 + a2 b1, a1 b2' + a2' b1) for any pair with
/// b2 a2' - a2 b2' = 1. The canonical form does not depend on the choice
/// of (a2', b2').
pub fn closure_of_sum(f1: &ExtRational, f2: &ExtRational) -> TwoBridgeLink {
    let (b1, a1) = (f1.num(), f1.den());
    let (b2, a2) = (f2.num(), f2.den());
    // unimodular_complement(b2, a2) = (x, y) with b2*y - x*a2 = 1,
    // so (a2', b2') = (y, x)
    let (b2p, a2p) = crate::exact::unimodular_complement(b2, a2);
    let alpha = a1 * b2 + a2 * b1;
    let beta = a1 * &b2p + &a2p * b1;
    canonical(alpha, beta)
        .expect("unimodular combination of coprime pairs stays coprime")
}

/// Double branched cover of a tangle expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cover {
    Seifert(SeifertData),
    Graph(GraphManifold),
}

fn fiber_of(f: &ExtRational) -> (BigInt, BigInt) {
    (f.den().clone(), f.num().clone())
}

struct SumLeaves {
    fibers: Vec<(BigInt, BigInt)>,
    holes: usize,
    rings: usize,
}

fn collect_sum_leaves(t: &TangleExpr, out: &mut SumLeaves) -> Result<(), TangleError> {
    match t {
        TangleExpr::Sum(l, r) => {
            collect_sum_leaves(l, out)?;
            collect_sum_leaves(r, out)
        }
        TangleExpr::Hole => {
            out.holes += 1;
            Ok(())
        }
        TangleExpr::Ring => {
            out.rings += 1;
            Ok(())
        }
        other => match fraction_of(other) {
            Some(f) => {
                out.fibers.push(fiber_of(&f));
                Ok(())
            }
            None => Err(TangleError::Unsupported(format!(
                "summand {} is neither rational nor a ring nor a hole",
                print_tangle(other)
            ))),
        },
    }
}

/// The double branched cover: rational tangles lift to solid tori,
/// Montesinos sums to Seifert pieces over the disk (one fiber per
/// summand, plus one boundary torus per hole), a ring summand switches
/// the base to the Mobius band, Montesinos pairs lift verbatim, and the
/// glued cable shape lifts to a two-piece graph manifold whose outer
/// piece is the cable space M(0,2;(p,sign)).
pub fn dbc_of_tangle(t: &TangleExpr) -> Result<Cover, TangleError> {
    if fraction_of(t).is_some() {
        return Ok(Cover::Seifert(SeifertData::new(Base::Orientable0, 1, [])?));
    }
    match t {
        TangleExpr::MontesinosPair { base, holes, entries } => {
            let listed = entries.iter().filter(|e| matches!(e, MpEntry::Hole)).count();
            if listed > *holes {
                return Err(TangleError::HoleMismatch { listed, declared: *holes });
            }
            let fibers: Vec<(BigInt, BigInt)> = entries
                .iter()
                .filter_map(|e| match e {
                    MpEntry::Fraction(f) => Some(fiber_of(f)),
                    MpEntry::Hole => None,
                })
                .collect();
            Ok(Cover::Seifert(SeifertData::new(*base, *holes, fibers)?))
        }
        TangleExpr::GluedCable { inner, p, sign } => {
            if *p < BigInt::from(2) {
                return Err(TangleError::BadCableOrder(p.clone()));
            }
            let mut leaves = SumLeaves { fibers: Vec::new(), holes: 0, rings: 0 };
            collect_sum_leaves(inner, &mut leaves)?;
            if leaves.holes != 1 || leaves.rings != 0 {
                return Err(TangleError::Unsupported(format!(
                    "glued cable interior needs exactly one hole and no rings, got {} holes, {} rings",
                    leaves.holes, leaves.rings
                )));
            }
            let inner_piece = SeifertData::new(Base::Orientable0, 1, leaves.fibers)?;
            let outer_piece = SeifertData::new(
                Base::Orientable0,
                2,
                [(p.clone(), BigInt::from(*sign))],
            )?;
            Ok(Cover::Graph(GraphManifold::new(vec![inner_piece, outer_piece])?))
        }
        _ => {
            let mut leaves = SumLeaves { fibers: Vec::new(), holes: 0, rings: 0 };
            collect_sum_leaves(t, &mut leaves)?;
            let base = match leaves.rings {
                0 => Base::Orientable0,
                1 => Base::NonOrientable1,
                n => {
                    return Err(TangleError::Unsupported(format!(
                        "{n} ring summands exceed the one-ring model"
                    )))
                }
            };
            Ok(Cover::Seifert(SeifertData::new(base, 1 + leaves.holes, leaves.fibers)?))
        }
    }
}

// ---------------------------------------------------------------------
// text form

fn write_expr(t: &TangleExpr, out: &mut String) {
    match t {
        TangleExpr::Rational(f) => out.push_str(&f.to_string()),
        TangleExpr::Hole => out.push_str("[]"),
        TangleExpr::Ring => out.push_str("ring"),
        TangleExpr::Sum(l, r) => {
            write_expr(l, out);
            out.push_str(" + ");
            write_atom(r, out, matches!(**r, TangleExpr::Sum(_, _)));
        }
        TangleExpr::Mult(l, r) => {
            write_atom(l, out, matches!(**l, TangleExpr::Sum(_, _)));
            out.push_str(" * ");
            write_atom(
                r,
                out,
                matches!(**r, TangleExpr::Sum(_, _) | TangleExpr::Mult(_, _)),
            );
        }
        TangleExpr::Circle(inner, c) => {
            out.push_str("circ(");
            write_expr(inner, out);
            out.push(';');
            if !c.is_empty() {
                out.push(' ');
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                out.push_str(&parts.join(","));
            }
            out.push(')');
        }
        TangleExpr::MontesinosPair { base, holes, entries } => {
            let g = match base {
                Base::Orientable0 => "0",
                Base::NonOrientable1 => "-1",
            };
            out.push_str(&format!("mp({g},{holes};"));
            if !entries.is_empty() {
                out.push(' ');
                let parts: Vec<String> = entries
                    .iter()
                    .map(|e| match e {
                        MpEntry::Fraction(f) => f.to_string(),
                        MpEntry::Hole => "[]".to_string(),
                    })
                    .collect();
                out.push_str(&parts.join(", "));
            }
            out.push(')');
        }
        TangleExpr::GluedCable { inner, p, sign } => {
            out.push_str("glue(");
            write_expr(inner, out);
            let s = if *sign >= 0 { "+1" } else { "-1" };
            out.push_str(&format!("; p={p}, s={s}"));
            out.push(')');
        }
    }
}

fn write_atom(t: &TangleExpr, out: &mut String, parens: bool) {
    if parens {
        out.push('(');
        write_expr(t, out);
        out.push(')');
    } else {
        write_expr(t, out);
    }
}

pub fn print_tangle(t: &TangleExpr) -> String {
    let mut out = String::new();
    write_expr(t, &mut out);
    out
}

impl fmt::Display for TangleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_tangle(self))
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn error(&self, msg: impl Into<String>) -> TangleError {
        TangleError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), TangleError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {:?}", c as char)))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw) {
            let end = self.pos + kw.len();
            // keywords must not run into a longer identifier
            let next = self.bytes.get(end).copied();
            if !matches!(next, Some(c) if c.is_ascii_alphanumeric()) {
                self.pos = end;
                return true;
            }
        }
        false
    }

    fn parse_uint(&mut self) -> Result<BigInt, TangleError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("bad number"))
    }

    fn parse_int(&mut self) -> Result<BigInt, TangleError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.parse_uint()?;
        Ok(if neg { -n } else { n })
    }

    fn parse_fraction(&mut self) -> Result<ExtRational, TangleError> {
        if self.eat_keyword("inf") {
            return Ok(ExtRational::infinity());
        }
        let at = self.pos;
        let num = self.parse_int()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.parse_int()?;
            ExtRational::reduce(num, den).map_err(|e| TangleError::Parse {
                pos: at,
                msg: e.to_string(),
            })
        } else {
            Ok(ExtRational::from_int(num))
        }
    }

    fn parse_int_list(&mut self) -> Result<Vec<BigInt>, TangleError> {
        let mut out = Vec::new();
        if self.peek() == Some(b')') {
            return Ok(out);
        }
        loop {
            out.push(self.parse_int()?);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn parse_mp_entries(&mut self) -> Result<Vec<MpEntry>, TangleError> {
        let mut out = Vec::new();
        if self.peek() == Some(b')') {
            return Ok(out);
        }
        loop {
            if self.peek() == Some(b'[') {
                self.pos += 1;
                self.eat(b']')?;
                out.push(MpEntry::Hole);
            } else {
                out.push(MpEntry::Fraction(self.parse_fraction()?));
            }
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn parse_primary(&mut self) -> Result<TangleExpr, TangleError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.eat(b')')?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                self.eat(b']')?;
                Ok(TangleExpr::Hole)
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                Ok(TangleExpr::Rational(self.parse_fraction()?))
            }
            _ => {
                if self.eat_keyword("inf") {
                    return Ok(TangleExpr::Rational(ExtRational::infinity()));
                }
                if self.eat_keyword("ring") {
                    return Ok(TangleExpr::Ring);
                }
                if self.eat_keyword("circ") {
                    self.eat(b'(')?;
                    let inner = self.parse_expr()?;
                    self.eat(b';')?;
                    let c = self.parse_int_list()?;
                    self.eat(b')')?;
                    return Ok(TangleExpr::Circle(Box::new(inner), c));
                }
                if self.eat_keyword("mp") {
                    self.eat(b'(')?;
                    let g = self.parse_int()?;
                    let base = if g.is_zero() {
                        Base::Orientable0
                    } else if g == BigInt::from(-1) {
                        Base::NonOrientable1
                    } else {
                        return Err(self.error("montesinos base must be 0 or -1"));
                    };
                    self.eat(b',')?;
                    let holes = self.parse_uint()?;
                    let holes: usize = holes
                        .try_into()
                        .map_err(|_| self.error("hole count out of range"))?;
                    self.eat(b';')?;
                    let entries = self.parse_mp_entries()?;
                    self.eat(b')')?;
                    return Ok(TangleExpr::MontesinosPair { base, holes, entries });
                }
                if self.eat_keyword("glue") {
                    self.eat(b'(')?;
                    let inner = self.parse_expr()?;
                    self.eat(b';')?;
                    if !self.eat_keyword("p") {
                        return Err(self.error("expected p="));
                    }
                    self.eat(b'=')?;
                    let p = self.parse_int()?;
                    self.eat(b',')?;
                    if !self.eat_keyword("s") {
                        return Err(self.error("expected s="));
                    }
                    self.eat(b'=')?;
                    let sign = match self.peek() {
                        Some(b'+') => {
                            self.pos += 1;
                            1i8
                        }
                        Some(b'-') => {
                            self.pos += 1;
                            -1i8
                        }
                        _ => return Err(self.error("expected +1 or -1")),
                    };
                    let one = self.parse_uint()?;
                    if !one.is_one() {
                        return Err(self.error("expected +1 or -1"));
                    }
                    self.eat(b')')?;
                    let at = self.pos;
                    return TangleExpr::glued_cable(inner, p, sign).map_err(|e| match e {
                        TangleError::Parse { .. } => e,
                        other => TangleError::Parse { pos: at, msg: other.to_string() },
                    });
                }
                Err(self.error("expected a tangle"))
            }
        }
    }

    fn parse_term(&mut self) -> Result<TangleExpr, TangleError> {
        let mut acc = self.parse_primary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.parse_primary()?;
            acc = TangleExpr::mult(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_expr(&mut self) -> Result<TangleExpr, TangleError> {
        let mut acc = self.parse_term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.parse_term()?;
            acc = TangleExpr::sum(acc, rhs);
        }
        Ok(acc)
    }
}

/// Parse the tangle grammar: fractions, "inf", "ring", "[]", sums,
/// products, "circ(expr; c1,c2,...)", "mp(g,k; entries)" and
/// "glue(expr; p=P, s=+1|-1)".
pub fn parse_tangle(text: &str) -> Result<TangleExpr, TangleError> {
    let mut p = Parser::new(text);
    let e = p.parse_expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}
