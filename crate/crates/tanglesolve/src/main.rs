//! Command line front end: canonical forms, closures, Seifert normal
//! forms, surgery calculations, and the tangle-equation solvers.
//!
//! Exit codes: 0 on success (including an empty answer), 2 for usage and
//! notation errors, 3 for domain errors (well-formed input the math
//! rejects, like non-coprime parameters).

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::process::ExitCode;

use tanglesolve::exact::ExtRational;
use tanglesolve::seifert::{normalize_closed, parse_seifert, LensSpace, SeifertError};
use tanglesolve::solver::{
    enumerate_composite, solve_composite_with_mode, solve_lens_with_mode, verify, Bounds,
    ProductSpec, Report, SolutionFamily, SolverError,
};
use tanglesolve::surgery::{
    cable_fill, iterated_lens_surgeries, CableKnot, IteratedCable, Slope, SurgeryError,
};
use tanglesolve::tangle::{closure, print_tangle, Kind};
use tanglesolve::twobridge::{canonical, MatchMode, TwoBridgeLink};

/// Scope statement attached to every solver answer: the families searched
/// are complete for the shapes the model covers, and nothing else is
/// claimed.
const SCOPE_NOTE: &str = "solutions are complete within the cable, torus-knot, ring, and \
     depth-one iterated cable shapes of the model; candidate fillings outside these shapes \
     are not searched";

#[derive(Parser)]
#[command(
    name = "tanglesolve",
    version,
    about = "Exact solver for tangle equations with two-bridge closures"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "UPPER")]
enum KindArg {
    N,
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Mirror,
}

impl ModeArg {
    fn to_mode(self) -> MatchMode {
        match self {
            ModeArg::Strict => MatchMode::Strict,
            ModeArg::Mirror => MatchMode::Mirror,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Strict => "strict",
            ModeArg::Mirror => "mirror",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical form b(alpha,beta) of a two-bridge link
    Normalize {
        /// Link parameters "a,b"
        #[arg(allow_hyphen_values = true)]
        link: String,
    },
    /// Two-bridge closure of a rational tangle fraction
    Closure {
        /// Tangle fraction, e.g. "13/4", "-3", or "inf"
        #[arg(allow_hyphen_values = true)]
        fraction: String,
        /// Which closure to take
        #[arg(long, value_enum, default_value_t = KindArg::N)]
        kind: KindArg,
    },
    /// Lens-space normal form of a closed Seifert fibration
    Sfs {
        /// Fibration text, e.g. "M(0,0;(2,1),(3,4))"
        text: String,
    },
    /// Fill a cable-knot exterior in a lens space along a slope
    SurgeryCable {
        /// Ambient lens space "a,b"
        #[arg(long, allow_hyphen_values = true)]
        ambient: String,
        /// Companion torus knot "p1,q1"
        #[arg(long, allow_hyphen_values = true)]
        companion: String,
        /// Cabling parameters "p,q"
        #[arg(long, allow_hyphen_values = true)]
        cable: String,
        /// Filling slope "m/n", "m", or "inf"
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// List the lens-producing surgeries on an iterated cable
    SurgeryIterated {
        /// Ambient lens space "a,b"
        #[arg(long, allow_hyphen_values = true)]
        ambient: String,
        /// Cabling stages "p0,q0;p1,q1;..."
        #[arg(long, allow_hyphen_values = true)]
        stages: String,
    },
    /// Enumerate all solution families with first closure b1, within bounds
    Enumerate {
        /// First closure "a,b"
        #[arg(long, allow_hyphen_values = true)]
        b1: String,
        /// Search box "P1,Q1,P": companion order, companion winding, cable order
        #[arg(long, default_value = "4,5,4", value_name = "P1,Q1,P")]
        bounds: String,
        /// Emit the families as JSON
        #[arg(long)]
        json: bool,
    },
    /// Solve N(O+0)=b1 with N(O+inf)=b2#b3
    SolveComposite {
        #[arg(long, allow_hyphen_values = true)]
        b1: String,
        #[arg(long, allow_hyphen_values = true)]
        b2: String,
        #[arg(long, allow_hyphen_values = true)]
        b3: String,
        /// Product matching: strict or up to mirrors
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Emit the families as JSON
        #[arg(long)]
        json: bool,
    },
    /// Solve N(O+0)=b1 with N(O+c)=b2, c = +1 or -1
    SolveLens {
        #[arg(long, allow_hyphen_values = true)]
        b1: String,
        #[arg(long, allow_hyphen_values = true)]
        b2: String,
        /// Product matching: strict or up to mirrors
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Emit the families as JSON
        #[arg(long)]
        json: bool,
    },
    /// Solve a system and report both equation checks for every family
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        b1: String,
        #[arg(long, allow_hyphen_values = true)]
        b2: String,
        /// Present for the composite system, absent for the lens system
        #[arg(long, allow_hyphen_values = true)]
        b3: Option<String>,
        /// Product matching: strict or up to mirrors
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Emit the families as JSON
        #[arg(long)]
        json: bool,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn parse_int(s: &str, what: &str) -> Result<BigInt, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("cannot parse {:?} as an integer in {what}", s.trim())))
}

fn parse_pair(s: &str, what: &str) -> Result<(BigInt, BigInt), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| usage(format!("{what} must be \"a,b\", got {s:?}")))?;
    Ok((parse_int(a, what)?, parse_int(b, what)?))
}

fn parse_link_arg(s: &str, what: &str) -> Result<TwoBridgeLink, CliError> {
    let (a, b) = parse_pair(s, what)?;
    canonical(a, b).map_err(domain)
}

fn parse_lens_arg(s: &str, what: &str) -> Result<LensSpace, CliError> {
    let (a, b) = parse_pair(s, what)?;
    LensSpace::new(a, b).map_err(domain)
}

fn parse_slope_arg(s: &str) -> Result<Slope, CliError> {
    s.parse().map_err(|e| match e {
        SurgeryError::ParseSlope(_) => usage(e.to_string()),
        other => domain(other),
    })
}

fn parse_bounds_arg(s: &str) -> Result<Bounds, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(usage(format!("bounds must be \"P1,Q1,P\", got {s:?}")));
    }
    let parse = |t: &str| -> Result<u64, CliError> {
        t.trim()
            .parse()
            .map_err(|_| usage(format!("cannot parse {:?} in bounds", t.trim())))
    };
    Bounds::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?).map_err(domain)
}

fn parse_stages_arg(s: &str) -> Result<IteratedCable, CliError> {
    let mut stages = Vec::new();
    for part in s.split(';') {
        stages.push(parse_pair(part, "stages")?);
    }
    IteratedCable::new(stages).map_err(domain)
}

/// Explicit num/den form used for the filling fractions in output.
fn fraction_text(f: &ExtRational) -> String {
    if f.is_infinite() {
        "inf".to_string()
    } else {
        format!("{}/{}", f.num(), f.den())
    }
}

/// A BigInt that serializes as a JSON number while exactly representable
/// (|x| < 2^53) and as a decimal string beyond that.
struct JsonInt(BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        const MAX_SAFE: i64 = (1i64 << 53) - 1;
        match self.0.to_i64() {
            Some(v) if v.abs() <= MAX_SAFE => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct JsonPair<'x>(&'x TwoBridgeLink);

impl Serialize for JsonPair<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&JsonInt(self.0.alpha().clone()))?;
        seq.serialize_element(&JsonInt(self.0.beta().clone()))?;
        seq.end()
    }
}

#[derive(Serialize)]
struct JsonParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p1: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q1: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<JsonInt>,
}

#[derive(Serialize)]
struct JsonCheck {
    pass: bool,
    expected: String,
    got: String,
}

#[derive(Serialize)]
struct JsonFamily<'x> {
    case: String,
    params: JsonParams,
    #[serde(rename = "O")]
    o: String,
    #[serde(rename = "X1")]
    x1: String,
    #[serde(rename = "X2")]
    x2: String,
    products: Vec<JsonPair<'x>>,
    verified: bool,
    flags: &'x [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    mismatch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eq1: Option<JsonCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eq2: Option<JsonCheck>,
}

#[derive(Serialize)]
struct JsonAnswer<'x> {
    query: String,
    note: &'static str,
    families: Vec<JsonFamily<'x>>,
}

fn product_links(f: &SolutionFamily) -> Vec<&TwoBridgeLink> {
    match &f.products {
        ProductSpec::Composite(sum) => sum.summands().iter().collect(),
        ProductSpec::Lens(l) => vec![l],
    }
}

fn json_family<'x>(f: &'x SolutionFamily, report: Option<&Report>) -> JsonFamily<'x> {
    let wrap = |x: &Option<BigInt>| x.clone().map(JsonInt);
    JsonFamily {
        case: f.case_tag.to_string(),
        params: JsonParams {
            a: wrap(&f.params.a),
            b: wrap(&f.params.b),
            p1: wrap(&f.params.p1),
            q1: wrap(&f.params.q1),
            p: wrap(&f.params.p),
            q: wrap(&f.params.q),
            d: wrap(&f.params.d),
            e: wrap(&f.params.e),
        },
        o: print_tangle(&f.o),
        x1: fraction_text(&f.x1),
        x2: fraction_text(&f.x2),
        products: product_links(f).into_iter().map(JsonPair).collect(),
        verified: f.verified,
        flags: &f.flags,
        mismatch: f.mismatch.clone(),
        eq1: report.map(|r| JsonCheck {
            pass: r.eq1.pass,
            expected: r.eq1.expected.clone(),
            got: r.eq1.got.clone(),
        }),
        eq2: report.map(|r| JsonCheck {
            pass: r.eq2.pass,
            expected: r.eq2.expected.clone(),
            got: r.eq2.got.clone(),
        }),
    }
}

fn print_json(query: String, families: Vec<JsonFamily<'_>>) -> Result<(), CliError> {
    let answer = JsonAnswer { query, note: SCOPE_NOTE, families };
    let text = serde_json::to_string_pretty(&answer).map_err(domain)?;
    println!("{text}");
    Ok(())
}

fn show_params(f: &SolutionFamily) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut push = |name: &str, v: &Option<BigInt>| {
        if let Some(v) = v {
            parts.push(format!("{name}={v}"));
        }
    };
    push("a", &f.params.a);
    push("b", &f.params.b);
    push("p1", &f.params.p1);
    push("q1", &f.params.q1);
    push("p", &f.params.p);
    push("q", &f.params.q);
    push("d", &f.params.d);
    push("e", &f.params.e);
    push("N", &f.n);
    parts.join(" ")
}

fn print_families_text(fams: &[SolutionFamily], reports: Option<&[Report]>) {
    if fams.is_empty() {
        println!("no solution families; {SCOPE_NOTE}");
        return;
    }
    for (i, f) in fams.iter().enumerate() {
        println!(
            "{}: O = {}, X1 = {}, X2 = {}",
            f.case_tag,
            print_tangle(&f.o),
            fraction_text(&f.x1),
            fraction_text(&f.x2)
        );
        println!("  params: {}", show_params(f));
        let prods: Vec<String> = product_links(f).iter().map(|l| l.to_string()).collect();
        println!("  products: {}", prods.join(" # "));
        if let Some(reports) = reports {
            let r = &reports[i];
            println!(
                "  first equation: expected {}, got {}: {}",
                r.eq1.expected,
                r.eq1.got,
                if r.eq1.pass { "pass" } else { "FAIL" }
            );
            println!(
                "  second equation: expected {}, got {}: {}",
                r.eq2.expected,
                r.eq2.got,
                if r.eq2.pass { "pass" } else { "FAIL" }
            );
        }
        println!("  verified: {}", if f.verified { "yes" } else { "NO" });
        if !f.flags.is_empty() {
            println!("  flags: {}", f.flags.join(", "));
        }
        if let Some(m) = &f.mismatch {
            println!("  mismatch: {m}");
        }
    }
}

fn solver_err(e: SolverError) -> CliError {
    CliError::Domain(e.to_string())
}

fn emit_families(
    query: String,
    fams: &[SolutionFamily],
    json: bool,
    with_reports: bool,
) -> Result<(), CliError> {
    let reports: Option<Vec<Report>> = if with_reports {
        let mut rs = Vec::with_capacity(fams.len());
        for f in fams {
            rs.push(verify(f).map_err(solver_err)?);
        }
        Some(rs)
    } else {
        None
    };
    if json {
        let families = fams
            .iter()
            .enumerate()
            .map(|(i, f)| json_family(f, reports.as_ref().map(|rs| &rs[i])))
            .collect();
        print_json(query, families)
    } else {
        print_families_text(fams, reports.as_deref());
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Normalize { link } => {
            let l = parse_link_arg(&link, "link")?;
            println!("{l}");
            Ok(())
        }
        Cmd::Closure { fraction, kind } => {
            let f: ExtRational = fraction
                .parse()
                .map_err(|e| usage(format!("{e}")))?;
            let kind = match kind {
                KindArg::N => Kind::N,
                KindArg::D => Kind::D,
            };
            println!("{}", closure(&f, kind));
            Ok(())
        }
        Cmd::Sfs { text } => {
            let m = parse_seifert(&text).map_err(|e| match e {
                SeifertError::Parse(_) => usage(e.to_string()),
                other => domain(other),
            })?;
            println!("{}", normalize_closed(&m).map_err(domain)?);
            Ok(())
        }
        Cmd::SurgeryCable { ambient, companion, cable, slope } => {
            let k = CableKnot::new(
                parse_lens_arg(&ambient, "ambient")?,
                parse_pair(&companion, "companion")?,
                parse_pair(&cable, "cable")?,
            )
            .map_err(domain)?;
            let r = parse_slope_arg(&slope)?;
            println!("{}", cable_fill(&k, &r).map_err(domain)?);
            Ok(())
        }
        Cmd::SurgeryIterated { ambient, stages } => {
            let (a, b) = parse_pair(&ambient, "ambient")?;
            let ic = parse_stages_arg(&stages)?;
            let hits = iterated_lens_surgeries(&a, &b, &ic).map_err(domain)?;
            if hits.is_empty() {
                println!("(none)");
            }
            for (slope, lens) in hits {
                println!("{slope} -> {lens}");
            }
            Ok(())
        }
        Cmd::Enumerate { b1, bounds, json } => {
            let link = parse_link_arg(&b1, "b1")?;
            let box_ = parse_bounds_arg(&bounds)?;
            let fams = enumerate_composite(&link, &box_).map_err(solver_err)?;
            let query = format!("enumerate b1={link} bounds={bounds}");
            emit_families(query, &fams, json, false)
        }
        Cmd::SolveComposite { b1, b2, b3, mode, json } => {
            let l1 = parse_link_arg(&b1, "b1")?;
            let l2 = parse_link_arg(&b2, "b2")?;
            let l3 = parse_link_arg(&b3, "b3")?;
            let fams = solve_composite_with_mode(&l1, &l2, &l3, mode.to_mode())
                .map_err(solver_err)?;
            let query = format!(
                "solve-composite b1={l1} b2={l2} b3={l3} mode={}",
                mode.name()
            );
            emit_families(query, &fams, json, false)
        }
        Cmd::SolveLens { b1, b2, mode, json } => {
            let l1 = parse_link_arg(&b1, "b1")?;
            let l2 = parse_link_arg(&b2, "b2")?;
            let fams =
                solve_lens_with_mode(&l1, &l2, mode.to_mode()).map_err(solver_err)?;
            let query = format!("solve-lens b1={l1} b2={l2} mode={}", mode.name());
            emit_families(query, &fams, json, false)
        }
        Cmd::Verify { b1, b2, b3, mode, json } => {
            let l1 = parse_link_arg(&b1, "b1")?;
            let l2 = parse_link_arg(&b2, "b2")?;
            let (fams, query) = match b3 {
                Some(b3) => {
                    let l3 = parse_link_arg(&b3, "b3")?;
                    let fams = solve_composite_with_mode(&l1, &l2, &l3, mode.to_mode())
                        .map_err(solver_err)?;
                    let q = format!(
                        "verify b1={l1} b2={l2} b3={l3} mode={}",
                        mode.name()
                    );
                    (fams, q)
                }
                None => {
                    let fams = solve_lens_with_mode(&l1, &l2, mode.to_mode())
                        .map_err(solver_err)?;
                    (fams, format!("verify b1={l1} b2={l2} mode={}", mode.name()))
                }
            };
            emit_families(query, &fams, json, true)
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout is a closed pipe (`tanglesolve ... | head`)
    // instead of panicking mid-print; the default disposition is what other
    // unix filters use.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
