//! The `ctp` command line.

use crate::cubic::norm;
use crate::descent::{check_local_solubility, parse_trace, relevant_primes, solve_norm, verify_trace, DescentConfig, LocalCertificate, NormInstance};
use crate::arith::CubeRootChoice;
use crate::dossier::{parse_value, Dossier};
use crate::error::Error;
use crate::factor::FactorConfig;
use crate::forms::{associated_quadratic, davenport_search_with, discriminant, reduce_quadratic, BinaryCubicForm};
use crate::lift::{check_h, lift_mu3, lift_z3, CaseTag, HPair};
use crate::local::{LocalCubeClass, LocalField, DEFAULT_TAME_PREC, DEFAULT_WILD_PREC};
use crate::pairing::{rank_report, Matrix, Mode, PairingReport, RankReport};
use crate::points::SearchBudget;
use crate::tower::{small_representative, TowerElement};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INSOLUBLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ctp", version, about = "Cubic norm equations and the Cassels-Tate pairing for 3-isogenies")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// p-adic working precision in digits.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Total Pollard rho iterations allowed per factorisation.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// File of known divisors (one integer per line) used by the factoriser.
    #[arg(long, global = true)]
    pub hints: Option<PathBuf>,
    /// Seed for the randomised factoriser.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-prime work.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootChoice {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Mu3,
    Z3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Explicit,
    Aggregate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve N(ξ) = b for ξ in Q(∛a) by norm descent.
    SolveNorm {
        a: BigInt,
        b: BigInt,
        /// Write the machine-readable trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Cube root chosen at each shrink step.
        #[arg(long, value_enum, default_value_t = RootChoice::Smallest)]
        choice: RootChoice,
        /// Maximum number of descent steps.
        #[arg(long, default_value_t = 200)]
        cap: usize,
    },
    /// Reduce a binary cubic form of negative discriminant and find a small value.
    ReduceForm { a: BigInt, b: BigInt, c: BigInt, d: BigInt },
    /// Cubic Hilbert symbol (x, y)_p over Q_p(ζ₃), as an exponent of ζ₃.
    Symbol {
        p: BigInt,
        x: String,
        y: String,
        /// Residue of ζ₃ modulo p for p ≡ 1 (mod 3).
        #[arg(long)]
        zeta: Option<BigInt>,
    },
    /// Class of x in Q_p(ζ₃)^×/(Q_p(ζ₃)^×)³.
    CubeClass {
        p: BigInt,
        x: String,
        #[arg(long)]
        zeta: Option<BigInt>,
    },
    /// Lift a Selmer element a to a pair (a, b) and verify it.
    Lift {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        n: BigInt,
        /// The Selmer element: a rational (z3) or a tower element of L₁ (mu3).
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// A known norm solution ξ.
        #[arg(long)]
        xi: Option<String>,
        /// A candidate b to verify instead of computing one.
        #[arg(long)]
        b: Option<String>,
    },
    /// Assemble the Cassels-Tate pairing from a dossier.
    Pair {
        dossier: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Re-verify a descent trace written by `solve-norm --trace`.
    VerifyTrace { file: PathBuf },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotCubeMod { .. } => EXIT_INSOLUBLE,
            Error::FactorTimeout(_) | Error::IterationCap(_) | Error::PrecisionExhausted | Error::SearchExhausted(_) => EXIT_BUDGET,
            Error::Parse { .. } | Error::Precondition(_) | Error::InvalidTower(_) | Error::WrongLocalPoint { .. } => EXIT_INPUT,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: msg.into() }
}

fn factor_config(g: &GlobalArgs) -> Result<FactorConfig, Failure> {
    let mut cfg = FactorConfig::default();
    if let Some(b) = g.budget {
        cfg.budget = b;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(path) = &g.hints {
        let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let l = line.split('#').next().unwrap().trim();
            if l.is_empty() {
                continue;
            }
            let h: BigInt = l.parse().map_err(|_| input_error(format!("{}:{}: bad integer", path.display(), i + 1)))?;
            cfg.hints.push(h);
        }
    }
    Ok(cfg)
}

/// Runs the command and returns its standard output.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::SolveNorm { a, b, trace, choice, cap } => solve_norm_cmd(g, a, b, trace.as_ref(), *choice, *cap),
        Command::ReduceForm { a, b, c, d } => reduce_form_cmd(g, BinaryCubicForm::new(a.clone(), b.clone(), c.clone(), d.clone())),
        Command::Symbol { p, x, y, zeta } => symbol_cmd(g, p, x, Some(y), zeta.as_ref()),
        Command::CubeClass { p, x, zeta } => symbol_cmd(g, p, x, None, zeta.as_ref()),
        Command::Lift { case, n, a, xi, b } => lift_cmd(g, *case, n, a, xi.as_deref(), b.as_deref()),
        Command::Pair { dossier, mode } => pair_cmd(g, dossier, *mode),
        Command::VerifyTrace { file } => verify_trace_cmd(g, file),
    }
}

fn solve_norm_cmd(g: &GlobalArgs, a: &BigInt, b: &BigInt, trace: Option<&PathBuf>, choice: RootChoice, cap: usize) -> Result<String, Failure> {
    if a.sign() != num_bigint::Sign::Plus || b.sign() != num_bigint::Sign::Plus {
        return Err(input_error("a and b must be positive integers"));
    }
    let factor = factor_config(g)?;
    let inst = NormInstance::new(a.clone(), b.clone());
    let choice = match choice {
        RootChoice::Smallest => CubeRootChoice::Smallest,
        RootChoice::Largest => CubeRootChoice::Largest,
    };
    let cfg = DescentConfig { cap, choice, factor };
    let (tr, xi) = match solve_norm(&inst, &cfg) {
        Ok(r) => r,
        Err(e @ Error::NotCubeMod { .. }) => {
            // Say where the surface has no local point when that is the reason.
            let mut msg = e.to_string();
            if let Ok(ps) = relevant_primes(&inst) {
                if let LocalCertificate::Insoluble(p) = check_local_solubility(&inst, &ps) {
                    msg = format!("no solution: not a local norm at p = {p}");
                }
            }
            return Err(Failure { code: EXIT_INSOLUBLE, message: msg });
        }
        Err(e) => return Err(e.into()),
    };
    let nm = norm(&xi);
    if nm != BigRational::from_integer(b.clone()) {
        return Err(Failure { code: EXIT_FAILURE, message: "unwound solution has the wrong norm".into() });
    }
    if let Some(path) = trace {
        std::fs::write(path, tr.to_text()).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    let mut out = String::new();
    match g.format {
        Format::Table => {
            writeln!(out, "a & b & b1 & b2 & c & u & v").unwrap();
            for row in tr.table() {
                writeln!(out, "{row}").unwrap();
            }
            writeln!(out, "xi = {xi}").unwrap();
            writeln!(out, "norm = {nm} (verified)").unwrap();
        }
        Format::Json => {
            let rows: Vec<String> = tr.table().iter().map(|r| json_str(r)).collect();
            writeln!(
                out,
                "{{\"rows\": [{}], \"xi\": [{}, {}, {}], \"norm\": {}, \"verified\": true}}",
                rows.join(", "),
                json_str(&xi.x.to_string()),
                json_str(&xi.y.to_string()),
                json_str(&xi.z.to_string()),
                json_str(&nm.to_string())
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn reduce_form_cmd(g: &GlobalArgs, f: BinaryCubicForm) -> Result<String, Failure> {
    let disc = discriminant(&f);
    let prec = g.precision.unwrap_or(2 * f.max_bits() as u32 + 64);
    // The Hessian-style quadratic needs a nonzero leading coefficient; the search does not.
    let reduced = associated_quadratic(&f, prec).and_then(|q| reduce_quadratic(&q)).ok();
    let (u, v) = davenport_search_with(&f, g.precision)?;
    let val = f.eval(&u, &v);
    let scale = |x: &BigInt| format!("{:.6}", fixed_to_f64(x, prec));
    let mut out = String::new();
    match g.format {
        Format::Table => {
            writeln!(out, "discriminant = {disc}").unwrap();
            if let Some((r, t)) = &reduced {
                writeln!(out, "reduced quadratic = ({}, {}, {})", scale(&r.a), scale(&r.b), scale(&r.c)).unwrap();
                writeln!(out, "transform = [[{}, {}], [{}, {}]]", t.alpha, t.beta, t.gamma, t.delta).unwrap();
            }
            writeln!(out, "(u, v) = ({u}, {v})").unwrap();
            writeln!(out, "f(u, v) = {val}").unwrap();
            writeln!(out, "23·f(u,v)^4 <= |disc|: true").unwrap();
        }
        Format::Json => {
            writeln!(
                out,
                "{{\"discriminant\": {}, \"u\": {}, \"v\": {}, \"value\": {}}}",
                json_str(&disc.to_string()),
                json_str(&u.to_string()),
                json_str(&v.to_string()),
                json_str(&val.to_string())
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn fixed_to_f64(x: &BigInt, prec: u32) -> f64 {
    use num_traits::ToPrimitive;
    let shift = prec.saturating_sub(52);
    (x >> shift).to_f64().unwrap_or(f64::NAN) / 2f64.powi((prec - shift) as i32)
}

fn parse_l1(s: &str) -> Result<TowerElement, Failure> {
    // any non-cube radicand will do for elements of Q(ζ₃)
    let e = parse_value(s, &BigInt::from(2), 0).map_err(|_| input_error(format!("bad element `{s}`")))?;
    if e.to_l1().is_none() {
        return Err(input_error(format!("`{s}` is not in Q(zeta3)")));
    }
    Ok(e)
}

fn class_string(c: &LocalCubeClass) -> String {
    match c {
        LocalCubeClass::Tame([v, u]) => format!("pi^{v} * u^{u}"),
        LocalCubeClass::Wild(e) => format!("lambda^{} * eta1^{} * eta2^{} * eta3^{}", e[0], e[1], e[2], e[3]),
    }
}

fn symbol_cmd(g: &GlobalArgs, p: &BigInt, x: &str, y: Option<&String>, zeta: Option<&BigInt>) -> Result<String, Failure> {
    if !crate::factor::is_prime(p) {
        return Err(input_error(format!("{p} is not prime")));
    }
    let prec = g.precision.unwrap_or(if *p == BigInt::from(3) { DEFAULT_WILD_PREC } else { DEFAULT_TAME_PREC });
    let field = LocalField::new(p, prec, zeta)?;
    let ex = parse_l1(x)?.to_l1().unwrap();
    let xv = field.from_eisenstein(&ex.0, &ex.1);
    let cx = field.cube_class(&xv)?;
    let mut out = String::new();
    match y {
        None => match g.format {
            Format::Table => writeln!(out, "{} [{}]", class_string(&cx), join(&cx.exponents())).unwrap(),
            Format::Json => writeln!(out, "{{\"p\": {}, \"class\": [{}]}}", json_str(&p.to_string()), join(&cx.exponents())).unwrap(),
        },
        Some(y) => {
            let ey = parse_l1(y)?.to_l1().unwrap();
            let yv = field.from_eisenstein(&ey.0, &ey.1);
            let s = field.hilbert_symbol(&xv, &yv)?;
            match g.format {
                Format::Table => writeln!(out, "{s}").unwrap(),
                Format::Json => writeln!(out, "{{\"p\": {}, \"symbol\": {s}}}", json_str(&p.to_string())).unwrap(),
            }
        }
    }
    Ok(out)
}

fn lift_cmd(g: &GlobalArgs, case: CaseArg, n: &BigInt, a: &str, xi: Option<&str>, b: Option<&str>) -> Result<String, Failure> {
    let parse = |s: &str| parse_value(s, n, 0).map_err(|_| input_error(format!("bad element `{s}`")));
    let a_el = parse(a)?;
    let case = match case {
        CaseArg::Mu3 => CaseTag::Mu3Nonsplit,
        CaseArg::Z3 => CaseTag::Z3Nonsplit,
    };
    let (pair, xi_used) = if let Some(b) = b {
        (HPair { case, a: a_el.clone(), b: parse(b)? }, None)
    } else {
        let xi = match xi {
            Some(s) => parse(s)?,
            None => {
                let text = format!(
                    "[isogeny]\ncase = {}\nn = {n}\n[curve]\na = 0, 0, 0, 0, 1\ns = (0, 1)\nt = (0, -1)\n[selmer]\ngenerators = {a}\n",
                    case
                );
                // Reuse the dossier machinery for the norm solve; the curve is a placeholder.
                let d = Dossier::parse(&text)?;
                let gen = d.lift(0, &factor_config(g)?)?;
                gen.xi.ok_or_else(|| input_error("no norm solution"))?
            }
        };
        let pair = match case {
            CaseTag::Mu3Nonsplit => lift_mu3(&a_el, &xi)?,
            CaseTag::Z3Nonsplit => {
                let q = a_el.to_rational().ok_or_else(|| input_error("z3 elements must be rational"))?;
                lift_z3(&q, &xi)?
            }
        };
        (pair, Some(xi))
    };
    let ok = check_h(&pair)?;
    let small = small_representative(&pair.b);
    let mut out = String::new();
    match g.format {
        Format::Table => {
            writeln!(out, "case = {}", pair.case).unwrap();
            writeln!(out, "a = {}", pair.a).unwrap();
            if let Some(x) = &xi_used {
                writeln!(out, "xi = {x}").unwrap();
            }
            writeln!(out, "b = {}", pair.b).unwrap();
            writeln!(out, "b (small representative) = {small}").unwrap();
            writeln!(out, "conditions hold: {ok}").unwrap();
        }
        Format::Json => {
            writeln!(
                out,
                "{{\"case\": \"{}\", \"a\": {}, \"b\": {}, \"b_small\": {}, \"valid\": {ok}}}",
                pair.case,
                json_str(&pair.a.to_string()),
                json_str(&pair.b.to_string()),
                json_str(&small.to_string())
            )
            .unwrap();
        }
    }
    if !ok {
        return Err(Failure { code: EXIT_INPUT, message: format!("{out}the pair fails the lift conditions") });
    }
    Ok(out)
}

fn pair_cmd(g: &GlobalArgs, path: &PathBuf, mode: Option<ModeArg>) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let d = Dossier::parse(&text).map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", path.display()) })?;
    let mut input = d.pairing_input(&factor_config(g)?, SearchBudget::default())?;
    input.precision = g.precision;
    input.jobs = g.jobs.max(1);
    let mode = match mode {
        Some(ModeArg::Explicit) => Mode::Explicit,
        Some(ModeArg::Aggregate) => Mode::Aggregate,
        None if d.case == CaseTag::Z3Nonsplit => Mode::Aggregate,
        None => Mode::Explicit,
    };
    let report = input.global_matrix(mode)?;
    let rank = rank_report(&report.global, d.selmer_dim(), d.dim_s_phi, d.t);
    Ok(match g.format {
        Format::Table => format_pairing(&report, &rank),
        Format::Json => format_pairing_json(&report, &rank),
    })
}

fn verify_trace_cmd(g: &GlobalArgs, path: &PathBuf) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let tr = parse_trace(&text)?;
    match verify_trace(&tr) {
        Ok(xi) => Ok(match g.format {
            Format::Table => format!("ok\nxi = {xi}\n"),
            Format::Json => format!("{{\"ok\": true, \"xi\": {}}}\n", json_str(&xi.to_string())),
        }),
        Err((row, why)) => Err(Failure { code: EXIT_FAILURE, message: format!("fail at step {row}: {why}") }),
    }
}

fn join(v: &[u8]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn json_str(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn matrix_rows(m: &Matrix) -> String {
    let mut out = String::new();
    for r in m {
        let row: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        writeln!(out, "  {}", row.join(" ")).unwrap();
    }
    out
}

fn matrix_json(m: &Matrix) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", join(r))).collect();
    format!("[{}]", rows.join(", "))
}

/// Canonical text form: one block per prime with a nonzero local matrix,
/// the aggregate correction when nonzero, the global matrix and the rank
/// report.
pub fn format_pairing(r: &PairingReport, rank: &RankReport) -> String {
    let mut out = String::new();
    let nonzero = |m: &Matrix| m.iter().flatten().any(|&x| x != 0);
    for l in &r.locals {
        if nonzero(&l.matrix) {
            writeln!(out, "local {}", l.p).unwrap();
            out.push_str(&matrix_rows(&l.matrix));
        }
    }
    if nonzero(&r.correction) {
        writeln!(out, "aggregate").unwrap();
        out.push_str(&matrix_rows(&r.correction));
    }
    writeln!(out, "global").unwrap();
    out.push_str(&matrix_rows(&r.global));
    writeln!(out, "rank {}", rank.pairing_rank).unwrap();
    writeln!(out, "selmer_dim {}", rank.selmer_dim).unwrap();
    writeln!(out, "kernel {}", rank.selmer_dim as i64 - rank.pairing_rank as i64).unwrap();
    writeln!(out, "dim_s_phi {}", rank.dim_s_phi).unwrap();
    writeln!(out, "t {}", rank.t).unwrap();
    writeln!(out, "bound {}", rank.bound).unwrap();
    out
}

pub fn format_pairing_json(r: &PairingReport, rank: &RankReport) -> String {
    let locals: Vec<String> = r.locals.iter().map(|l| format!("{{\"p\": \"{}\", \"matrix\": {}}}", l.p, matrix_json(&l.matrix))).collect();
    format!(
        "{{\"locals\": [{}], \"aggregate\": {}, \"global\": {}, \"rank\": {}, \"selmer_dim\": {}, \"dim_s_phi\": {}, \"t\": {}, \"bound\": {}}}\n",
        locals.join(", "),
        matrix_json(&r.correction),
        matrix_json(&r.global),
        rank.pairing_rank,
        rank.selmer_dim,
        rank.dim_s_phi,
        rank.t,
        rank.bound
    )
}

pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (code, if code == EXIT_OK { e.to_string() } else { String::new() }, if code == EXIT_OK { String::new() } else { e.to_string() });
        }
    };
    match run(&cli) {
        Ok(out) => (EXIT_OK, out, String::new()),
        Err(f) => (f.code, String::new(), format!("error: {}\n", f.message)),
    }
}
