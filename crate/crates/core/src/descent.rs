//! Legendre-type descent for the cubic norm equation N_{Q(∛a)/Q}(ξ) = b.
//!
//! [`run_descent`] records how the instance (a, b) is transformed into a
//! trivial one; [`unwind`] replays that record backwards and produces an
//! exact ξ. Each backward move is checked by recomputing the norm.

use crate::arith::{cube_root_mod_choice, exact_cbrt, CubeRootChoice};
use crate::cubic::{norm, swap_general, PureCubicSolution};
use crate::error::{Error, Result};
use crate::factor::{factor_with, FactorConfig, Factorization};
use crate::forms::{davenport_search, BinaryCubicForm};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormInstance {
    pub a: BigInt,
    pub b: BigInt,
}

impl NormInstance {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        NormInstance { a: a.into(), b: b.into() }
    }
}

impl fmt::Display for NormInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The reduction data of step (iii)–(iv): b = b₁b₂², c³ ≡ a (mod b₁), F(u,v) > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkData {
    pub b1: BigInt,
    pub b2: BigInt,
    pub c: BigInt,
    pub u: BigInt,
    pub v: BigInt,
}

impl ShrinkData {
    /// F = ((c³ − a)/b₁, 3c², 3c·b₁, b₁²).
    pub fn form(&self, a: &BigInt) -> BinaryCubicForm {
        let c = &self.c;
        BinaryCubicForm {
            a: (c * c * c - a) / &self.b1,
            b: 3 * c * c,
            c: 3 * c * &self.b1,
            d: &self.b1 * &self.b1,
        }
    }

    pub fn value(&self, a: &BigInt) -> BigInt {
        self.form(a).eval(&self.u, &self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    CubeFree { ga: BigInt, gb: BigInt },
    Swap,
    Shrink(ShrinkData),
    /// Step (vi); the data is the reduction that failed the ¾ test.
    SwapShift(ShrinkData),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentStep {
    pub kind: StepKind,
    pub before: NormInstance,
    pub after: NormInstance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentTrace {
    pub steps: Vec<DescentStep>,
    pub terminal: NormInstance,
}

#[derive(Debug, Clone)]
pub struct DescentConfig {
    pub cap: usize,
    pub choice: CubeRootChoice,
    pub factor: FactorConfig,
}

impl Default for DescentConfig {
    fn default() -> Self {
        DescentConfig { cap: 200, choice: CubeRootChoice::Smallest, factor: FactorConfig::default() }
    }
}

fn cube_free(n: &BigInt, fac: &Factorization) -> (BigInt, BigInt) {
    let (mut f, mut g) = (BigInt::one(), BigInt::one());
    for (p, e) in &fac.0 {
        f *= p.pow(e % 3);
        g *= p.pow(e / 3);
    }
    debug_assert_eq!(&f * &g * &g * &g, *n);
    (f, g)
}

fn is_terminal(a: &BigInt) -> bool {
    a.is_zero() || a.is_one()
}

pub fn run_descent(inst: &NormInstance) -> Result<DescentTrace> {
    run_descent_with(inst, &DescentConfig::default())
}

pub fn run_descent_with(inst: &NormInstance, cfg: &DescentConfig) -> Result<DescentTrace> {
    if !inst.a.is_positive() || !inst.b.is_positive() {
        return Err(Error::Precondition("norm instances need a, b ≥ 1".into()));
    }
    let mut steps = Vec::new();
    let mut cur = inst.clone();
    let mut iterations = 0usize;
    while !is_terminal(&cur.a) {
        iterations += 1;
        if iterations > cfg.cap {
            return Err(Error::IterationCap(cfg.cap));
        }
        let fa = factor_with(&cur.a, &cfg.factor)?;
        let fb = factor_with(&cur.b, &cfg.factor)?;
        let (a1, ga) = cube_free(&cur.a, &fa);
        let (b1, gb) = cube_free(&cur.b, &fb);
        if !ga.is_one() || !gb.is_one() {
            let after = NormInstance::new(a1, b1);
            steps.push(DescentStep { kind: StepKind::CubeFree { ga, gb }, before: cur, after: after.clone() });
            cur = after;
            continue;
        }
        if cur.a > cur.b {
            let after = NormInstance::new(cur.b.clone(), cur.a.clone());
            steps.push(DescentStep { kind: StepKind::Swap, before: cur, after: after.clone() });
            cur = after;
            continue;
        }
        let (a, b) = (cur.a.clone(), cur.b.clone());
        let (mut q1, mut q2) = (Factorization::default(), BigInt::one());
        for (p, e) in &fb.0 {
            match e {
                1 => q1.0.push((p.clone(), 1)),
                _ => q2 *= p,
            }
        }
        let b1 = q1.value();
        let c = cube_root_mod_choice(&a, &b1, &q1, cfg.choice)?;
        let mut data = ShrinkData { b1, b2: q2, c, u: BigInt::zero(), v: BigInt::zero() };
        let f = data.form(&a);
        let (mut u, mut v) = davenport_search(&f)?;
        if f.eval(&u, &v).is_negative() {
            u = -u;
            v = -v;
        }
        data.u = u;
        data.v = v;
        let next = &data.b2 * data.value(&a);
        if BigInt::from(4) * &next < BigInt::from(3) * &b {
            let after = NormInstance::new(a, next);
            steps.push(DescentStep { kind: StepKind::Shrink(data), before: cur, after: after.clone() });
            cur = after;
        } else {
            let after = NormInstance::new(&b - &a, &a * &a * &b);
            steps.push(DescentStep { kind: StepKind::SwapShift(data), before: cur, after: after.clone() });
            cur = after;
        }
    }
    Ok(DescentTrace { steps, terminal: cur })
}

/// A solution of the terminal instance (1, b) or (0, b).
fn terminal_solution(t: &NormInstance) -> PureCubicSolution {
    let one = BigInt::one();
    if let Some(r) = exact_cbrt(&t.b) {
        return PureCubicSolution::rational(&t.a, BigRational::from_integer(r));
    }
    // N(1 + k(1 + t + t²)) = 1 + 3k in Q[t]/(t³ − 1).
    let k = BigRational::new(&t.b - &one, BigInt::from(3));
    PureCubicSolution::new(one, BigRational::one() + &k, k.clone(), k)
}

/// Given η ∈ Q(∛(b − a)) with N(η) = a²b, a solution of N(ξ) = b in Q(∛a).
pub fn shift_unwind(eta: &PureCubicSolution, inst: &NormInstance) -> Result<PureCubicSolution> {
    let (a, b) = (&inst.a, &inst.b);
    let fail = || Error::ChainVerificationFailed(0);
    if a == b {
        return Ok(PureCubicSolution::root(a));
    }
    let check = |xi: &PureCubicSolution, want: &BigRational| -> Result<()> {
        if norm(xi) == *want {
            Ok(())
        } else {
            Err(fail())
        }
    };
    let aq = BigRational::from_integer(a.clone());
    let bq = BigRational::from_integer(b.clone());
    check(eta, &(&aq * &aq * &bq))?;
    // −η written over ∛(a − b).
    let r_ab = a - b;
    let e0 = PureCubicSolution::new(r_ab.clone(), -eta.x.clone(), eta.y.clone(), -eta.z.clone());
    check(&e0, &-(&aq * &aq * &bq))?;
    let e1 = e0.scale(&aq.recip());
    let r = -&bq / &aq;
    check(&e1, &r)?;
    let x1 = swap_general(&e1)?;
    let d = r.denom().clone();
    let rr = r.numer() * &d * &d;
    debug_assert_eq!(x1.radicand, rr);
    check(&x1, &BigRational::from_integer(r_ab))?;
    let one_plus = PureCubicSolution::new(
        rr.clone(),
        BigRational::one(),
        BigRational::new(BigInt::one(), d.clone()),
        BigRational::zero(),
    );
    let x2 = x1.div(&one_plus)?;
    check(&x2, &aq)?;
    let x3 = swap_general(&x2)?.scale(&BigRational::new(BigInt::one(), d));
    check(&x3, &r)?;
    let xi = x3.mul(&PureCubicSolution::root(a)).neg();
    check(&xi, &bq)?;
    Ok(xi)
}

/// Exact ξ ∈ Q(∛a₀) with N(ξ) = b₀ for the trace's initial instance (a₀, b₀).
pub fn unwind(trace: &DescentTrace) -> Result<PureCubicSolution> {
    let mut eta = terminal_solution(&trace.terminal);
    for (i, step) in trace.steps.iter().enumerate().rev() {
        let fail = || Error::ChainVerificationFailed(i);
        let before = &step.before;
        let xi = match &step.kind {
            StepKind::CubeFree { ga, gb } => {
                let gbq = BigRational::from_integer(gb.clone());
                let gaq = BigRational::from_integer(ga.clone());
                PureCubicSolution::new(
                    before.a.clone(),
                    &eta.x * &gbq,
                    &eta.y * &gbq / &gaq,
                    &eta.z * &gbq / (&gaq * &gaq),
                )
            }
            StepKind::Swap => {
                let s = swap_general(&eta).map_err(|_| fail())?;
                if s.radicand != before.a {
                    return Err(fail());
                }
                s
            }
            StepKind::Shrink(d) => {
                let w = PureCubicSolution::new(
                    before.a.clone(),
                    BigRational::from_integer(&d.b2 * (&d.c * &d.u + &d.b1 * &d.v)),
                    BigRational::from_integer(-(&d.b2 * &d.u)),
                    BigRational::zero(),
                );
                w.div(&eta).map_err(|_| fail())?
            }
            StepKind::SwapShift(_) => {
                if step.after.a.is_zero() {
                    PureCubicSolution::root(&before.a)
                } else {
                    shift_unwind(&eta, before).map_err(|_| fail())?
                }
            }
        };
        if xi.radicand != before.a || norm(&xi) != BigRational::from_integer(before.b.clone()) {
            return Err(fail());
        }
        eta = xi;
    }
    Ok(eta)
}

/// run_descent followed by unwind.
pub fn solve_norm(inst: &NormInstance, cfg: &DescentConfig) -> Result<(DescentTrace, PureCubicSolution)> {
    let trace = run_descent_with(inst, cfg)?;
    let xi = unwind(&trace)?;
    Ok((trace, xi))
}

// ---------------------------------------------------------------------------
// Trace text format and re-verification.

impl DescentStep {
    fn data(&self) -> Option<&ShrinkData> {
        match &self.kind {
            StepKind::Shrink(d) | StepKind::SwapShift(d) => Some(d),
            _ => None,
        }
    }

    /// One row of the printed table: a, b | b₁, b₂, c, u, v.
    pub fn table_row(&self) -> Option<String> {
        let d = self.data()?;
        Some(format!(
            "{} & {} & {} & {} & {} & {} & {}",
            self.before.a, self.before.b, d.b1, d.b2, d.c, d.u, d.v
        ))
    }
}

impl DescentTrace {
    /// Rows in the layout "a & b & b₁ & b₂ & c & u & v", cube-free replacements
    /// shown as "a & b" rows, ending with the terminal pair.
    pub fn table(&self) -> Vec<String> {
        let mut rows = Vec::new();
        for s in &self.steps {
            match &s.kind {
                StepKind::CubeFree { .. } => rows.push(format!("{} & {}", s.before.a, s.before.b)),
                StepKind::Swap => {}
                _ => rows.push(s.table_row().unwrap()),
            }
        }
        rows.push(format!("{} & {}", self.terminal.a, self.terminal.b));
        rows
    }

    /// Machine-readable form accepted by [`parse_trace`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let (a, b) = (&s.before.a, &s.before.b);
            match &s.kind {
                StepKind::CubeFree { .. } => out.push_str(&format!("cubefree {a} {b}\n")),
                StepKind::Swap => out.push_str(&format!("swap {a} {b}\n")),
                StepKind::Shrink(d) => {
                    out.push_str(&format!("shrink {a} {b} {} {} {} {} {}\n", d.b1, d.b2, d.c, d.u, d.v))
                }
                StepKind::SwapShift(d) => out.push_str(&format!(
                    "swapshift {a} {b} {} {} {} {} {}\n",
                    d.b1, d.b2, d.c, d.u, d.v
                )),
            }
        }
        out.push_str(&format!("terminal {} {}\n", self.terminal.a, self.terminal.b));
        out
    }
}

/// Parses the text form. Each step lists its `before` instance; `after` is
/// recomputed so that tampering shows up in [`verify_trace`].
pub fn parse_trace(text: &str) -> Result<DescentTrace> {
    let mut steps = Vec::new();
    let mut terminal = None;
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let nums: Vec<BigInt> = toks[1..]
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::parse(ln + 1, format!("bad integer {t}"))))
            .collect::<Result<_>>()?;
        let need = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::parse(ln + 1, format!("expected {k} integers")))
            }
        };
        let before = || NormInstance::new(nums[0].clone(), nums[1].clone());
        let data = || ShrinkData {
            b1: nums[2].clone(),
            b2: nums[3].clone(),
            c: nums[4].clone(),
            u: nums[5].clone(),
            v: nums[6].clone(),
        };
        match toks[0] {
            "cubefree" => {
                need(2)?;
                let fa = factor_with(&nums[0], &FactorConfig::default())?;
                let fb = factor_with(&nums[1], &FactorConfig::default())?;
                let (a1, ga) = cube_free(&nums[0], &fa);
                let (b1, gb) = cube_free(&nums[1], &fb);
                steps.push(DescentStep {
                    kind: StepKind::CubeFree { ga, gb },
                    before: before(),
                    after: NormInstance::new(a1, b1),
                });
            }
            "swap" => {
                need(2)?;
                steps.push(DescentStep {
                    kind: StepKind::Swap,
                    before: before(),
                    after: NormInstance::new(nums[1].clone(), nums[0].clone()),
                });
            }
            "shrink" => {
                need(7)?;
                let d = data();
                let after = NormInstance::new(nums[0].clone(), &d.b2 * d.value(&nums[0]));
                steps.push(DescentStep { kind: StepKind::Shrink(d), before: before(), after });
            }
            "swapshift" => {
                need(7)?;
                let (a, b) = (&nums[0], &nums[1]);
                let after = NormInstance::new(b - a, a * a * b);
                steps.push(DescentStep { kind: StepKind::SwapShift(data()), before: before(), after });
            }
            "terminal" => {
                need(2)?;
                terminal = Some(before());
            }
            other => return Err(Error::parse(ln + 1, format!("unknown step kind {other}"))),
        }
    }
    let terminal = terminal.ok_or_else(|| Error::parse(0, "missing terminal line"))?;
    Ok(DescentTrace { steps, terminal })
}

/// Re-checks chaining, every reduction bound and the unwound norm.
/// Returns the index of the first failing step on error.
pub fn verify_trace(trace: &DescentTrace) -> std::result::Result<PureCubicSolution, (usize, String)> {
    let n = trace.steps.len();
    for (i, s) in trace.steps.iter().enumerate() {
        let next = trace.steps.get(i + 1).map_or(&trace.terminal, |t| &t.before);
        if &s.after != next {
            return Err((i, format!("step output {} does not chain into {}", s.after, next)));
        }
        if let Some(d) = s.data() {
            let a = &s.before.a;
            let b = &s.before.b;
            if &d.b1 * &d.b2 * &d.b2 != *b {
                return Err((i, "b ≠ b₁·b₂²".into()));
            }
            if !(&d.c * &d.c * &d.c - a).is_zero() && !((&d.c * &d.c * &d.c - a) % &d.b1).is_zero() {
                return Err((i, "c³ ≢ a (mod b₁)".into()));
            }
            let fv = d.value(a);
            if !fv.is_positive() {
                return Err((i, "F(u,v) is not positive".into()));
            }
            // 23·F⁴ ≤ 27·a²·b₁²
            if BigInt::from(23) * fv.pow(4) > BigInt::from(27) * a * a * &d.b1 * &d.b1 {
                return Err((i, "F(u,v) exceeds the Davenport bound".into()));
            }
            let next_b = &d.b2 * &fv;
            let small = BigInt::from(4) * &next_b < BigInt::from(3) * b;
            match (&s.kind, small) {
                (StepKind::Shrink(_), false) => return Err((i, "shrink step does not shrink".into())),
                (StepKind::SwapShift(_), true) => return Err((i, "swap-shift taken although b₂F < ¾b".into())),
                _ => {}
            }
        }
    }
    if !is_terminal(&trace.terminal.a) {
        return Err((n, "terminal instance has a ∉ {0, 1}".into()));
    }
    unwind(trace).map_err(|e| match e {
        Error::ChainVerificationFailed(i) => (i, "unwound norm mismatch".into()),
        other => (n, other.to_string()),
    })
}

// ---------------------------------------------------------------------------
// Local solubility.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalCertificate {
    Soluble,
    Insoluble(BigInt),
}

/// Decides at each listed prime whether V_{a,b} has a Q_p-point, using the
/// cubic norm residue symbol over Q_p(ζ₃): the surface has a local point
/// exactly when b is a local norm from Q_p(ζ₃, ∛a).
pub fn check_local_solubility(inst: &NormInstance, primes: &[BigInt]) -> LocalCertificate {
    for p in primes {
        if !crate::local::rational_symbol_vanishes(p, &inst.a, &inst.b) {
            return LocalCertificate::Insoluble(p.clone());
        }
    }
    LocalCertificate::Soluble
}

/// The primes dividing 3ab.
pub fn relevant_primes(inst: &NormInstance) -> Result<Vec<BigInt>> {
    let mut ps: Vec<BigInt> = vec![BigInt::from(3)];
    for n in [&inst.a, &inst.b] {
        for p in factor_with(n, &FactorConfig::default())?.primes() {
            if !ps.contains(p) {
                ps.push(p.clone());
            }
        }
    }
    ps.sort();
    Ok(ps)
}
