//! The Cassels–Tate pairing on the 3-isogeny Selmer group, assembled from
//! local Hilbert symbols (ξ_v, a_j)_v with ξ_v = b_i / ℓ_T(P_v).

use crate::arith::prime_divisors;
use crate::eisenstein::{cubic_residue_symbol, gcd, Eisenstein};
use crate::embed::LocalEmbedding;
use crate::error::{Error, Result};
use crate::factor::FactorConfig;
use crate::lift::{CaseTag, HPair, TangentData};
use crate::local::{class_symbol, LocalCubeClass, LocalField, DEFAULT_TAME_PREC, DEFAULT_WILD_PREC};
use crate::padic::PadicNumber;
use crate::points::{find_local_point, form_class, LocalPoint, SearchBudget};
use crate::tower::TowerElement;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub type Matrix = Vec<Vec<u8>>;

/// A Selmer generator with its lift, and the ξ it came from when known.
#[derive(Debug, Clone)]
pub struct Generator {
    pub pair: HPair,
    pub xi: Option<TowerElement>,
}

/// Per-prime data: the choice of ζ₃ and θ images and any supplied points.
#[derive(Debug, Clone, Default)]
pub struct LocalData {
    pub zeta3: Option<BigInt>,
    pub theta: Option<PadicNumber>,
    pub points: BTreeMap<usize, LocalPoint>,
}

/// How primes outside the fixed exceptional set are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Factor N(b_i) and evaluate every support prime.
    Explicit,
    /// Sum the remaining tame contributions through a cubic residue symbol
    /// (only for the Z/3Z case, where the a_j are rational).
    Aggregate,
}

#[derive(Debug, Clone)]
pub struct PairingInput {
    pub case: CaseTag,
    pub n: BigInt,
    pub tangents: TangentData,
    pub generators: Vec<Generator>,
    pub locals: BTreeMap<BigInt, LocalData>,
    pub factor: FactorConfig,
    pub search: SearchBudget,
    /// Working precision of the completions; defaults per prime when absent.
    pub precision: Option<u32>,
    /// Worker threads for the per-prime computations.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalReport {
    pub p: BigInt,
    pub matrix: Matrix,
    /// Where a point was needed: (generator index, point used).
    pub points: Vec<(usize, LocalPoint)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingReport {
    pub locals: Vec<LocalReport>,
    /// Sum of contributions not itemised per prime (aggregate mode).
    pub correction: Matrix,
    pub global: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub pairing_rank: usize,
    pub selmer_dim: usize,
    pub dim_s_phi: usize,
    pub t: usize,
    /// Upper bound for the rank of E(Q).
    pub bound: i64,
}

fn zero_matrix(k: usize) -> Matrix {
    vec![vec![0u8; k]; k]
}

fn add_into(acc: &mut Matrix, m: &Matrix) {
    for (r, s) in acc.iter_mut().zip(m) {
        for (a, b) in r.iter_mut().zip(s) {
            *a = (*a + *b) % 3;
        }
    }
}

fn local_prec(p: &BigInt) -> u32 {
    if *p == BigInt::from(3) {
        DEFAULT_WILD_PREC
    } else {
        DEFAULT_TAME_PREC
    }
}

fn add_primes_of(set: &mut BTreeSet<BigInt>, q: &BigRational, cfg: &FactorConfig) -> Result<()> {
    for part in [q.numer().abs(), q.denom().clone()] {
        if part > BigInt::one() {
            set.extend(prime_divisors(&part, cfg)?);
        }
    }
    Ok(())
}

impl PairingInput {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Bad primes, 3, the primes of n and of the norms of the a_i. Local
    /// contributions at these primes are evaluated with points.
    pub fn exceptional_primes(&self) -> Result<BTreeSet<BigInt>> {
        let mut e = BTreeSet::new();
        e.insert(BigInt::from(3));
        add_primes_of(&mut e, &self.tangents.curve.discriminant(), &self.factor)?;
        add_primes_of(&mut e, &BigRational::from_integer(self.n.clone()), &self.factor)?;
        for g in &self.generators {
            add_primes_of(&mut e, &g.pair.a.norm_to_q(), &self.factor)?;
        }
        Ok(e)
    }

    /// Primes outside the exceptional set where some b_i may have a
    /// valuation.
    pub fn good_support(&self, exceptional: &BTreeSet<BigInt>) -> Result<BTreeSet<BigInt>> {
        let mut s = BTreeSet::new();
        for g in &self.generators {
            // A prime where b has nonzero valuation divides N(b·d³) = N(b)·d^{3[M:Q]},
            // where d is the denominator of b, or divides d itself.
            let d = g.pair.b.denominator();
            let nb = g.pair.b.norm_to_q();
            let q = BigRational::from_integer(d * nb.numer().abs() * nb.denom());
            add_primes_of(&mut s, &strip(&q, exceptional), &self.factor)?;
        }
        Ok(s)
    }

    fn embedding(&self, p: &BigInt, prec: u32) -> Result<LocalEmbedding> {
        let data = self.locals.get(p);
        let field = LocalField::new(p, prec, data.and_then(|d| d.zeta3.as_ref()))?;
        LocalEmbedding::new(field, &self.n, data.and_then(|d| d.theta.as_ref()))
    }

    /// The local pairing matrix at p. `exceptional` selects whether points
    /// are needed; at other primes only valuations of the b_i matter.
    /// The working precision is doubled, up to four times the starting
    /// value, when large denominators or cancellation exhaust it.
    pub fn local_matrix(&self, p: &BigInt, exceptional: bool) -> Result<LocalReport> {
        let mut prec = self.precision.unwrap_or_else(|| local_prec(p));
        for _ in 0..2 {
            match self.local_matrix_at(p, exceptional, prec) {
                Err(Error::InsufficientPrecision) => prec *= 2,
                r => return r,
            }
        }
        self.local_matrix_at(p, exceptional, prec)
    }

    fn local_matrix_at(&self, p: &BigInt, exceptional: bool, prec: u32) -> Result<LocalReport> {
        let k = self.rank();
        let emb = self.embedding(p, prec)?;
        let f = &emb.field;
        let cols: Vec<LocalCubeClass> = self
            .generators
            .iter()
            .map(|g| f.cube_class(&emb.embed_l1(&g.pair.a)?))
            .collect::<Result<_>>()?;
        let mut report = LocalReport { p: p.clone(), matrix: zero_matrix(k), points: Vec::new() };
        if cols.iter().all(|c| c.is_trivial()) {
            return Ok(report);
        }
        let deg = emb.degree() as u8;
        let data = self.locals.get(p);
        for (i, g) in self.generators.iter().enumerate() {
            let b_class = emb.class_of_element(&g.pair.b)?;
            let xi = if !exceptional || cols[i].is_trivial() {
                // P = O, where both tangent forms are 1
                b_class.descend()?
            } else {
                let pt = match data.and_then(|d| d.points.get(&i)) {
                    Some(pt) => pt.clone(),
                    None => find_local_point(&self.tangents.curve, &self.tangents.tan_s, &emb, &cols[i], self.search)?,
                };
                match form_class(&emb, &self.tangents.tan_s, &pt)? {
                    crate::embed::ExtClass::Base(c) if c == cols[i] => {}
                    _ => return Err(Error::WrongLocalPoint { index: i, p: p.clone() }),
                }
                let t_class = form_class(&emb, &self.tangents.tan_t, &pt)?;
                report.points.push((i, pt));
                b_class.sub(&t_class)?.descend()?
            };
            for (j, col) in cols.iter().enumerate() {
                report.matrix[i][j] = (deg * class_symbol(&xi, col)) % 3;
            }
        }
        Ok(report)
    }

    /// Sum of the contributions of all primes outside `exceptional`, via
    /// cubic residue symbols in Z[ζ₃].
    pub fn aggregate_correction(&self, exceptional: &BTreeSet<BigInt>) -> Result<Matrix> {
        if self.case != CaseTag::Z3Nonsplit {
            return Err(Error::Precondition("the aggregate correction needs rational a_j".into()));
        }
        let k = self.rank();
        let mut c = zero_matrix(k);
        let cols: Vec<BigRational> = self
            .generators
            .iter()
            .map(|g| g.pair.a.to_rational().ok_or_else(|| Error::Precondition("a_j is not rational".into())))
            .collect::<Result<_>>()?;
        for (i, g) in self.generators.iter().enumerate() {
            let beta = match contraction_generator(g, exceptional)? {
                Some(b) => b,
                None => continue,
            };
            for (j, a) in cols.iter().enumerate() {
                let num = Eisenstein::new(a.numer().clone(), 0);
                let den = Eisenstein::new(a.denom().clone(), 0);
                let sn = cubic_residue_symbol(&num, &beta).ok_or_else(|| Error::Precondition("contraction meets a_j".into()))?;
                let sd = cubic_residue_symbol(&den, &beta).ok_or_else(|| Error::Precondition("contraction meets a_j".into()))?;
                c[i][j] = (sn + 3 - sd) % 3;
            }
        }
        Ok(c)
    }

    /// Local matrices at the given primes, in order, spread over `jobs` threads.
    pub fn local_matrices(&self, primes: &[BigInt], exceptional: bool) -> Result<Vec<LocalReport>> {
        let jobs = self.jobs.max(1).min(primes.len().max(1));
        if jobs == 1 {
            return primes.iter().map(|p| self.local_matrix(p, exceptional)).collect();
        }
        let mut slots: Vec<Option<Result<LocalReport>>> = vec![None; primes.len()];
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    scope.spawn(move || {
                        (w..primes.len()).step_by(jobs).map(|i| (i, self.local_matrix(&primes[i], exceptional))).collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots.into_iter().map(|r| r.expect("every prime is assigned")).collect()
    }

    pub fn pairing(&self, mode: Mode) -> Result<PairingReport> {
        let k = self.rank();
        let exceptional = self.exceptional_primes()?;
        let primes: Vec<BigInt> = exceptional.iter().cloned().collect();
        let mut locals = self.local_matrices(&primes, true)?;
        let mut correction = zero_matrix(k);
        match mode {
            Mode::Aggregate => correction = self.aggregate_correction(&exceptional)?,
            Mode::Explicit => {
                let good: Vec<BigInt> = self.good_support(&exceptional)?.into_iter().collect();
                locals.extend(self.local_matrices(&good, false)?);
            }
        }
        let mut global = correction.clone();
        for r in &locals {
            add_into(&mut global, &r.matrix);
        }
        Ok(PairingReport { locals, correction, global })
    }

    /// The global matrix, rejected unless it is alternating.
    pub fn global_matrix(&self, mode: Mode) -> Result<PairingReport> {
        let r = self.pairing(mode)?;
        if !is_alternating(&r.global) {
            return Err(Error::NotAlternating);
        }
        Ok(r)
    }
}

/// Removes every prime of `set` from the numerator and denominator of q.
fn strip(q: &BigRational, set: &BTreeSet<BigInt>) -> BigRational {
    let s = |mut x: BigInt| {
        for p in set {
            while !x.is_zero() && (&x % p).is_zero() {
                x /= p;
            }
        }
        x
    };
    BigRational::new(s(q.numer().abs()), s(q.denom().clone()))
}

fn strip_int(x: &BigInt, set: &BTreeSet<BigInt>) -> BigInt {
    strip(&BigRational::from_integer(x.clone()), set).to_integer()
}

/// Generator of the contraction to Z[ζ₃] of the prime-to-E part of the
/// ideal of b (up to cubes), or None when that part is trivial.
fn contraction_generator(g: &Generator, exceptional: &BTreeSet<BigInt>) -> Result<Option<Eisenstein>> {
    let n = &g.pair.b.n;
    let (big, w) = match &g.xi {
        Some(xi) => {
            let d = xi.denominator();
            let x = xi.scale(&BigRational::from_integer(d.clone()));
            let s1 = x.sigma();
            let gg = strip_int(&d, exceptional);
            // v_𝔓(σ(X)²σ²(X)) ≤ 9·v_q(D) for every 𝔓 above a prime q of D
            (s1.square().mul(&s1.sigma()), gg.pow(10))
        }
        None => {
            let b = &g.pair.b;
            let d = b.denominator();
            let big = b.scale(&BigRational::from_integer(d.pow(3)));
            let nb = b.norm_to_q();
            let gg = strip_int(&(d * nb.numer().abs() * nb.denom()), exceptional);
            (big, gg.pow(19))
        }
    };
    if w.is_one() {
        return Ok(None);
    }
    // Z-basis of the ideal (B, W) in Z[θ, ζ₃], coordinates ordered so that
    // Z[ζ₃] = span(1, ζ) comes last.
    const ORDER: [usize; 6] = [1, 2, 4, 5, 0, 3];
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for k in 0..6 {
        let mut e = [0i64; 6];
        e[k] = 1;
        let v = big.mul(&TowerElement::from_ints(n, e));
        let (coords, den) = v.integral_coords();
        if !den.is_one() {
            return Err(Error::Precondition("non-integral element in the aggregate step".into()));
        }
        rows.push(ORDER.iter().map(|&i| coords[i].clone()).collect());
    }
    let h = hnf_mod(rows, &w);
    let a = Eisenstein::new(h[4][4].clone(), h[4][5].clone());
    let b = Eisenstein::new(BigInt::zero(), h[5][5].clone());
    let beta = gcd(&a, &b);
    if beta.is_unit() {
        return Ok(None);
    }
    Ok(Some(beta))
}

/// Upper-triangular basis of the lattice spanned by `rows` and W·Z^m.
fn hnf_mod(mut rows: Vec<Vec<BigInt>>, w: &BigInt) -> Vec<Vec<BigInt>> {
    let m = rows[0].len();
    for r in rows.iter_mut() {
        for x in r.iter_mut() {
            *x = x.mod_floor(w);
        }
    }
    let mut out = Vec::with_capacity(m);
    for col in 0..m {
        let mut wrow = vec![BigInt::zero(); m];
        wrow[col] = w.clone();
        let mut pivot = wrow;
        for r in rows.iter_mut() {
            if r[col].is_zero() {
                continue;
            }
            // extended gcd combination of pivot and r on this column
            let e = pivot[col].extended_gcd(&r[col]);
            let (pa, ra) = (&pivot[col] / &e.gcd, &r[col] / &e.gcd);
            let new_pivot: Vec<BigInt> = (0..m).map(|i| &e.x * &pivot[i] + &e.y * &r[i]).collect();
            let new_r: Vec<BigInt> = (0..m).map(|i| &pa * &r[i] - &ra * &pivot[i]).collect();
            pivot = new_pivot.into_iter().map(|x| x.mod_floor(w)).collect();
            *r = new_r.into_iter().map(|x| x.mod_floor(w)).collect();
            if pivot[col].is_zero() {
                // the pivot entry is gcd(…, W) which divides W; restore it
                pivot[col] = w.clone();
            }
        }
        out.push(pivot);
    }
    out
}

pub fn is_alternating(m: &Matrix) -> bool {
    (0..m.len()).all(|i| m[i][i] == 0 && (0..m.len()).all(|j| (m[i][j] + m[j][i]) % 3 == 0))
}

/// Rank over F₃.
pub fn rank_f3(m: &Matrix) -> usize {
    let mut a: Vec<Vec<u8>> = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] % 3 != 0) else { continue };
        a.swap(rank, piv);
        let inv = if a[rank][c] == 1 { 1 } else { 2 };
        for x in a[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for cc in 0..cols {
                    a[r][cc] = (a[r][cc] + 3 * 3 - f * a[rank][cc]) % 3;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// a = c·b for some c ∈ F₃^×.
pub fn equal_up_to_scalar(a: &Matrix, b: &Matrix) -> bool {
    [1u8, 2].iter().any(|&c| a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| *x == (c * y) % 3)))
}

pub fn rank_report(global: &Matrix, selmer_dim: usize, dim_s_phi: usize, t: usize) -> RankReport {
    let r = rank_f3(global);
    let bound = (selmer_dim as i64 - r as i64) + dim_s_phi as i64 - t as i64;
    RankReport { pairing_rank: r, selmer_dim, dim_s_phi, t, bound }
}
