//! Arithmetic in M = Q(ζ₃, θ) with θ³ = n, together with its subfields
//! L₁ = Q(ζ₃) and L₂ = Q(θ).
//!
//! Coordinates are over (1, θ, θ², ζ, ζθ, ζθ²). σ fixes ζ and sends θ to ζθ;
//! τ fixes θ and sends ζ to ζ².

use crate::arith::{cube_roots_mod_prime, exact_cbrt, rational_cbrt};
use crate::cubic::PureCubicSolution;
use crate::error::{Error, Result};
use crate::factor::is_prime;
use crate::padic::hensel_root;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subfield {
    Q,
    L1,
    L2,
    M,
}

impl Subfield {
    pub fn degree(self) -> usize {
        match self {
            Subfield::Q => 1,
            Subfield::L1 => 2,
            Subfield::L2 => 3,
            Subfield::M => 6,
        }
    }

    pub fn contains(self, other: Subfield) -> bool {
        match self {
            Subfield::M => true,
            Subfield::Q => other == Subfield::Q,
            s => other == s || other == Subfield::Q,
        }
    }

    /// Coordinates that may be nonzero for elements of this subfield.
    fn support(self) -> &'static [usize] {
        match self {
            Subfield::Q => &[0],
            Subfield::L1 => &[0, 3],
            Subfield::L2 => &[0, 1, 2],
            Subfield::M => &[0, 1, 2, 3, 4, 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerDescriptor {
    pub n: BigInt,
}

impl TowerDescriptor {
    pub fn new(n: BigInt) -> Result<Self> {
        if n.is_zero() || exact_cbrt(&n).is_some() {
            return Err(Error::InvalidTower(format!("radicand {n} is a cube")));
        }
        Ok(TowerDescriptor { n })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerElement {
    pub n: BigInt,
    pub c: [BigRational; 6],
}

type Triple = [BigRational; 3];

fn l2_mul(x: &[BigRational], y: &[BigRational], n: &BigInt) -> Triple {
    let nr = BigRational::from_integer(n.clone());
    [
        &x[0] * &y[0] + &nr * (&x[1] * &y[2] + &x[2] * &y[1]),
        &x[0] * &y[1] + &x[1] * &y[0] + &nr * (&x[2] * &y[2]),
        &x[0] * &y[2] + &x[1] * &y[1] + &x[2] * &y[0],
    ]
}

fn l2_add(x: &[BigRational], y: &[BigRational]) -> Triple {
    [&x[0] + &y[0], &x[1] + &y[1], &x[2] + &y[2]]
}

fn l2_sub(x: &[BigRational], y: &[BigRational]) -> Triple {
    [&x[0] - &y[0], &x[1] - &y[1], &x[2] - &y[2]]
}

fn l2_inv(x: &[BigRational], n: &BigInt) -> Result<Triple> {
    let s = PureCubicSolution::new(n.clone(), x[0].clone(), x[1].clone(), x[2].clone());
    let i = s.inv().map_err(|_| Error::DivisionByZero)?;
    Ok([i.x, i.y, i.z])
}

fn zero_q() -> BigRational {
    BigRational::zero()
}

impl TowerElement {
    pub fn new(n: &BigInt, c: [BigRational; 6]) -> Self {
        TowerElement { n: n.clone(), c }
    }

    pub fn from_ints(n: &BigInt, c: [i64; 6]) -> Self {
        Self::new(n, c.map(|x| BigRational::from_integer(BigInt::from(x))))
    }

    pub fn zero(n: &BigInt) -> Self {
        Self::rational(n, BigRational::zero())
    }

    pub fn one(n: &BigInt) -> Self {
        Self::rational(n, BigRational::one())
    }

    pub fn rational(n: &BigInt, q: BigRational) -> Self {
        Self::new(n, [q, zero_q(), zero_q(), zero_q(), zero_q(), zero_q()])
    }

    pub fn integer(n: &BigInt, k: &BigInt) -> Self {
        Self::rational(n, BigRational::from_integer(k.clone()))
    }

    pub fn theta(n: &BigInt) -> Self {
        Self::from_ints(n, [0, 1, 0, 0, 0, 0])
    }

    pub fn zeta(n: &BigInt) -> Self {
        Self::from_ints(n, [0, 0, 0, 1, 0, 0])
    }

    /// a + b·ζ₃.
    pub fn from_l1(n: &BigInt, a: BigRational, b: BigRational) -> Self {
        Self::new(n, [a, zero_q(), zero_q(), b, zero_q(), zero_q()])
    }

    pub fn from_l2(s: &PureCubicSolution) -> Self {
        Self::new(&s.radicand, [s.x.clone(), s.y.clone(), s.z.clone(), zero_q(), zero_q(), zero_q()])
    }

    pub fn to_l2(&self) -> Option<PureCubicSolution> {
        if self.c[3..].iter().all(|x| x.is_zero()) {
            Some(PureCubicSolution::new(self.n.clone(), self.c[0].clone(), self.c[1].clone(), self.c[2].clone()))
        } else {
            None
        }
    }

    /// (a, b) with self = a + bζ₃, when self ∈ L₁.
    pub fn to_l1(&self) -> Option<(BigRational, BigRational)> {
        if self.subfield() <= Subfield::L1 {
            Some((self.c[0].clone(), self.c[3].clone()))
        } else {
            None
        }
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.subfield() == Subfield::Q {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    fn parts(&self) -> (&[BigRational], &[BigRational]) {
        (&self.c[0..3], &self.c[3..6])
    }

    fn from_parts(n: &BigInt, a: Triple, b: Triple) -> Self {
        let [a0, a1, a2] = a;
        let [b0, b1, b2] = b;
        Self::new(n, [a0, a1, a2, b0, b1, b2])
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.n, o.n, "tower elements over different radicands");
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    /// Smallest member of the tower containing self.
    pub fn subfield(&self) -> Subfield {
        let nz = |i: usize| !self.c[i].is_zero();
        let has_theta = nz(1) || nz(2) || nz(4) || nz(5);
        let has_zeta = nz(3) || nz(4) || nz(5);
        match (has_theta, has_zeta) {
            (false, false) => Subfield::Q,
            (false, true) => Subfield::L1,
            (true, false) => Subfield::L2,
            (true, true) => Subfield::M,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let mut c = self.c.clone();
        for (x, y) in c.iter_mut().zip(o.c.iter()) {
            *x += y;
        }
        Self::new(&self.n, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.n, self.c.clone().map(|x| -x))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(&self.n, self.c.clone().map(|x| x * q))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        // (A + Bζ)(C + Dζ) = (AC − BD) + (AD + BC − BD)ζ
        let (a, b) = self.parts();
        let (c, d) = o.parts();
        let ac = l2_mul(a, c, &self.n);
        let bd = l2_mul(b, d, &self.n);
        let ad = l2_mul(a, d, &self.n);
        let bc = l2_mul(b, c, &self.n);
        Self::from_parts(&self.n, l2_sub(&ac, &bd), l2_sub(&l2_add(&ad, &bc), &bd))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn cube(&self) -> Self {
        self.mul(&self.square())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x·τ(x) = A² − AB + B² lies in L₂.
        let t = self.tau();
        let nrm = self.mul(&t);
        let ni = l2_inv(&nrm.c[0..3], &self.n)?;
        let ni = Self::from_parts(&self.n, ni, [zero_q(), zero_q(), zero_q()]);
        Ok(t.mul(&ni))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = Self::one(&self.n);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.square();
            k >>= 1;
        }
        Ok(r)
    }

    /// θ ↦ ζθ.
    pub fn sigma(&self) -> Self {
        let c = &self.c;
        // c0 + c1ζθ + c2ζ²θ² + c3ζ + c4ζ²θ + c5θ², using ζ² = −1 − ζ.
        Self::new(
            &self.n,
            [
                c[0].clone(),
                -c[4].clone(),
                &c[5] - &c[2],
                c[3].clone(),
                &c[1] - &c[4],
                -c[2].clone(),
            ],
        )
    }

    /// ζ ↦ ζ².
    pub fn tau(&self) -> Self {
        let (a, b) = self.parts();
        let a2 = l2_sub(a, b);
        let b2 = [-b[0].clone(), -b[1].clone(), -b[2].clone()];
        Self::from_parts(&self.n, a2, b2)
    }

    pub fn norm_rel(&self, source: Subfield, target: Subfield) -> Result<Self> {
        if !source.contains(target) || !source.contains(self.subfield()) {
            return Err(Error::InvalidTower(format!(
                "no norm from {source:?} to {target:?} for an element of {:?}",
                self.subfield()
            )));
        }
        let s1 = self.sigma();
        let s2 = s1.sigma();
        let out = match (source, target) {
            (a, b) if a == b => self.clone(),
            (Subfield::M, Subfield::L1) | (Subfield::L2, Subfield::Q) => self.mul(&s1).mul(&s2),
            (Subfield::M, Subfield::L2) | (Subfield::L1, Subfield::Q) => self.mul(&self.tau()),
            (Subfield::M, Subfield::Q) => {
                let n1 = self.mul(&s1).mul(&s2);
                n1.mul(&n1.tau())
            }
            _ => unreachable!(),
        };
        debug_assert!(target.contains(out.subfield()));
        Ok(out)
    }

    pub fn norm_to_q(&self) -> BigRational {
        self.norm_rel(Subfield::M, Subfield::Q).unwrap().c[0].clone()
    }

    pub fn denominator(&self) -> BigInt {
        self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Integer coordinates of self·d for d the common denominator.
    pub fn integral_coords(&self) -> (Vec<BigInt>, BigInt) {
        let d = self.denominator();
        let v = self.c.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect();
        (v, d)
    }

    /// Bit size of the largest coordinate numerator and of the denominator.
    pub fn height_bits(&self) -> u64 {
        let (v, d) = self.integral_coords();
        v.iter().map(|x| x.bits()).max().unwrap_or(0).max(d.bits())
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else {
        Some(BigRational::from_integer(BigInt::from_str(s).ok()?))
    }
}

/// Parses `[c0, c1, c2, c3, c4, c5]`; a bare rational is also accepted.
pub fn parse_element(s: &str, n: &BigInt) -> std::result::Result<TowerElement, String> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 6 {
            return Err(format!("expected 6 coordinates, found {}", parts.len()));
        }
        let mut c: Vec<BigRational> = Vec::with_capacity(6);
        for p in parts {
            c.push(parse_rational(p).ok_or_else(|| format!("bad coordinate `{}`", p.trim()))?);
        }
        let c: [BigRational; 6] = c.try_into().unwrap();
        Ok(TowerElement::new(n, c))
    } else {
        parse_rational(t)
            .map(|q| TowerElement::rational(n, q))
            .ok_or_else(|| format!("bad tower element `{t}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CubeTest {
    Cube(TowerElement),
    NonCube(BigInt),
    Unknown,
}

impl CubeTest {
    pub fn is_cube(&self) -> bool {
        matches!(self, CubeTest::Cube(_))
    }
}

/// Primes p ≡ 1 (mod 3), p ∤ 3n, at which every embedding of `field` has
/// image in F_p. For fields containing θ this needs n to be a cube mod p.
fn split_primes(n: &BigInt, field: Subfield, count: usize) -> Vec<BigInt> {
    let needs_theta = matches!(field, Subfield::L2 | Subfield::M);
    let mut out = Vec::new();
    let mut p = BigInt::from(7);
    while out.len() < count {
        if is_prime(&p)
            && !(n % &p).is_zero()
            && (!needs_theta || cube_roots_mod_prime(&n.mod_floor(&p), &p).len() == 3)
        {
            out.push(p.clone());
        }
        p += 6;
    }
    out
}

/// Images of ζ and θ in Z/p^k at every embedding of `field`.
fn embeddings(field: Subfield, n: &BigInt, p: &BigInt, k: u32) -> Result<Vec<(BigInt, BigInt)>> {
    let zs: Vec<BigInt> = cube_roots_mod_prime(&BigInt::one(), p)
        .into_iter()
        .filter(|r| !r.is_one())
        .map(|r| hensel_root(&[BigInt::one(), BigInt::one(), BigInt::one()], p, &r, k).map(|x| x.to_integer_mod(k).unwrap()))
        .collect::<Result<_>>()?;
    let ts: Vec<BigInt> = if matches!(field, Subfield::L2 | Subfield::M) {
        cube_roots_mod_prime(&n.mod_floor(p), p)
            .into_iter()
            .map(|t| {
                hensel_root(&[-n.clone(), BigInt::zero(), BigInt::zero(), BigInt::one()], p, &t, k)
                    .map(|x| x.to_integer_mod(k).unwrap())
            })
            .collect::<Result<_>>()?
    } else {
        // θ has coordinate zero in these fields; its image is never used.
        vec![BigInt::zero()]
    };
    let mut out = Vec::new();
    match field {
        Subfield::Q => out.push((zs[0].clone(), ts[0].clone())),
        Subfield::L1 => {
            for z in &zs {
                out.push((z.clone(), ts[0].clone()));
            }
        }
        Subfield::L2 => {
            for t in &ts {
                out.push((zs[0].clone(), t.clone()));
            }
        }
        Subfield::M => {
            for z in &zs {
                for t in &ts {
                    out.push((z.clone(), t.clone()));
                }
            }
        }
    }
    Ok(out)
}

/// Image of the integral coordinate vector v under ζ ↦ z, θ ↦ t, modulo m.
fn eval_mod(v: &[BigInt], z: &BigInt, t: &BigInt, m: &BigInt) -> BigInt {
    let t2 = (t * t).mod_floor(m);
    let a = &v[0] + &v[1] * t + &v[2] * &t2;
    let b = &v[3] + &v[4] * t + &v[5] * &t2;
    (a + b * z).mod_floor(m)
}

fn basis_row(z: &BigInt, t: &BigInt, m: &BigInt, support: &[usize]) -> Vec<BigInt> {
    let t2 = (t * t).mod_floor(m);
    let full = [
        BigInt::one(),
        t.clone(),
        t2.clone(),
        z.clone(),
        (z * t).mod_floor(m),
        (z * &t2).mod_floor(m),
    ];
    support.iter().map(|&i| full[i].clone()).collect()
}

/// Inverse of a square matrix over Z/m (m a prime power), if its determinant is a unit.
fn mat_inv_mod(a: &[Vec<BigInt>], m: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let d = a.len();
    let mut aug: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigInt> = row.iter().map(|x| x.mod_floor(m)).collect();
            r.extend((0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| crate::arith::mod_inv(&aug[r][col], m).is_some())?;
        aug.swap(col, piv);
        let inv = crate::arith::mod_inv(&aug[col][col], m)?;
        for x in aug[col].iter_mut() {
            *x = (&*x * &inv).mod_floor(m);
        }
        for r in 0..d {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in 0..2 * d {
                    let v = (&aug[r][c] - &f * &aug[col][c]).mod_floor(m);
                    aug[r][c] = v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[d..].to_vec()).collect())
}

/// r/s ≡ u (mod m) with |r|, s ≤ √(m/2).
pub fn rational_reconstruction(u: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    Some(BigRational::new(r1, s1))
}

/// Cube roots of a unit u modulo p^k (p ≡ 1 mod 3): all three, or none.
fn cube_roots_mod_pk(u: &BigInt, p: &BigInt, k: u32) -> Vec<BigInt> {
    cube_roots_mod_prime(&u.mod_floor(p), p)
        .into_iter()
        .filter_map(|r| {
            hensel_root(&[-u.clone(), BigInt::zero(), BigInt::zero(), BigInt::one()], p, &r, k)
                .ok()
                .map(|x| x.to_integer_mod(k).unwrap())
        })
        .collect()
}

const CHARACTER_PRIMES: usize = 40;
const RECONSTRUCTION_BITS: u64 = 256;

/// Whether e is a cube in `field` (which must contain e).
pub fn cube_class_test_in(e: &TowerElement, field: Subfield) -> CubeTest {
    if e.is_zero() || !field.contains(e.subfield()) {
        return CubeTest::Unknown;
    }
    if let Some(q) = e.to_rational() {
        if let Some(r) = rational_cbrt(&q) {
            return CubeTest::Cube(TowerElement::rational(&e.n, r));
        }
        if field == Subfield::Q || field == Subfield::L1 {
            // a rational is a cube in L₁ iff it is one in Q (degree 2)
            return match first_character_failure(e, Subfield::Q) {
                Some(p) => CubeTest::NonCube(p),
                None => CubeTest::Unknown,
            };
        }
    }
    if let Some(p) = first_character_failure(e, field) {
        return CubeTest::NonCube(p);
    }
    match reconstruct_cube_root(e, field) {
        Some(w) => CubeTest::Cube(w),
        None => CubeTest::Unknown,
    }
}

pub fn cube_class_test(e: &TowerElement) -> CubeTest {
    cube_class_test_in(e, Subfield::M)
}

fn first_character_failure(e: &TowerElement, field: Subfield) -> Option<BigInt> {
    let (v, d) = e.integral_coords();
    for p in split_primes(&e.n, field, CHARACTER_PRIMES) {
        if (&d % &p).is_zero() {
            continue;
        }
        let embs = embeddings(field, &e.n, &p, 1).ok()?;
        let exp = (&p - 1u32) / 3u32;
        let d2 = (&d * &d).mod_floor(&p);
        for (z, t) in &embs {
            // v/d and v·d² differ by the cube d³
            let img = (eval_mod(&v, z, t, &p) * &d2).mod_floor(&p);
            if img.is_zero() {
                continue;
            }
            if !img.modpow(&exp, &p).is_one() {
                return Some(p);
            }
        }
    }
    None
}

fn reconstruct_cube_root(e: &TowerElement, field: Subfield) -> Option<TowerElement> {
    let support = field.support();
    let (v, d) = e.integral_coords();
    // y³ = v/d: work with v·d² = (y·d)³.
    let d2 = &d * &d;
    let w: Vec<BigInt> = v.iter().map(|x| x * &d2).collect();
    let we = TowerElement::new(&e.n, w.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>().try_into().unwrap());
    let target_bits = RECONSTRUCTION_BITS.max(2 * (we.height_bits() / 3) + 2 * e.n.bits() + 96);
    let primes = split_primes(&e.n, field, 12);
    let p = primes.into_iter().find(|p| {
        if (&d % p).is_zero() {
            return false;
        }
        match embeddings(field, &e.n, p, 1) {
            Ok(embs) => embs.iter().all(|(z, t)| !eval_mod(&w, z, t, p).is_zero()),
            Err(_) => false,
        }
    })?;
    let mut bits = target_bits;
    for _ in 0..3 {
        let k = (bits / p.bits() + 1) as u32;
        if let Some(y) = reconstruct_at(&we, field, support, &p, k) {
            let root = y.scale(&BigRational::new(BigInt::one(), d.clone()));
            if root.cube() == *e {
                return Some(root);
            }
        }
        bits *= 2;
    }
    None
}

fn reconstruct_at(we: &TowerElement, field: Subfield, support: &[usize], p: &BigInt, k: u32) -> Option<TowerElement> {
    let m = p.pow(k);
    let (w, _) = we.integral_coords();
    let embs = embeddings(field, &we.n, p, k).ok()?;
    let rows: Vec<Vec<BigInt>> = embs.iter().map(|(z, t)| basis_row(z, t, &m, support)).collect();
    let inv = mat_inv_mod(&rows, &m)?;
    let roots: Vec<Vec<BigInt>> = embs
        .iter()
        .map(|(z, t)| cube_roots_mod_pk(&eval_mod(&w, z, t, &m), p, k))
        .collect();
    if roots.iter().any(|r| r.len() != 3) {
        return None;
    }
    let dim = embs.len();
    let total = 3usize.pow(dim as u32);
    for idx in 0..total {
        let mut choice = Vec::with_capacity(dim);
        let mut x = idx;
        for _ in 0..dim {
            choice.push(x % 3);
            x /= 3;
        }
        let mut coords = vec![BigRational::zero(); 6];
        let mut ok = true;
        for (row, &slot) in inv.iter().zip(support.iter()) {
            let mut acc = BigInt::zero();
            for (j, c) in row.iter().enumerate() {
                acc += c * &roots[j][choice[j]];
            }
            match rational_reconstruction(&acc.mod_floor(&m), &m) {
                Some(q) => coords[slot] = q,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let cand = TowerElement::new(&we.n, coords.try_into().unwrap());
        if cand.cube() == *we {
            return Some(cand);
        }
    }
    None
}

/// Removes rational cube factors from e, returning a cube-equivalent element
/// with integral, cube-content-free coordinates.
fn strip_rational_cubes(e: &TowerElement) -> TowerElement {
    let (v, d) = e.integral_coords();
    // e = v/d ≡ v·d² (cube-equivalent), then divide out cube factors of the content.
    let d2 = &d * &d;
    let w: Vec<BigInt> = v.iter().map(|x| x * &d2).collect();
    let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return e.clone();
    }
    let c = cube_part_small(&g);
    let c3 = &c * &c * &c;
    let c = w.into_iter().map(|x| BigRational::from_integer(x / &c3)).collect::<Vec<_>>();
    TowerElement::new(&e.n, c.try_into().unwrap())
}

/// Largest c with c³ | g, using trial division up to 10⁵ and an exact cube check on the rest.
fn cube_part_small(g: &BigInt) -> BigInt {
    let mut g = g.abs();
    let mut c = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while p <= limit && &p * &p <= g {
        let mut k = 0;
        while (&g % &p).is_zero() {
            g /= &p;
            k += 1;
        }
        for _ in 0..k / 3 {
            c *= &p;
        }
        p += 1;
    }
    if let Some(r) = exact_cbrt(&g) {
        c *= r;
    }
    c
}

/// A cube-equivalent representative of e with height no larger than e's,
/// found by removing rational cubes and dividing by cubes of small elements.
pub fn small_representative(e: &TowerElement) -> TowerElement {
    if e.is_zero() {
        return e.clone();
    }
    let mut best = strip_rational_cubes(e);
    if best.height_bits() > e.height_bits() {
        best = e.clone();
    }
    let field = e.subfield();
    let coords = field.support();
    let range: Vec<i64> = vec![-1, 0, 1, 2];
    let total = range.len().pow(coords.len() as u32);
    if total > 256 {
        return best;
    }
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 8 {
        improved = false;
        rounds += 1;
        for idx in 1..total {
            let mut c = [0i64; 6];
            let mut x = idx;
            for &slot in coords {
                c[slot] = range[x % range.len()];
                x /= range.len();
            }
            let z = TowerElement::from_ints(&e.n, c);
            let z3 = z.cube();
            if z3.is_zero() || z3.is_one() {
                continue;
            }
            let Ok(q) = best.div(&z3) else { continue };
            let cand = strip_rational_cubes(&q);
            if cand.height_bits() < best.height_bits() {
                best = cand;
                improved = true;
            }
        }
    }
    best
}

/// i64 view of small coordinates, mainly for display and tests.
pub fn small_coords(e: &TowerElement) -> Option<[i64; 6]> {
    let mut out = [0i64; 6];
    for (o, x) in out.iter_mut().zip(e.c.iter()) {
        if !x.is_integer() {
            return None;
        }
        *o = x.to_integer().to_i64()?;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(k: i64) -> BigInt {
        BigInt::from(k)
    }

    fn el(k: i64, c: [i64; 6]) -> TowerElement {
        TowerElement::from_ints(&n(k), c)
    }

    #[test]
    fn basic_relations() {
        let t = TowerElement::theta(&n(181));
        assert_eq!(t.mul(&t.square()), TowerElement::integer(&n(181), &n(181)));
        let z = TowerElement::zeta(&n(181));
        let one_plus_z = TowerElement::one(&n(181)).add(&z);
        let one_plus_z2 = TowerElement::one(&n(181)).add(&z.square());
        assert!(one_plus_z.mul(&one_plus_z2).is_one());
        assert!(z.cube().is_one());
    }

    #[test]
    fn galois_actions() {
        let k = n(181);
        let t = TowerElement::theta(&k);
        let z = TowerElement::zeta(&k);
        assert_eq!(t.sigma(), z.mul(&t));
        // τσ(θ) = ζ²θ = σ²τ(θ)
        let lhs = t.sigma().tau();
        let rhs = t.tau().sigma().sigma();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, z.square().mul(&t));
    }

    #[test]
    fn paper_norms() {
        let b1 = el(181, [217, 40, 7, 0, 0, 0]);
        let b2 = el(181, [3011, 314, 59, 0, 0, 0]);
        let n1 = b1.norm_rel(Subfield::L2, Subfield::Q).unwrap().to_rational().unwrap();
        assert_eq!(n1, BigRational::from_integer(n(46656)));
        let n2 = b2.norm_rel(Subfield::L2, Subfield::Q).unwrap().to_rational().unwrap();
        let want = n(2).pow(3) * n(3).pow(12) * n(13).pow(3);
        assert_eq!(n2, BigRational::from_integer(want));
        let xi = TowerElement::from_l1(&n(181), BigRational::from_integer(n(52)), BigRational::from_integer(n(39)));
        assert_eq!(xi.norm_rel(Subfield::M, Subfield::L1).unwrap(), xi.cube());
        assert!(b1.norm_rel(Subfield::L2, Subfield::L1).is_err());
    }

    #[test]
    fn cube_tests() {
        let k = n(181);
        let e = TowerElement::one(&k).add(&TowerElement::theta(&k)).cube();
        match cube_class_test(&e) {
            CubeTest::Cube(w) => assert_eq!(w.cube(), e),
            other => panic!("{other:?}"),
        }
        assert!(matches!(cube_class_test(&TowerElement::theta(&n(2))), CubeTest::NonCube(_)));
        let z = el(181, [3, 1, -2, 5, 0, 7]).cube();
        assert!(cube_class_test(&z).is_cube());
        let q = TowerElement::rational(&k, BigRational::new(n(8), n(27)));
        assert!(cube_class_test(&q).is_cube());
        assert!(matches!(cube_class_test_in(&TowerElement::integer(&k, &n(2)), Subfield::L1), CubeTest::NonCube(_)));
        // θ³ = 181 is a cube in M but not in L₁.
        assert!(cube_class_test(&TowerElement::integer(&k, &k)).is_cube());
        assert!(!cube_class_test_in(&TowerElement::integer(&k, &k), Subfield::L1).is_cube());
    }

    #[test]
    fn paper_lift_condition_is_a_cube() {
        // σ(b₁)/(a₁b₁) with a₁ = ζ₃ is a cube in M.
        let k = n(181);
        let b1 = el(181, [217, 40, 7, 0, 0, 0]);
        let a1 = TowerElement::zeta(&k);
        let r = b1.sigma().div(&a1.mul(&b1)).unwrap();
        assert!(cube_class_test(&r).is_cube());
    }

    #[test]
    fn small_representatives() {
        let k = n(7);
        assert!(small_representative(&TowerElement::integer(&k, &n(8))).is_one());
        let e = el(7, [2, 1, 0, 0, 0, 0]);
        let big = e.mul(&el(7, [1, 1, 0, 0, 0, 0]).cube());
        // −1 is a cube, so the sign of the representative is not determined.
        let r = small_representative(&big);
        assert!(r == e || r == e.neg(), "{r}");
        let r = small_representative(&e);
        assert!(r == e || r == e.neg(), "{r}");
    }

    #[test]
    fn parse_round_trip() {
        let e = TowerElement::new(
            &n(802),
            [
                BigRational::new(n(290), n(3)),
                BigRational::new(n(-4), n(3)),
                BigRational::new(n(5), n(3)),
                BigRational::new(n(41), n(3)),
                BigRational::new(n(11), n(3)),
                BigRational::new(n(5), n(3)),
            ],
        );
        let s = e.to_string();
        assert_eq!(parse_element(&s, &n(802)).unwrap(), e);
        assert!(parse_element("[1, 2, 3]", &n(2)).is_err());
        assert_eq!(parse_element("-7/2", &n(2)).unwrap().to_rational(), Some(BigRational::new(n(-7), n(2))));
    }

    fn arb_el(k: i64) -> impl Strategy<Value = TowerElement> {
        proptest::array::uniform6(-9i64..10).prop_map(move |c| el(k, c))
    }

    fn arb_radicand() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![2i64, 3, 5, 7, 10, 181])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inverse_and_automorphisms(k in arb_radicand(), a in arb_el(2), b in arb_el(2)) {
            let a = TowerElement::new(&n(k), a.c);
            let b = TowerElement::new(&n(k), b.c);
            prop_assume!(!a.is_zero());
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
            prop_assert_eq!(a.sigma().sigma().sigma(), a.clone());
            prop_assert_eq!(a.tau().tau(), a.clone());
            prop_assert_eq!(a.mul(&b).sigma(), a.sigma().mul(&b.sigma()));
            prop_assert_eq!(a.mul(&b).tau(), a.tau().mul(&b.tau()));
            prop_assert_eq!(a.sigma().tau(), a.tau().sigma().sigma());
        }

        #[test]
        fn norms_are_multiplicative_and_transitive(k in arb_radicand(), a in arb_el(2), b in arb_el(2)) {
            let a = TowerElement::new(&n(k), a.c);
            let b = TowerElement::new(&n(k), b.c);
            for target in [Subfield::L1, Subfield::L2, Subfield::Q] {
                let lhs = a.mul(&b).norm_rel(Subfield::M, target).unwrap();
                let rhs = a.norm_rel(Subfield::M, target).unwrap().mul(&b.norm_rel(Subfield::M, target).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
            let via_l1 = a.norm_rel(Subfield::M, Subfield::L1).unwrap().norm_rel(Subfield::L1, Subfield::Q).unwrap();
            let via_l2 = a.norm_rel(Subfield::M, Subfield::L2).unwrap().norm_rel(Subfield::L2, Subfield::Q).unwrap();
            prop_assert_eq!(&via_l1, &via_l2);
            prop_assert_eq!(via_l1, a.norm_rel(Subfield::M, Subfield::Q).unwrap());
            // σ and τ commute with the norms to their fixed fields
            prop_assert_eq!(a.sigma().norm_rel(Subfield::M, Subfield::L1).unwrap(), a.norm_rel(Subfield::M, Subfield::L1).unwrap());
            prop_assert_eq!(a.tau().norm_rel(Subfield::M, Subfield::L2).unwrap(), a.norm_rel(Subfield::M, Subfield::L2).unwrap());
        }

        #[test]
        fn cube_test_is_sound(k in arb_radicand(), a in arb_el(2)) {
            let a = TowerElement::new(&n(k), a.c);
            prop_assume!(!a.is_zero());
            match cube_class_test(&a.cube()) {
                CubeTest::Cube(w) => prop_assert_eq!(w.cube(), a.cube()),
                other => prop_assert!(false, "cube not recognised: {:?}", other),
            }
            if let CubeTest::Cube(w) = cube_class_test(&a) {
                prop_assert_eq!(w.cube(), a);
            }
        }
    }
}
