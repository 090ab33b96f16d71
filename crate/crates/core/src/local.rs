//! The completions K_v of K = Q(ζ₃) above a rational prime p, their cube
//! classes, and the cubic Hilbert norm residue symbol.
//!
//! Three shapes occur. For p ≡ 1 (mod 3) the field is Q_p itself with a fixed
//! image r of ζ₃. For p ≡ 2 (mod 3) it is the unramified quadratic extension,
//! and for p = 3 the totally ramified Q₃(ζ₃) with uniformizer λ = 1 − ζ₃.
//! Elements are always stored as pairs a + bζ₃ of p-adic numbers; in the split
//! case b is folded into a at construction time.

use crate::arith::{mod_inv, valuation};
use crate::error::{Error, Result};
use crate::padic::{hensel_root, PadicNumber};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regime {
    /// p ≡ 1 (mod 3); `zeta` is the image of ζ₃ in Z_p modulo p^prec.
    Split { zeta: BigInt },
    /// p ≡ 2 (mod 3).
    Inert,
    /// p = 3.
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalField {
    pub p: BigInt,
    pub regime: Regime,
    pub prec: u32,
}

/// a + b·ζ₃ in K_v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EisensteinLocal {
    pub a: PadicNumber,
    pub b: PadicNumber,
}

/// Exponent vector of a class in K_v^×/(K_v^×)³.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalCubeClass {
    /// (e_π, e_u): valuation mod 3 and the cubic character of the unit part.
    Tame([u8; 2]),
    /// Exponents over the basis (λ, η₁, η₂, η₃), ηᵢ = 1 − λ^i.
    Wild([u8; 4]),
}

pub const DEFAULT_TAME_PREC: u32 = 8;
pub const DEFAULT_WILD_PREC: u32 = 12;

impl LocalField {
    /// The completion at p. For split p the image of ζ₃ is the root of
    /// x² + x + 1 reducing to `zeta_residue` (default: the smaller residue).
    pub fn new(p: &BigInt, prec: u32, zeta_residue: Option<&BigInt>) -> Result<Self> {
        let three = BigInt::from(3);
        let regime = if *p == three {
            Regime::Ramified
        } else if (p % 3u32) == BigInt::one() {
            let seed = match zeta_residue {
                Some(z) => z.mod_floor(p),
                None => {
                    let roots = crate::arith::cube_roots_mod_prime(&BigInt::one(), p);
                    roots.into_iter().find(|r| !r.is_one()).ok_or(Error::NoLift)?
                }
            };
            let poly = [BigInt::one(), BigInt::one(), BigInt::one()];
            let z = hensel_root(&poly, p, &seed, prec + 4)?;
            Regime::Split { zeta: z.to_integer_mod(prec + 4).unwrap() }
        } else {
            Regime::Inert
        };
        Ok(LocalField { p: p.clone(), regime, prec })
    }

    pub fn default_for(p: &BigInt) -> Result<Self> {
        let prec = if *p == BigInt::from(3) { DEFAULT_WILD_PREC } else { DEFAULT_TAME_PREC };
        Self::new(p, prec, None)
    }

    /// [K_v : Q_p].
    pub fn degree(&self) -> u32 {
        match self.regime {
            Regime::Split { .. } => 1,
            _ => 2,
        }
    }

    pub fn zeta_residue(&self) -> Option<BigInt> {
        match &self.regime {
            Regime::Split { zeta } => Some(zeta.mod_floor(&self.p)),
            _ => None,
        }
    }

    fn zeta_padic(&self) -> Option<PadicNumber> {
        match &self.regime {
            Regime::Split { zeta } => Some(PadicNumber::from_int(zeta, &self.p, self.prec + 4)),
            _ => None,
        }
    }

    pub fn padic_rational(&self, q: &BigRational) -> PadicNumber {
        PadicNumber::from_rational(q, &self.p, self.prec)
    }

    /// Element a + b·ζ₃ from p-adic components.
    pub fn make(&self, a: PadicNumber, b: PadicNumber) -> EisensteinLocal {
        match self.zeta_padic() {
            Some(z) => {
                let folded = a.add(&b.mul(&z));
                EisensteinLocal { a: folded, b: PadicNumber::zero(&self.p, i64::MAX / 4) }
            }
            None => EisensteinLocal { a, b },
        }
    }

    pub fn from_padic(&self, a: PadicNumber) -> EisensteinLocal {
        EisensteinLocal { a, b: PadicNumber::zero(&self.p, i64::MAX / 4) }
    }

    pub fn from_rational(&self, q: &BigRational) -> EisensteinLocal {
        self.from_padic(self.padic_rational(q))
    }

    /// Image of the element a + b·ζ₃ of Q(ζ₃).
    pub fn from_eisenstein(&self, a: &BigRational, b: &BigRational) -> EisensteinLocal {
        self.make(self.padic_rational(a), self.padic_rational(b))
    }

    pub fn one(&self) -> EisensteinLocal {
        self.from_rational(&BigRational::one())
    }

    pub fn zeta(&self) -> EisensteinLocal {
        self.from_eisenstein(&BigRational::zero(), &BigRational::one())
    }

    pub fn mul(&self, x: &EisensteinLocal, y: &EisensteinLocal) -> EisensteinLocal {
        // (a + bζ)(c + dζ) = (ac − bd) + (ad + bc − bd)ζ
        let ac = x.a.mul(&y.a);
        let bd = x.b.mul(&y.b);
        let ad = x.a.mul(&y.b);
        let bc = x.b.mul(&y.a);
        self.make(ac.sub(&bd), ad.add(&bc).sub(&bd))
    }

    pub fn add(&self, x: &EisensteinLocal, y: &EisensteinLocal) -> EisensteinLocal {
        self.make(x.a.add(&y.a), x.b.add(&y.b))
    }

    pub fn sub(&self, x: &EisensteinLocal, y: &EisensteinLocal) -> EisensteinLocal {
        self.make(x.a.sub(&y.a), x.b.sub(&y.b))
    }

    pub fn neg(&self, x: &EisensteinLocal) -> EisensteinLocal {
        EisensteinLocal { a: x.a.neg(), b: x.b.neg() }
    }

    /// a² − ab + b², the norm to Q_p (only meaningful for the pair regimes).
    fn pair_norm(x: &EisensteinLocal) -> PadicNumber {
        x.a.mul(&x.a).sub(&x.a.mul(&x.b)).add(&x.b.mul(&x.b))
    }

    pub fn inv(&self, x: &EisensteinLocal) -> Result<EisensteinLocal> {
        match self.regime {
            Regime::Split { .. } => Ok(self.from_padic(x.a.inv()?)),
            _ => {
                let n = Self::pair_norm(x);
                let ni = n.inv()?;
                // conjugate: a + bζ² = (a − b) − bζ
                Ok(self.make(x.a.sub(&x.b).mul(&ni), x.b.neg().mul(&ni)))
            }
        }
    }

    pub fn div(&self, x: &EisensteinLocal, y: &EisensteinLocal) -> Result<EisensteinLocal> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn is_zero(&self, x: &EisensteinLocal) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }

    /// Splits x = p^v·(a + bζ) with a, b integers known mod p^k, not both divisible by p.
    fn normalize(&self, x: &EisensteinLocal) -> Result<(i64, BigInt, BigInt, u32)> {
        if self.is_zero(x) {
            return Err(Error::InsufficientPrecision);
        }
        let v = match (x.a.valuation(), x.b.valuation()) {
            (Some(va), Some(vb)) => va.min(vb),
            (Some(va), None) => va,
            (None, Some(vb)) => vb,
            (None, None) => unreachable!(),
        };
        let abs = x.a.abs_prec().min(x.b.abs_prec());
        if abs <= v {
            return Err(Error::InsufficientPrecision);
        }
        let k = (abs - v).min(64) as u32;
        let m = self.p.pow(k);
        let comp = |c: &PadicNumber| -> BigInt {
            if c.is_zero() {
                BigInt::zero()
            } else {
                (&c.unit * self.p.pow((c.val - v) as u32)).mod_floor(&m)
            }
        };
        Ok((v, comp(&x.a), comp(&x.b), k))
    }

    /// Valuation normalized so that v(p) = 1 (λ-adic valuation halved at p = 3
    /// is not used; see [`Self::lambda_valuation`]).
    pub fn valuation(&self, x: &EisensteinLocal) -> Result<i64> {
        Ok(self.normalize(x)?.0)
    }

    /// v_λ at p = 3.
    pub fn lambda_valuation(&self, x: &EisensteinLocal) -> Result<i64> {
        let (v, a, b, _) = self.normalize(x)?;
        let n = &a * &a - &a * &b + &b * &b;
        let r = if (n % 3u32).is_zero() { 1 } else { 0 };
        Ok(2 * v + r)
    }

    pub fn cube_class(&self, x: &EisensteinLocal) -> Result<LocalCubeClass> {
        let (v, a, b, k) = self.normalize(x)?;
        let e_pi = v.rem_euclid(3) as u8;
        match &self.regime {
            Regime::Split { zeta } => {
                let r = zeta.mod_floor(&self.p);
                let u = a.mod_floor(&self.p);
                Ok(LocalCubeClass::Tame([e_pi, cubic_character_fp(&u, &self.p, &r)?]))
            }
            Regime::Inert => {
                let u = (a.mod_floor(&self.p), b.mod_floor(&self.p));
                Ok(LocalCubeClass::Tame([e_pi, cubic_character_fp2(&u, &self.p)?]))
            }
            Regime::Ramified => {
                if k < 3 {
                    return Err(Error::InsufficientPrecision);
                }
                Ok(LocalCubeClass::Wild(wild_class(v, &a, &b)))
            }
        }
    }

    /// The symbol (x, y)_v as an exponent of ζ₃.
    pub fn hilbert_symbol(&self, x: &EisensteinLocal, y: &EisensteinLocal) -> Result<u8> {
        let cx = self.cube_class(x)?;
        let cy = self.cube_class(y)?;
        Ok(class_symbol(&cx, &cy))
    }

    pub fn is_cube(&self, x: &EisensteinLocal) -> Result<bool> {
        Ok(self.cube_class(x)?.is_trivial())
    }
}

impl LocalCubeClass {
    pub fn is_trivial(&self) -> bool {
        match self {
            LocalCubeClass::Tame(e) => e.iter().all(|&x| x == 0),
            LocalCubeClass::Wild(e) => e.iter().all(|&x| x == 0),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (LocalCubeClass::Tame(a), LocalCubeClass::Tame(b)) => {
                LocalCubeClass::Tame([(a[0] + b[0]) % 3, (a[1] + b[1]) % 3])
            }
            (LocalCubeClass::Wild(a), LocalCubeClass::Wild(b)) => {
                let mut e = [0u8; 4];
                for i in 0..4 {
                    e[i] = (a[i] + b[i]) % 3;
                }
                LocalCubeClass::Wild(e)
            }
            _ => panic!("mixing cube classes of different regimes"),
        }
    }

    pub fn scale(&self, k: u8) -> Self {
        match self {
            LocalCubeClass::Tame(a) => LocalCubeClass::Tame([(a[0] * k) % 3, (a[1] * k) % 3]),
            LocalCubeClass::Wild(a) => {
                LocalCubeClass::Wild([(a[0] * k) % 3, (a[1] * k) % 3, (a[2] * k) % 3, (a[3] * k) % 3])
            }
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(2)
    }

    pub fn exponents(&self) -> Vec<u8> {
        match self {
            LocalCubeClass::Tame(a) => a.to_vec(),
            LocalCubeClass::Wild(a) => a.to_vec(),
        }
    }
}

/// The p = 3 table, indexed by (λ, η₁, η₂, η₃): entry [i][j] is the exponent
/// of (basisᵢ, basisⱼ).
pub const WILD_TABLE: [[u8; 4]; 4] = [
    [0, 0, 0, 2],
    [0, 0, 1, 0],
    [0, 2, 0, 0],
    [1, 0, 0, 0],
];

/// Bilinear extension of the tame formula or of the p = 3 table.
pub fn class_symbol(x: &LocalCubeClass, y: &LocalCubeClass) -> u8 {
    match (x, y) {
        (LocalCubeClass::Tame([m, u]), LocalCubeClass::Tame([n, w])) => {
            // n·χ(u) − m·χ(w)
            ((*n as i32 * *u as i32 - *m as i32 * *w as i32).rem_euclid(3)) as u8
        }
        (LocalCubeClass::Wild(a), LocalCubeClass::Wild(b)) => {
            let mut s = 0u32;
            for i in 0..4 {
                for j in 0..4 {
                    s += a[i] as u32 * b[j] as u32 * WILD_TABLE[i][j] as u32;
                }
            }
            (s % 3) as u8
        }
        _ => panic!("mixing cube classes of different regimes"),
    }
}

/// e with a^((p−1)/3) ≡ ζ^e (mod p), where ζ ↦ r.
pub fn cubic_character_fp(a: &BigInt, p: &BigInt, r: &BigInt) -> Result<u8> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Err(Error::NotUnit);
    }
    let x = a.modpow(&((p - 1u32) / 3u32), p);
    if x.is_one() {
        return Ok(0);
    }
    if x == r.mod_floor(p) {
        return Ok(1);
    }
    if x == (r * r).mod_floor(p) {
        return Ok(2);
    }
    Err(Error::Precondition("ζ residue is not a primitive cube root of unity".into()))
}

type Fp2 = (BigInt, BigInt);

fn fp2_mul(x: &Fp2, y: &Fp2, p: &BigInt) -> Fp2 {
    let (a, b) = x;
    let (c, d) = y;
    let bd = b * d;
    ((a * c - &bd).mod_floor(p), (a * d + b * c - &bd).mod_floor(p))
}

fn fp2_pow(x: &Fp2, e: &BigInt, p: &BigInt) -> Fp2 {
    let mut r: Fp2 = (BigInt::one(), BigInt::zero());
    let mut b = x.clone();
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            r = fp2_mul(&r, &b, p);
        }
        b = fp2_mul(&b, &b, p);
    }
    r
}

/// Character on F_p[ζ]/(ζ² + ζ + 1) = F_{p²}, p ≡ 2 (mod 3): u^((p²−1)/3) = ζ^e.
pub fn cubic_character_fp2(u: &Fp2, p: &BigInt) -> Result<u8> {
    if u.0.mod_floor(p).is_zero() && u.1.mod_floor(p).is_zero() {
        return Err(Error::NotUnit);
    }
    let e = (p * p - 1u32) / 3u32;
    let x = fp2_pow(u, &e, p);
    let one = (BigInt::one(), BigInt::zero());
    let zeta = (BigInt::zero(), BigInt::one());
    let zeta2 = ((p - 1u32).mod_floor(p), (p - 1u32).mod_floor(p));
    if x == one {
        Ok(0)
    } else if x == zeta {
        Ok(1)
    } else if x == zeta2 {
        Ok(2)
    } else {
        Err(Error::Precondition("character value outside μ₃".into()))
    }
}

/// Generic cubic character in the residue field of size q with ζ ↦ r (q = p).
pub fn cubic_character(a: &BigInt, q: &BigInt, zeta_residue: &BigInt) -> Result<u8> {
    cubic_character_fp(a, q, zeta_residue)
}

fn eis_mul9(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    let (a, b) = x;
    let (c, d) = y;
    ((a * c - b * d).rem_euclid(9), (a * d + b * c - b * d).rem_euclid(9))
}

/// Units of Z[ζ₃]/9 mapped to their (η₁, η₂, η₃) exponents.
fn unit_table() -> &'static HashMap<(i64, i64), [u8; 3]> {
    static TABLE: OnceLock<HashMap<(i64, i64), [u8; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // η₁ = ζ, η₂ = 1 − λ² = 1 − (1 − ζ)² = 3ζ + 1 − ... computed exactly:
        // λ = 1 − ζ, λ² = 1 − 2ζ + ζ² = −3ζ, λ³ = −3ζ + 3ζ² = −3 − 6ζ.
        let eta = [(0i64, 1i64), (1, 3), (4, 6)];
        let units: Vec<(i64, i64)> = (0..9)
            .flat_map(|a| (0..9).map(move |b| (a, b)))
            .filter(|&(a, b)| (a * a - a * b + b * b) % 3 != 0)
            .collect();
        let cubes: Vec<(i64, i64)> = {
            let mut c: Vec<(i64, i64)> = units.iter().map(|&u| eis_mul9(eis_mul9(u, u), u)).collect();
            c.sort();
            c.dedup();
            c
        };
        let mut t = HashMap::new();
        for e1 in 0..3u8 {
            for e2 in 0..3u8 {
                for e3 in 0..3u8 {
                    let mut g = (1i64, 0i64);
                    for _ in 0..e1 {
                        g = eis_mul9(g, eta[0]);
                    }
                    for _ in 0..e2 {
                        g = eis_mul9(g, eta[1]);
                    }
                    for _ in 0..e3 {
                        g = eis_mul9(g, eta[2]);
                    }
                    for c in &cubes {
                        let prev = t.insert(eis_mul9(g, *c), [e1, e2, e3]);
                        assert!(prev.is_none() || prev == Some([e1, e2, e3]));
                    }
                }
            }
        }
        assert_eq!(t.len(), units.len());
        t
    })
}

/// Class of 3^v·(a + bζ) at p = 3 with (a, b) known mod 27 and not both ≡ 0 mod 3.
fn wild_class(v: i64, a: &BigInt, b: &BigInt) -> [u8; 4] {
    let n = a * a - a * b + b * b;
    let (r, ua, ub) = if (n % 3u32).is_zero() {
        // 1/λ = (2 + ζ)/3 and (a + bζ)(2 + ζ) = (2a − b) + (a + b)ζ
        (1, (a * 2 - b) / 3, (a + b) / 3)
    } else {
        (0, a.clone(), b.clone())
    };
    let key = (
        ua.mod_floor(&BigInt::from(9)).to_i64().unwrap(),
        ub.mod_floor(&BigInt::from(9)).to_i64().unwrap(),
    );
    let e = unit_table()[&key];
    // 3 = −λ²ζ², so 3^v = (−1)^v λ^{2v} η₁^{2v}.
    let lam = (2 * v + r).rem_euclid(3) as u8;
    let e1 = ((e[0] as i64 + 2 * v).rem_euclid(3)) as u8;
    [lam, e1, e[1], e[2]]
}

/// Whether (a, b)_v vanishes at the places above p, for rationals a and b.
pub fn rational_symbol_vanishes(p: &BigInt, a: &BigInt, b: &BigInt) -> bool {
    let field = match LocalField::default_for(p) {
        Ok(f) => f,
        Err(_) => return false,
    };
    let x = field.from_rational(&BigRational::from_integer(a.clone()));
    let y = field.from_rational(&BigRational::from_integer(b.clone()));
    matches!(field.hilbert_symbol(&x, &y), Ok(0))
}

/// Symbol of two elements of Q(ζ₃) given by coordinates (a₀ + a₁ζ, b₀ + b₁ζ).
pub fn eisenstein_symbol(field: &LocalField, x: &(BigRational, BigRational), y: &(BigRational, BigRational)) -> Result<u8> {
    let xe = field.from_eisenstein(&x.0, &x.1);
    let ye = field.from_eisenstein(&y.0, &y.1);
    field.hilbert_symbol(&xe, &ye)
}

/// v_p of a nonzero rational (convenience for callers that mix exact values in).
pub fn rat_val(q: &BigRational, p: &BigInt) -> i64 {
    valuation(q.numer(), p) as i64 - valuation(q.denom(), p) as i64
}

/// Unit part of an integer modulo p^k.
pub fn unit_mod(n: &BigInt, p: &BigInt, k: u32) -> BigInt {
    let v = valuation(n, p);
    let m = p.pow(k);
    (n / p.pow(v)).mod_floor(&m)
}

pub fn inverse_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    mod_inv(a, m)
}
