//! Bounded-precision p-adic numbers and root finding over Z_p.

use crate::arith::{mod_inv, valuation};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// p^val · unit with the unit known modulo p^prec. A value whose unit is zero
/// is zero to absolute precision `val`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    pub p: BigInt,
    pub val: i64,
    pub unit: BigInt,
    pub prec: u32,
}

impl PadicNumber {
    pub fn zero(p: &BigInt, abs_prec: i64) -> Self {
        PadicNumber { p: p.clone(), val: abs_prec, unit: BigInt::zero(), prec: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    fn modulus(&self) -> BigInt {
        self.p.pow(self.prec)
    }

    /// Normalizes p^val·u where u is known mod p^prec.
    pub fn new(p: &BigInt, val: i64, u: BigInt, prec: u32) -> Self {
        let m = p.pow(prec);
        let mut u = u.mod_floor(&m);
        if u.is_zero() {
            return PadicNumber::zero(p, val + prec as i64);
        }
        let k = valuation(&u, p);
        u /= p.pow(k);
        PadicNumber { p: p.clone(), val: val + k as i64, unit: u, prec: prec - k }
    }

    pub fn from_int(n: &BigInt, p: &BigInt, prec: u32) -> Self {
        if n.is_zero() {
            return PadicNumber::zero(p, i64::MAX / 4);
        }
        let v = valuation(n, p);
        let u = n / p.pow(v);
        PadicNumber::new(p, v as i64, u, prec)
    }

    pub fn from_rational(q: &BigRational, p: &BigInt, prec: u32) -> Self {
        if q.is_zero() {
            return PadicNumber::zero(p, i64::MAX / 4);
        }
        let vn = valuation(q.numer(), p);
        let vd = valuation(q.denom(), p);
        let n = q.numer() / p.pow(vn);
        let d = q.denom() / p.pow(vd);
        let m = p.pow(prec);
        let u = n * mod_inv(&d, &m).unwrap();
        PadicNumber::new(p, vn as i64 - vd as i64, u, prec)
    }

    /// Absolute precision: the value is known modulo p^abs_prec.
    pub fn abs_prec(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val + self.prec as i64
        }
    }

    /// Valuation, or `None` for an inexact zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        PadicNumber::new(&self.p, self.val, -&self.unit, self.prec)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            let a = match (self.valuation(), o.valuation()) {
                (Some(v), None) => v + o.val,
                (None, Some(v)) => v + self.val,
                _ => self.val + o.val,
            };
            return PadicNumber::zero(&self.p, a);
        }
        let prec = self.prec.min(o.prec);
        PadicNumber::new(&self.p, self.val + o.val, &self.unit * &o.unit, prec)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.modulus();
        Ok(PadicNumber { p: self.p.clone(), val: -self.val, unit: mod_inv(&self.unit, &m).unwrap(), prec: self.prec })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn add(&self, o: &Self) -> Self {
        let abs = self.abs_prec().min(o.abs_prec());
        if self.is_zero() {
            return o.with_abs_prec(abs);
        }
        if o.is_zero() {
            return self.with_abs_prec(abs);
        }
        let v = self.val.min(o.val);
        if abs <= v {
            return PadicNumber::zero(&self.p, abs);
        }
        let rel = (abs - v) as u32;
        let lift = |x: &PadicNumber| &x.unit * x.p.pow((x.val - v) as u32);
        PadicNumber::new(&self.p, v, lift(self) + lift(o), rel)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn with_abs_prec(&self, abs: i64) -> Self {
        if self.is_zero() {
            return PadicNumber::zero(&self.p, abs.min(self.val));
        }
        if abs <= self.val {
            return PadicNumber::zero(&self.p, abs);
        }
        let rel = ((abs - self.val) as u32).min(self.prec);
        PadicNumber::new(&self.p, self.val, self.unit.clone(), rel)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = PadicNumber::new(&self.p, 0, BigInt::one(), self.prec.max(1));
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Residue of the unit part modulo p.
    pub fn unit_residue(&self) -> BigInt {
        self.unit.mod_floor(&self.p)
    }

    /// The value as an integer mod p^k, when it is integral and known that far.
    pub fn to_integer_mod(&self, k: u32) -> Option<BigInt> {
        let m = self.p.pow(k);
        if self.is_zero() {
            return (self.val >= k as i64).then(BigInt::zero);
        }
        if self.val < 0 || self.abs_prec() < k as i64 {
            return None;
        }
        Some((&self.unit * self.p.pow(self.val as u32)).mod_floor(&m))
    }

    /// Integer representative p^val·unit (for val ≥ 0) or the rational p^val·unit.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let u = BigRational::from_integer(self.unit.clone());
        if self.val >= 0 {
            u * BigRational::from_integer(self.p.pow(self.val as u32))
        } else {
            u / BigRational::from_integer(self.p.pow((-self.val) as u32))
        }
    }

    /// Base-p digits of the unit, lowest first (for display).
    pub fn digits(&self) -> Vec<BigInt> {
        let mut u = self.unit.clone();
        let mut out = Vec::new();
        for _ in 0..self.prec {
            let (q, r) = u.div_mod_floor(&self.p);
            out.push(r);
            u = q;
        }
        out
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(f, "padic({}, {}, {}, {})", self.p, self.val, self.unit, self.prec)
    }
}

fn eval_poly(poly: &[BigInt], x: &BigInt) -> BigInt {
    poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn derivative(poly: &[BigInt]) -> Vec<BigInt> {
    poly.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn vp(n: &BigInt, p: &BigInt, cap: u32) -> u32 {
    if n.is_zero() {
        cap
    } else {
        valuation(n, p).min(cap)
    }
}

/// Newton iteration from `x` to a root modulo p^prec, given v(f(x)) > 2·v(f′(x)).
fn newton(poly: &[BigInt], p: &BigInt, mut x: BigInt, prec: u32) -> Result<BigInt> {
    let d = derivative(poly);
    let vd = vp(&eval_poly(&d, &x), p, u32::MAX);
    if vd == u32::MAX {
        return Err(Error::NoLift);
    }
    let fx = eval_poly(poly, &x);
    if fx.is_zero() {
        return Ok(x);
    }
    if vp(&fx, p, u32::MAX) <= 2 * vd {
        return Err(Error::NoLift);
    }
    let target = prec + 2 * vd + 2;
    let m = p.pow(target);
    for _ in 0..200 {
        let fx = eval_poly(poly, &x).mod_floor(&m);
        if fx.is_zero() {
            break;
        }
        let dx = eval_poly(&d, &x);
        let pv = p.pow(vd);
        let num = fx / &pv;
        let den = dx / &pv;
        let inv = mod_inv(&den, &m).ok_or(Error::NoLift)?;
        x = (x - num * inv).mod_floor(&m);
    }
    Ok(x.mod_floor(&p.pow(prec)))
}

/// The root of `poly` (integer coefficients, lowest degree first) in the disc
/// of `seed`, to precision p^prec.
pub fn hensel_root(poly: &[BigInt], p: &BigInt, seed: &BigInt, prec: u32) -> Result<PadicNumber> {
    let r = newton(poly, p, seed.clone(), prec)?;
    Ok(PadicNumber::from_int(&r, p, prec).with_abs_prec(prec as i64))
}

/// All simple roots of `poly` in Z_p, to precision p^prec.
pub fn integral_roots(poly: &[BigInt], p: &BigInt, prec: u32) -> Vec<BigInt> {
    let d = derivative(poly);
    let mut out: Vec<BigInt> = Vec::new();
    let mut cands = vec![BigInt::zero()];
    let pu = p.to_string().parse::<u64>().unwrap_or(u64::MAX);
    let max_depth = prec + 16;
    for j in 0..max_depth {
        let pj = p.pow(j);
        let mut next = Vec::new();
        for r in &cands {
            for t in 0..pu.min(1 << 20) {
                let x = r + &pj * BigInt::from(t);
                let fx = eval_poly(poly, &x);
                let vf = vp(&fx, p, max_depth + 1);
                if vf < j + 1 {
                    continue;
                }
                let vd = vp(&eval_poly(&d, &x), p, max_depth + 1);
                if vd <= j && vf > 2 * vd {
                    if let Ok(root) = newton(poly, p, x.clone(), prec) {
                        if !out.contains(&root) {
                            out.push(root);
                        }
                    }
                } else {
                    next.push(x);
                }
            }
        }
        if next.is_empty() || next.len() > 4096 {
            break;
        }
        cands = next;
    }
    out.sort();
    out
}

/// Roots of a polynomial with rational coefficients in Q_p (any valuation).
pub fn padic_roots(poly: &[BigRational], p: &BigInt, prec: u32) -> Vec<PadicNumber> {
    let deg = poly.len() - 1;
    // Clear denominators, then substitute x = y/p^s to make the roots integral:
    // with leading coefficient a_n, y = a_n·x satisfies a monic integral polynomial.
    let l = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = poly.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let an = ints[deg].clone();
    if an.is_zero() {
        return Vec::new();
    }
    let s = valuation(&an, p);
    let scale = p.pow(s);
    // y = p^s·x: Σ c_i x^i = Σ c_i p^{−s i} y^i; multiply by p^{s(n−1)}.
    let mut monic_like = Vec::with_capacity(deg + 1);
    for (i, c) in ints.iter().enumerate() {
        let e = s as i64 * (deg as i64 - 1 - i as i64);
        let v = if e >= 0 {
            c * p.pow(e as u32)
        } else {
            // Only the leading term has e = −s; it is divisible by p^s.
            c / p.pow((-e) as u32)
        };
        monic_like.push(v);
    }
    let extra = s * deg as u32 + 4;
    integral_roots(&monic_like, p, prec + extra)
        .into_iter()
        .map(|y| {
            let r = BigRational::new(y, scale.clone());
            let x = PadicNumber::from_rational(&r, p, prec + extra);
            x.with_abs_prec(x.valuation().unwrap_or(0) + prec as i64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn paper_embeddings() {
        let r = hensel_root(&[bi(-181), bi(0), bi(0), bi(1)], &bi(2), &bi(1), 3).unwrap();
        assert_eq!(r.to_integer_mod(3), Some(bi(5)));
        let z = hensel_root(&[bi(1), bi(1), bi(1)], &bi(13), &bi(3), 2).unwrap();
        assert_eq!(z.digits(), vec![bi(3), bi(11)]);
        let one = hensel_root(&[bi(-1), bi(0), bi(1)], &bi(5), &bi(1), 6).unwrap();
        assert_eq!(one.to_integer_mod(6), Some(bi(1)));
    }

    #[test]
    fn no_lift_when_condition_fails() {
        assert_eq!(hensel_root(&[bi(-2), bi(0), bi(1)], &bi(7), &bi(1), 5), Err(Error::NoLift));
    }

    #[test]
    fn arithmetic_round_trips() {
        let p = bi(7);
        let a = PadicNumber::from_rational(&BigRational::new(bi(22), bi(49)), &p, 10);
        let b = PadicNumber::from_rational(&BigRational::new(bi(-3), bi(5)), &p, 10);
        let s = a.add(&b);
        let expect = PadicNumber::from_rational(&BigRational::new(bi(22 * 5 - 3 * 49), bi(245)), &p, 10);
        assert_eq!(s.to_integer_mod(0), expect.to_integer_mod(0));
        assert_eq!(s.val, expect.val);
        assert_eq!(s.unit.mod_floor(&p.pow(8)), expect.unit.mod_floor(&p.pow(8)));
        let q = a.div(&b).unwrap().mul(&b);
        assert_eq!(q.val, a.val);
        assert_eq!(q.unit, a.unit);
    }

    #[test]
    fn cancellation_loses_precision() {
        let p = bi(5);
        let a = PadicNumber::new(&p, 0, bi(1 + 25), 4);
        let b = PadicNumber::new(&p, 0, bi(1), 4);
        let d = a.sub(&b);
        assert_eq!(d.val, 2);
        assert_eq!(d.prec, 2);
    }

    #[test]
    fn rational_roots_of_any_valuation() {
        // 4x² − 1 over Q_3: roots ±1/2.
        let poly = vec![BigRational::from_integer(bi(-1)), BigRational::zero(), BigRational::from_integer(bi(4))];
        let roots = padic_roots(&poly, &bi(3), 8);
        assert_eq!(roots.len(), 2);
        // 9x² − 1 over Q_3: roots ±1/3.
        let poly = vec![BigRational::from_integer(bi(-1)), BigRational::zero(), BigRational::from_integer(bi(9))];
        let roots = padic_roots(&poly, &bi(3), 8);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.val == -1));
        // x² − 17 over Q_2 (17 ≡ 1 mod 8).
        let poly = vec![BigRational::from_integer(bi(-17)), BigRational::zero(), BigRational::one()];
        assert_eq!(padic_roots(&poly, &bi(2), 10).len(), 2);
    }
}
