//! Binary cubic forms of negative discriminant and the small-value search
//! through the reduced associated quadratic.
//!
//! Real quantities (the real root of f and the quadratic cofactor) are held as
//! fixed-point integers `value · 2^prec`. They are only used to steer the
//! reduction; every returned value is re-checked in exact integer arithmetic.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCubicForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// [[α, β], [γ, δ]] acting by (X, Y) ↦ (αX + βY, γX + δY).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMatrix {
    pub alpha: BigInt,
    pub beta: BigInt,
    pub gamma: BigInt,
    pub delta: BigInt,
}

/// A X² + B XY + C Y² with fixed-point coefficients scaled by 2^prec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryQuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub prec: u32,
}

impl BinaryCubicForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        BinaryCubicForm { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let x2 = x * x;
        let y2 = y * y;
        &self.a * &x2 * x + &self.b * &x2 * y + &self.c * x * &y2 + &self.d * &y2 * y
    }

    /// f(αX + βY, γX + δY).
    pub fn transform(&self, t: &UnimodularMatrix) -> BinaryCubicForm {
        // Coefficient vectors in (X³, X²Y, XY², Y³) of products of linear forms.
        let lx = [t.alpha.clone(), t.beta.clone()];
        let ly = [t.gamma.clone(), t.delta.clone()];
        let mul = |p: &[BigInt], q: &[BigInt; 2]| {
            let mut r = vec![BigInt::zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                r[i] += c * &q[0];
                r[i + 1] += c * &q[1];
            }
            r
        };
        let one = [BigInt::one()];
        let terms = [
            (&self.a, mul(&mul(&mul(&one, &lx), &lx), &lx)),
            (&self.b, mul(&mul(&mul(&one, &lx), &lx), &ly)),
            (&self.c, mul(&mul(&mul(&one, &lx), &ly), &ly)),
            (&self.d, mul(&mul(&mul(&one, &ly), &ly), &ly)),
        ];
        let mut out = vec![BigInt::zero(); 4];
        for (coef, poly) in terms.iter() {
            for i in 0..4 {
                out[i] += *coef * &poly[i];
            }
        }
        let [a, b, c, d]: [BigInt; 4] = out.try_into().unwrap();
        BinaryCubicForm { a, b, c, d }
    }

    pub fn max_bits(&self) -> u64 {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| x.bits()).max().unwrap_or(0)
    }
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

impl UnimodularMatrix {
    pub fn identity() -> Self {
        UnimodularMatrix {
            alpha: BigInt::one(),
            beta: BigInt::zero(),
            gamma: BigInt::zero(),
            delta: BigInt::one(),
        }
    }

    pub fn det(&self) -> BigInt {
        &self.alpha * &self.delta - &self.beta * &self.gamma
    }

    /// self · other
    pub fn compose(&self, o: &UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            alpha: &self.alpha * &o.alpha + &self.beta * &o.gamma,
            beta: &self.alpha * &o.beta + &self.beta * &o.delta,
            gamma: &self.gamma * &o.alpha + &self.delta * &o.gamma,
            delta: &self.gamma * &o.beta + &self.delta * &o.delta,
        }
    }

    pub fn apply(&self, u: &BigInt, v: &BigInt) -> (BigInt, BigInt) {
        (&self.alpha * u + &self.beta * v, &self.gamma * u + &self.delta * v)
    }
}

impl BinaryQuadraticForm {
    /// Exact integer coefficients embedded at the given precision.
    pub fn from_integers(a: i64, b: i64, c: i64, prec: u32) -> Self {
        BinaryQuadraticForm {
            a: BigInt::from(a) << prec,
            b: BigInt::from(b) << prec,
            c: BigInt::from(c) << prec,
            prec,
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a.is_positive() && &self.b * &self.b < BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c
    }

    pub fn to_f64(&self) -> (f64, f64, f64) {
        let s = 2f64.powi(self.prec as i32);
        let f = |x: &BigInt| x.to_string().parse::<f64>().unwrap() / s;
        (f(&self.a), f(&self.b), f(&self.c))
    }
}

pub fn discriminant(f: &BinaryCubicForm) -> BigInt {
    let (a, b, c, d) = (&f.a, &f.b, &f.c, &f.d);
    b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d
}

fn sign_at(f: &BinaryCubicForm, m: &BigInt, prec: u32) -> i32 {
    let s = BigInt::one() << prec;
    let v = &f.a * m * m * m + &f.b * m * m * &s + &f.c * m * &s * &s + &f.d * &s * &s * &s;
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// The unique real root of f(X, 1) as floor(θ·2^prec); requires a ≠ 0 and Δ < 0.
fn real_root_fixed(f: &BinaryCubicForm, prec: u32) -> BigInt {
    let bound: BigInt = [&f.b, &f.c, &f.d]
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap()
        .div_ceil(&f.a.abs())
        + 1;
    let mut lo = -(&bound << prec);
    let mut hi = &bound << prec;
    let slo = sign_at(f, &lo, prec);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        let s = sign_at(f, &mid, prec);
        if s == 0 {
            return mid;
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// X² − tr(β)XY + |β|²Y² for the complex root pair β, β̄ of f(X, 1).
pub fn associated_quadratic(f: &BinaryCubicForm, prec: u32) -> Result<BinaryQuadraticForm> {
    if !discriminant(f).is_negative() {
        return Err(Error::Precondition("associated_quadratic needs Δ(f) < 0".into()));
    }
    if f.a.is_zero() {
        return Err(Error::Precondition("leading coefficient must be nonzero".into()));
    }
    let theta = real_root_fixed(f, prec);
    // f(X,1) = a(X − θ)(X² + sX + t).
    let s = (&f.b << prec).div_floor(&f.a) + &theta;
    let t = (&f.c << prec).div_floor(&f.a) + ((&theta * &s) >> prec);
    let q = BinaryQuadraticForm { a: BigInt::one() << prec, b: s, c: t, prec };
    if !q.is_positive_definite() {
        return Err(Error::PrecisionExhausted);
    }
    Ok(q)
}

/// Gauss reduction; returns the reduced form and t with q∘t = reduced.
pub fn reduce_quadratic(q: &BinaryQuadraticForm) -> Result<(BinaryQuadraticForm, UnimodularMatrix)> {
    if !q.is_positive_definite() {
        return Err(Error::Precondition("reduce_quadratic needs a positive definite form".into()));
    }
    let (mut a, mut b, mut c) = (q.a.clone(), q.b.clone(), q.c.clone());
    let mut t = UnimodularMatrix::identity();
    for _ in 0..100_000 {
        // k = round(−B / 2A)
        let two_a: BigInt = 2 * &a;
        let k = (-&b + &a).div_floor(&two_a);
        if !k.is_zero() {
            c = &a * &k * &k + &b * &k + &c;
            b = &b + 2 * &k * &a;
            t = t.compose(&UnimodularMatrix {
                alpha: BigInt::one(),
                beta: k,
                gamma: BigInt::zero(),
                delta: BigInt::one(),
            });
        }
        if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            t = t.compose(&UnimodularMatrix {
                alpha: BigInt::zero(),
                beta: -BigInt::one(),
                gamma: BigInt::one(),
                delta: BigInt::zero(),
            });
        } else {
            let r = BinaryQuadraticForm { a, b, c, prec: q.prec };
            if !r.is_positive_definite() {
                return Err(Error::PrecisionExhausted);
            }
            return Ok((r, t));
        }
    }
    Err(Error::PrecisionExhausted)
}

const CANDIDATES: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (1, -2)];

/// True when 23·f(u,v)⁴ ≤ |Δ(f)| and f(u,v) ≠ 0, checked exactly.
pub fn satisfies_davenport_bound(f: &BinaryCubicForm, u: &BigInt, v: &BigInt) -> bool {
    let val = f.eval(u, v);
    !val.is_zero() && BigInt::from(23) * val.pow(4) <= discriminant(f).abs()
}

/// A pair (u, v) with 0 < |f(u,v)| ≤ |Δ(f)/23|^{1/4}.
pub fn davenport_search(f: &BinaryCubicForm) -> Result<(BigInt, BigInt)> {
    davenport_search_with(f, None)
}

pub fn davenport_search_with(f: &BinaryCubicForm, prec: Option<u32>) -> Result<(BigInt, BigInt)> {
    if !discriminant(f).is_negative() {
        return Err(Error::Precondition("davenport_search needs Δ(f) < 0".into()));
    }
    // Move a nonzero value into the X³ slot when the leading coefficient vanishes.
    let mut pre = UnimodularMatrix::identity();
    let mut g = f.clone();
    if g.a.is_zero() {
        let k = (1..4)
            .find(|&k| !f.eval(&BigInt::one(), &BigInt::from(k)).is_zero())
            .unwrap_or(1);
        pre = UnimodularMatrix {
            alpha: BigInt::one(),
            beta: BigInt::zero(),
            gamma: BigInt::from(k),
            delta: BigInt::one(),
        };
        g = f.transform(&pre);
    }
    let base = prec.unwrap_or(2 * g.max_bits() as u32 + 64);
    let mut p = base;
    for _ in 0..3 {
        let found = match attempt(&g, p) {
            Err(Error::RationalRootFound { u, v }) => {
                let (u, v) = pre.apply(&u, &v);
                return Err(Error::RationalRootFound { u, v });
            }
            other => other?,
        };
        if let Some(res) = found {
            let (u, v) = pre.apply(&res.0, &res.1);
            if satisfies_davenport_bound(f, &u, &v) {
                return Ok((u, v));
            }
        }
        p *= 2;
    }
    Err(Error::PrecisionExhausted)
}

fn attempt(g: &BinaryCubicForm, prec: u32) -> Result<Option<(BigInt, BigInt)>> {
    let q = match associated_quadratic(g, prec) {
        Ok(q) => q,
        Err(Error::PrecisionExhausted) => return Ok(None),
        Err(e) => return Err(e),
    };
    let t = match reduce_quadratic(&q) {
        Ok((_, t)) => t,
        Err(Error::PrecisionExhausted) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut best: Option<(BigInt, BigInt, BigInt)> = None;
    for (u, v) in CANDIDATES {
        let (x, y) = t.apply(&BigInt::from(u), &BigInt::from(v));
        let val = g.eval(&x, &y);
        if val.is_zero() {
            return Err(Error::RationalRootFound { u: x, v: y });
        }
        if best.as_ref().map_or(true, |(bv, _, _)| val.abs() < bv.abs()) {
            best = Some((val, x, y));
        }
    }
    let (_, x, y) = best.unwrap();
    Ok(satisfies_davenport_bound(g, &x, &y).then_some((x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&BinaryCubicForm::new(1, 1, 2, 1)), bi(-23));
        assert_eq!(discriminant(&BinaryCubicForm::new(1, 0, 0, 1)), bi(-27));
        let (a, b1, c) = (bi(5316), bi(3965), bi(2521));
        let f = BinaryCubicForm {
            a: (&c * &c * &c - &a) / &b1,
            b: 3 * &c * &c,
            c: 3 * &c * &b1,
            d: &b1 * &b1,
        };
        assert_eq!(discriminant(&f), bi(-27) * &a * &a * &b1 * &b1);
    }

    #[test]
    fn quadratic_of_x3_minus_2() {
        let q = associated_quadratic(&BinaryCubicForm::new(1, 0, 0, -2), 80).unwrap();
        let (a, b, c) = q.to_f64();
        let r = 2f64.cbrt();
        assert!((a - 1.0).abs() < 1e-12 && (b - r).abs() < 1e-12 && (c - r * r).abs() < 1e-12);
    }

    #[test]
    fn positive_discriminant_is_a_contract_error() {
        // (X − Y)(X − 2Y)(X + Y) has three real roots.
        let f = BinaryCubicForm::new(1, -2, -1, 2);
        assert!(matches!(associated_quadratic(&f, 64), Err(Error::Precondition(_))));
    }

    #[test]
    fn reduction_examples() {
        let q = BinaryQuadraticForm::from_integers(1, 1, 1, 32);
        let (r, t) = reduce_quadratic(&q).unwrap();
        assert_eq!(r, q);
        assert_eq!(t, UnimodularMatrix::identity());
        let q = BinaryQuadraticForm::from_integers(1, 3, 3, 32);
        let (r, t) = reduce_quadratic(&q).unwrap();
        assert_eq!(r, BinaryQuadraticForm::from_integers(1, 1, 1, 32));
        assert_eq!(t.beta, bi(-1));
    }

    #[test]
    fn equality_case_of_the_bound() {
        let f = BinaryCubicForm::new(1, 1, 2, 1);
        let (u, v) = davenport_search(&f).unwrap();
        assert_eq!(f.eval(&u, &v).abs(), bi(1));
    }

    #[test]
    fn paper_row_one_is_reproduced() {
        let (a, b1, c) = (bi(5316), bi(3965), bi(2521));
        let f = BinaryCubicForm {
            a: (&c * &c * &c - &a) / &b1,
            b: 3 * &c * &c,
            c: 3 * &c * &b1,
            d: &b1 * &b1,
        };
        let (u, v) = davenport_search(&f).unwrap();
        let val = f.eval(&u, &v);
        let (u, v) = if val.is_negative() { (-u, -v) } else { (u, v) };
        assert_eq!((u.clone(), v.clone()), (bi(-11), bi(7)));
        assert_eq!(3 * f.eval(&u, &v), bi(5364));
    }

    #[test]
    fn zero_leading_coefficient() {
        // X²Y + XY² + Y³ vanishes at (1, 0).
        let f = BinaryCubicForm::new(0, 1, 1, 1);
        assert!(discriminant(&f).is_negative());
        match davenport_search(&f) {
            Err(Error::RationalRootFound { u, v }) => {
                assert!(f.eval(&u, &v).is_zero());
                assert!(!u.is_zero() || !v.is_zero());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn arb_matrix() -> impl Strategy<Value = UnimodularMatrix> {
        proptest::collection::vec((-3i64..=3, any::<bool>()), 1..5).prop_map(|steps| {
            let mut t = UnimodularMatrix::identity();
            for (k, swap) in steps {
                let m = if swap {
                    UnimodularMatrix { alpha: bi(0), beta: bi(-1), gamma: bi(1), delta: bi(0) }
                } else {
                    UnimodularMatrix { alpha: bi(1), beta: bi(k), gamma: bi(0), delta: bi(1) }
                };
                t = t.compose(&m);
            }
            t
        })
    }

    proptest! {
        #[test]
        fn discriminant_is_sl2_invariant(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20, t in arb_matrix()) {
            let f = BinaryCubicForm::new(a, b, c, d);
            prop_assert_eq!(t.det(), bi(1));
            prop_assert_eq!(discriminant(&f.transform(&t)), discriminant(&f));
        }

        #[test]
        fn reduction_is_reduced(a in 1i64..500, b in -2000i64..2000, c in 1i64..5000) {
            prop_assume!(b * b < 4 * a * c);
            let q = BinaryQuadraticForm::from_integers(a, b, c, 40);
            let (r, t) = reduce_quadratic(&q).unwrap();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(t.det(), bi(1));
        }

        #[test]
        fn search_meets_the_bound(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20) {
            let f = BinaryCubicForm::new(a, b, c, d);
            prop_assume!(discriminant(&f).is_negative());
            match davenport_search(&f) {
                Ok((u, v)) => prop_assert!(satisfies_davenport_bound(&f, &u, &v)),
                Err(Error::RationalRootFound { u, v }) => prop_assert!(f.eval(&u, &v).is_zero()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
