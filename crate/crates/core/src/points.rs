//! Points of E(Q_p): refinement of approximate coordinates and a bounded
//! search for a point with a prescribed image under the S-descent map.

use crate::embed::{ExtClass, LocalEmbedding};
use crate::error::{Error, Result};
use crate::lift::{Curve, LinearForm, TowerPoint};
use crate::local::LocalCubeClass;
use crate::padic::{padic_roots, PadicNumber};
use crate::tower::TowerElement;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub const POINT_PREC: u32 = 24;

/// An affine point of E(Q_p). Points with rational coordinates keep them, so
/// that linear forms can be evaluated exactly in the tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalPoint {
    pub x: PadicNumber,
    pub y: PadicNumber,
    pub exact: Option<(BigRational, BigRational)>,
}

impl LocalPoint {
    pub fn rational(curve: &Curve, p: &BigInt, x: &BigRational, y: &BigRational) -> Result<Self> {
        let n = BigInt::one();
        let pt = TowerPoint { x: TowerElement::rational(&n, x.clone()), y: TowerElement::rational(&n, y.clone()) };
        if !curve.contains(&pt) {
            return Err(Error::Precondition(format!("({x}, {y}) is not on the curve")));
        }
        Ok(LocalPoint {
            x: PadicNumber::from_rational(x, p, POINT_PREC),
            y: PadicNumber::from_rational(y, p, POINT_PREC),
            exact: Some((x.clone(), y.clone())),
        })
    }
}


/// y-roots of the Weierstrass equation over the fibre x = x₀.
fn y_roots(curve: &Curve, x0: &BigRational, p: &BigInt, prec: u32) -> Vec<PadicNumber> {
    let lin = &curve.a1 * x0 + curve.a3.clone();
    let f = x0 * x0 * x0 + &curve.a2 * x0 * x0 + &curve.a4 * x0 + curve.a6.clone();
    padic_roots(&[-f, lin, BigRational::one()], p, prec)
}

/// x-roots of the Weierstrass equation over the fibre y = y₀.
fn x_roots(curve: &Curve, y0: &BigRational, p: &BigInt, prec: u32) -> Vec<PadicNumber> {
    // x³ + a₂x² + (a₄ − a₁y)x + (a₆ − y² − a₃y) = 0
    let c1 = curve.a4.clone() - &curve.a1 * y0;
    let c0 = curve.a6.clone() - y0 * y0 - &curve.a3 * y0;
    padic_roots(&[c0, c1, curve.a2.clone(), BigRational::one()], p, prec)
}

fn agrees(a: &PadicNumber, b: &PadicNumber) -> bool {
    let k = a.abs_prec().min(b.abs_prec());
    let d = a.sub(b);
    d.is_zero() || d.valuation().map_or(true, |v| v >= k)
}

/// Completes an approximate point: x is taken as given (its rational
/// representative) and y is the root of the fibre agreeing with `y_approx`.
pub fn refine_point(curve: &Curve, p: &BigInt, x: &PadicNumber, y_approx: &PadicNumber) -> Result<LocalPoint> {
    let xr = x.to_rational();
    let yr = y_approx.to_rational();
    if let Ok(pt) = LocalPoint::rational(curve, p, &xr, &yr) {
        return Ok(pt);
    }
    let roots = y_roots(curve, &xr, p, POINT_PREC);
    let y = roots.into_iter().find(|r| agrees(r, y_approx)).ok_or_else(|| Error::Precondition(format!("no point of E(Q_{p}) near the given coordinates")))?;
    Ok(LocalPoint { x: PadicNumber::from_rational(&xr, p, POINT_PREC), y, exact: None })
}

/// Class of ℓ(P) for a linear form with tower coefficients.
pub fn form_class(emb: &LocalEmbedding, form: &LinearForm, pt: &LocalPoint) -> Result<ExtClass> {
    let f = &emb.field;
    let in_base = form.lambda.to_l1().is_some() && form.nu.to_l1().is_some();
    if in_base {
        let v = if let Some((x, y)) = &pt.exact {
            let n = &form.lambda.n;
            emb.embed_l1(&form.eval(&TowerElement::rational(n, x.clone()), &TowerElement::rational(n, y.clone())))?
        } else {
            let (lam, nu) = (emb.embed_l1(&form.lambda)?, emb.embed_l1(&form.nu)?);
            let x = f.from_padic(pt.x.clone());
            let y = f.from_padic(pt.y.clone());
            f.sub(&f.sub(&y, &f.mul(&lam, &x)), &nu)
        };
        if f.is_zero(&v) {
            return Err(Error::Precondition("point lies on the tangent line".into()));
        }
        return Ok(ExtClass::Base(f.cube_class(&v)?));
    }
    if let Some((x, y)) = &pt.exact {
        let n = &form.lambda.n;
        let v = form.eval(&TowerElement::rational(n, x.clone()), &TowerElement::rational(n, y.clone()));
        if v.is_zero() {
            return Err(Error::Precondition("point lies on the tangent line".into()));
        }
        return emb.class_of_element(&v);
    }
    let lam = emb.coefficients(&form.lambda);
    let nu = emb.coefficients(&form.nu);
    let x = f.from_padic(pt.x.clone());
    let y = f.from_padic(pt.y.clone());
    let mut c = [0usize, 1, 2].map(|i| f.neg(&f.add(&f.mul(&lam[i], &x), &nu[i])));
    c[0] = f.add(&c[0], &y);
    emb.class_of(&c)
}

/// Search budget for [`find_local_point`].
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_unit: u64,
    pub max_shift: i64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_unit: 40, max_shift: 6 }
    }
}

/// Candidate coordinates ordered by p-adic size: 0, then ±u·p^v for units
/// u ≤ max_unit and |v| ≤ max_shift.
fn candidates(p: &BigInt, budget: SearchBudget) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    for shift in 0..=budget.max_shift {
        let shifts: &[i64] = if shift == 0 { &[0] } else { &[shift, -shift] };
        for &v in shifts {
            let pv = if v >= 0 {
                BigRational::from_integer(p.pow(v as u32))
            } else {
                BigRational::new(BigInt::one(), p.pow((-v) as u32))
            };
            for u in 1..=budget.max_unit {
                let ub = BigInt::from(u);
                if (&ub % p).is_zero() {
                    continue;
                }
                for sign in [1i64, -1] {
                    out.push(BigRational::from_integer(&ub * sign) * &pv);
                }
            }
        }
    }
    out
}

/// A point P ∈ E(Q_p) with ℓ_S(P) in the given class of K_v^×/(K_v^×)³.
/// Both fibres x = c and y = c are tried for each candidate c.
pub fn find_local_point(curve: &Curve, tan_s: &LinearForm, emb: &LocalEmbedding, target: &LocalCubeClass, budget: SearchBudget) -> Result<LocalPoint> {
    local_points(curve, tan_s, emb, target, budget, 1)?.pop().ok_or_else(|| Error::SearchExhausted(emb.field.p.clone()))
}

/// Up to `limit` points with the required image, in search order.
pub fn local_points(curve: &Curve, tan_s: &LinearForm, emb: &LocalEmbedding, target: &LocalCubeClass, budget: SearchBudget, limit: usize) -> Result<Vec<LocalPoint>> {
    let p = &emb.field.p;
    if p.to_u64().map_or(true, |v| v > 100_000) {
        return Err(Error::SearchExhausted(p.clone()));
    }
    let hit = |pt: &LocalPoint| matches!(form_class(emb, tan_s, pt), Ok(ExtClass::Base(c)) if c == *target);
    let mut out = Vec::new();
    for c in candidates(p, budget) {
        let cp = PadicNumber::from_rational(&c, p, POINT_PREC);
        let on_x = y_roots(curve, &c, p, POINT_PREC).into_iter().map(|y| LocalPoint { x: cp.clone(), y, exact: None });
        let on_y = x_roots(curve, &c, p, POINT_PREC).into_iter().map(|x| LocalPoint { x, y: cp.clone(), exact: None });
        for pt in on_x.chain(on_y) {
            if hit(&pt) {
                out.push(pt);
                if out.len() >= limit {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}
