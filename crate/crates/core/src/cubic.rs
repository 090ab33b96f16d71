//! Elements x + y·t + z·t² of Q[t]/(t³ − R) for an integer radicand R, and
//! the moves between norm equations and points on diagonal cubic surfaces.

use crate::arith::rational_cbrt;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureCubicSolution {
    pub radicand: BigInt,
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
}

/// A projective integer point on x₁³ + a·x₂³ + b·x₃³ + ab·x₄³ = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePoint {
    pub x: [BigInt; 4],
    pub a: BigInt,
    pub b: BigInt,
}

fn r(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

impl PureCubicSolution {
    pub fn new(radicand: BigInt, x: BigRational, y: BigRational, z: BigRational) -> Self {
        PureCubicSolution { radicand, x, y, z }
    }

    pub fn rational(radicand: &BigInt, q: BigRational) -> Self {
        Self::new(radicand.clone(), q, BigRational::zero(), BigRational::zero())
    }

    pub fn one(radicand: &BigInt) -> Self {
        Self::rational(radicand, BigRational::one())
    }

    /// The generator t itself.
    pub fn root(radicand: &BigInt) -> Self {
        Self::new(radicand.clone(), BigRational::zero(), BigRational::one(), BigRational::zero())
    }

    pub fn from_ints(radicand: i64, x: i64, y: i64, z: i64) -> Self {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        Self::new(BigInt::from(radicand), q(x), q(y), q(z))
    }

    pub fn coords(&self) -> [&BigRational; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.radicand, o.radicand);
        let n = r(&self.radicand);
        let (a0, a1, a2) = (&self.x, &self.y, &self.z);
        let (b0, b1, b2) = (&o.x, &o.y, &o.z);
        Self::new(
            self.radicand.clone(),
            a0 * b0 + &n * (a1 * b2 + a2 * b1),
            a0 * b1 + a1 * b0 + &n * a2 * b2,
            a0 * b2 + a1 * b1 + a2 * b0,
        )
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(self.radicand.clone(), &self.x * q, &self.y * q, &self.z * q)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    /// Adjugate: ξ·adj(ξ) = N(ξ).
    pub fn adjugate(&self) -> Self {
        let n = r(&self.radicand);
        let (x, y, z) = (&self.x, &self.y, &self.z);
        Self::new(
            self.radicand.clone(),
            x * x - &n * y * z,
            &n * z * z - x * y,
            y * y - x * z,
        )
    }

    pub fn inv(&self) -> Result<Self> {
        let nm = norm(self);
        if nm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.adjugate().scale(&nm.recip()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl fmt::Display for PureCubicSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})·∛{} + ({})·∛{}²", self.x, self.y, self.radicand, self.z, self.radicand)
    }
}

/// x³ + R·y³ + R²·z³ − 3R·xyz.
pub fn norm(xi: &PureCubicSolution) -> BigRational {
    let n = r(&xi.radicand);
    let (x, y, z) = (&xi.x, &xi.y, &xi.z);
    x * x * x + &n * y * y * y + &n * &n * z * z * z - BigRational::from_integer(3.into()) * &n * x * y * z
}

/// (α, β, γ, δ) with ξ = (α + β·t)/(γ + δ·t).
pub fn fractional_form(xi: &PureCubicSolution) -> (BigRational, BigRational, BigRational, BigRational) {
    let (a, b, c) = (&xi.x, &xi.y, &xi.z);
    if b.is_zero() && c.is_zero() {
        return (a.clone(), BigRational::zero(), BigRational::one(), BigRational::zero());
    }
    let n = r(&xi.radicand);
    (a * b - c * c * &n, b * b - a * c, b.clone(), -c.clone())
}

fn clear_denominators(v: [BigRational; 4]) -> [BigInt; 4] {
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * r(&l)).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let g = if g.is_zero() { BigInt::one() } else { g };
    let ints: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
    ints.try_into().unwrap()
}

/// The point (α, −γ, β, −δ) on V_{m,n}, where m = N(ξ) is an integer and n the radicand.
pub fn to_surface_point(xi: &PureCubicSolution) -> Result<SurfacePoint> {
    let m = norm(xi);
    if !m.is_integer() {
        return Err(Error::Precondition("to_surface_point needs an integral norm".into()));
    }
    let (al, be, ga, de) = fractional_form(xi);
    let x = clear_denominators([al, -ga, be, -de]);
    Ok(SurfacePoint { x, a: m.to_integer(), b: xi.radicand.clone() })
}

impl SurfacePoint {
    pub fn residual(&self) -> BigInt {
        let [x1, x2, x3, x4] = &self.x;
        x1.pow(3) + &self.a * x2.pow(3) + &self.b * x3.pow(3) + &self.a * &self.b * x4.pow(3)
    }
}

/// ξ′ = −(x₁ + x₂·∛a)/(x₃ + x₄·∛a), a solution of norm b in Q(∛a).
pub fn swap_solution(pt: &SurfacePoint) -> Result<PureCubicSolution> {
    let [x1, x2, x3, x4] = &pt.x;
    let num = PureCubicSolution::new(pt.a.clone(), r(&-x1), r(&-x2), BigRational::zero());
    let den = PureCubicSolution::new(pt.a.clone(), r(x3), r(x4), BigRational::zero());
    if norm(&den).is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    num.div(&den)
}

/// Swap for a solution whose norm is an arbitrary nonzero rational m/d:
/// given η ∈ Q(∛A) with N(η) = m/d, returns ξ ∈ Q(∛(m·d²)) with N(ξ) = A.
pub fn swap_general(eta: &PureCubicSolution) -> Result<PureCubicSolution> {
    let nq = norm(eta);
    if nq.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let d = nq.denom().clone();
    let big_r = nq.numer() * &d * &d;
    let (al, be, ga, de) = fractional_form(eta);
    let dq = r(&d);
    let num = PureCubicSolution::new(big_r.clone(), -al, ga / &dq, BigRational::zero());
    let den = PureCubicSolution::new(big_r, be, -de / &dq, BigRational::zero());
    if norm(&den).is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    num.div(&den)
}

pub fn scale_solution(xi: &PureCubicSolution, q: &BigRational) -> Result<PureCubicSolution> {
    if q.is_zero() {
        return Err(Error::Precondition("scale factor must be nonzero".into()));
    }
    Ok(xi.scale(q))
}

/// Same field element written over ∛n′ where n′ = n·q³ or n′ = n²·q³.
pub fn radicand_rebase(xi: &PureCubicSolution, target: &BigInt) -> Result<PureCubicSolution> {
    let n = &xi.radicand;
    let incompatible = || Error::IncompatibleRadicand { from: n.clone(), to: target.clone() };
    if n.is_zero() || target.is_zero() {
        return Err(incompatible());
    }
    if let Some(q) = rational_cbrt(&BigRational::new(target.clone(), n.clone())) {
        // t′ = q·t
        return Ok(PureCubicSolution::new(
            target.clone(),
            xi.x.clone(),
            &xi.y / &q,
            &xi.z / (&q * &q),
        ));
    }
    if let Some(q) = rational_cbrt(&BigRational::new(target.clone(), n * n)) {
        // t′ = q·t², so t² = t′/q and t = t′²/(q²·n).
        let nq = r(n);
        return Ok(PureCubicSolution::new(
            target.clone(),
            xi.x.clone(),
            &xi.z / &q,
            &xi.y / (&q * &q * nq),
        ));
    }
    Err(incompatible())
}

/// Whether the rational radicand is a cube (then Q(∛R) is not a field).
pub fn radicand_is_cube(n: &BigInt) -> bool {
    crate::arith::exact_cbrt(n).is_some() || (n.is_negative() && crate::arith::exact_cbrt(&-n).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&PureCubicSolution::one(&BigInt::from(5))), q(1));
        assert_eq!(norm(&PureCubicSolution::from_ints(2, 1, 1, 0)), q(3));
    }

    #[test]
    fn fractional_form_examples() {
        let xi = PureCubicSolution::from_ints(2, 7, 0, 0);
        assert_eq!(fractional_form(&xi), (q(7), q(0), q(1), q(0)));
        let t = PureCubicSolution::from_ints(2, 0, 1, 0);
        assert_eq!(fractional_form(&t), (q(0), q(1), q(1), q(0)));
    }

    #[test]
    fn surface_point_and_swap() {
        let xi = PureCubicSolution::from_ints(2, 1, 1, 0);
        let pt = to_surface_point(&xi).unwrap();
        assert_eq!(pt.residual(), BigInt::zero());
        assert_eq!(pt.x.to_vec(), vec![1, -1, 1, 0].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let sw = swap_solution(&pt).unwrap();
        assert_eq!(sw.radicand, BigInt::from(3));
        assert_eq!(norm(&sw), q(2));
        let one = to_surface_point(&PureCubicSolution::one(&BigInt::from(7))).unwrap();
        assert_eq!(one.x.to_vec(), vec![1, -1, 0, 0].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn scale_and_rebase() {
        let one = PureCubicSolution::one(&BigInt::from(5));
        assert_eq!(norm(&scale_solution(&one, &q(2)).unwrap()), q(8));
        let xi = PureCubicSolution::from_ints(2, 1, 1, 0);
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(norm(&scale_solution(&xi, &third).unwrap()), BigRational::new(1.into(), 9.into()));
        let t = PureCubicSolution::from_ints(2, 0, 1, 0);
        let t16 = radicand_rebase(&t, &BigInt::from(16)).unwrap();
        assert_eq!(t16.y, BigRational::new(1.into(), 2.into()));
        let t4 = radicand_rebase(&t, &BigInt::from(4)).unwrap();
        assert_eq!(t4.z, BigRational::new(1.into(), 2.into()));
        assert!(radicand_rebase(&t, &BigInt::from(3)).is_err());
    }

    fn arb(radicand: i64) -> impl Strategy<Value = PureCubicSolution> {
        (-9i64..10, -9i64..10, -9i64..10, 1i64..5).prop_map(move |(x, y, z, d)| {
            let f = |v: i64| BigRational::new(v.into(), d.into());
            PureCubicSolution::new(radicand.into(), f(x), f(y), f(z))
        })
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in arb(7), b in arb(7)) {
            prop_assert_eq!(norm(&a.mul(&b)), norm(&a) * norm(&b));
        }

        #[test]
        fn fractional_form_identity(xi in arb(10)) {
            prop_assume!(!xi.is_zero());
            let (al, be, ga, de) = fractional_form(&xi);
            let lhs = xi.mul(&PureCubicSolution::new(xi.radicand.clone(), ga, de, BigRational::zero()));
            prop_assert_eq!(lhs, PureCubicSolution::new(xi.radicand.clone(), al, be, BigRational::zero()));
        }

        #[test]
        fn swap_round_trip(xi in arb(5)) {
            let m = norm(&xi);
            prop_assume!(!m.is_zero() && rational_cbrt(&m).is_none());
            let back = swap_general(&xi).unwrap();
            prop_assert_eq!(norm(&back), q(5));
            if m.is_integer() {
                let pt = to_surface_point(&xi).unwrap();
                prop_assert_eq!(pt.residual(), BigInt::zero());
                prop_assert_eq!(norm(&swap_solution(&pt).unwrap()), q(5));
            }
        }

        #[test]
        fn rebase_preserves_norm(xi in arb(3), k in 1i64..4) {
            let t1 = BigInt::from(3 * k * k * k);
            prop_assert_eq!(norm(&radicand_rebase(&xi, &t1).unwrap()), norm(&xi));
            let t2 = BigInt::from(9 * k * k * k);
            prop_assert_eq!(norm(&radicand_rebase(&xi, &t2).unwrap()), norm(&xi));
        }
    }
}
