//! Global lifts of Selmer elements to pairs (a, b) and the tangent-line
//! description of the connecting map, specialised to p = 3.

use crate::error::{Error, Result};
use crate::tower::{cube_class_test_in, CubeTest, Subfield, TowerElement};
use num_bigint::BigInt;
use num_rational::BigRational;

use std::fmt;

/// g = 2 generates (Z/3)^×.
pub const G: i64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Mu3Nonsplit,
    Z3Nonsplit,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::Mu3Nonsplit => write!(f, "mu3"),
            CaseTag::Z3Nonsplit => write!(f, "z3"),
        }
    }
}

impl std::str::FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mu3" | "mu3nonsplit" | "mu3-nonsplit" => Ok(CaseTag::Mu3Nonsplit),
            "z3" | "z3nonsplit" | "z3-nonsplit" | "z/3z" => Ok(CaseTag::Z3Nonsplit),
            other => Err(format!("unknown case `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPair {
    pub case: CaseTag,
    pub a: TowerElement,
    pub b: TowerElement,
}

fn require_cube(e: &TowerElement, field: Subfield) -> Result<bool> {
    match cube_class_test_in(e, field) {
        CubeTest::Cube(_) => Ok(true),
        CubeTest::NonCube(_) => Ok(false),
        CubeTest::Unknown => Err(Error::CubeTestInconclusive),
    }
}

/// τ(a)/a² is a cube in L₁.
pub fn eigenspace_check(a: &TowerElement) -> Result<bool> {
    if a.is_zero() || a.subfield() > Subfield::L1 {
        return Err(Error::Precondition("eigenspace_check needs a nonzero element of L1".into()));
    }
    let r = a.tau().div(&a.square())?;
    require_cube(&r, Subfield::L1)
}

/// b = N_{M/L₂}(σ(ξ)·σ²(ξ)²) for N_{M/L₁}(ξ) = a.
pub fn lift_mu3(a: &TowerElement, xi: &TowerElement) -> Result<HPair> {
    if xi.norm_rel(Subfield::M, Subfield::L1)? != *a {
        return Err(Error::NormMismatch);
    }
    let s1 = xi.sigma();
    let s2 = s1.sigma();
    let b = s1.mul(&s2.square()).norm_rel(Subfield::M, Subfield::L2)?;
    Ok(HPair { case: CaseTag::Mu3Nonsplit, a: a.clone(), b })
}

/// b = σ(ξ)²·σ²(ξ) for N_{L₂/Q}(ξ) = a.
pub fn lift_z3(a: &BigRational, xi: &TowerElement) -> Result<HPair> {
    if xi.subfield() > Subfield::L2 {
        return Err(Error::Precondition("lift_z3 needs ξ in L2".into()));
    }
    if xi.norm_rel(Subfield::L2, Subfield::Q)?.to_rational().as_ref() != Some(a) {
        return Err(Error::NormMismatch);
    }
    let s1 = xi.sigma();
    let b = s1.square().mul(&s1.sigma());
    Ok(HPair { case: CaseTag::Z3Nonsplit, a: TowerElement::rational(&xi.n, a.clone()), b })
}

/// N_{L₂/Q}(b) ∈ Q^{×3}, σ(b)/(ab) ∈ M^{×3}, and a in the χ_cyc-eigenspace.
pub fn check_h_mu3(h: &HPair) -> Result<bool> {
    if h.case != CaseTag::Mu3Nonsplit {
        return Err(Error::Precondition("not a mu3 pair".into()));
    }
    if h.b.subfield() > Subfield::L2 || h.a.subfield() > Subfield::L1 {
        return Ok(false);
    }
    if !eigenspace_check(&h.a)? {
        return Ok(false);
    }
    let nb = h.b.norm_rel(Subfield::L2, Subfield::Q)?;
    if !require_cube(&nb, Subfield::Q)? {
        return Ok(false);
    }
    let r = h.b.sigma().div(&h.a.mul(&h.b))?;
    require_cube(&r, Subfield::M)
}

/// b^g/τ(b) ∈ M^{×3}, N_{M/L₁}(b) ∈ L₁^{×3} and σ(b)/(ab) ∈ M^{×3}.
pub fn check_h_z3(h: &HPair) -> Result<bool> {
    if h.case != CaseTag::Z3Nonsplit {
        return Err(Error::Precondition("not a z3 pair".into()));
    }
    if h.a.subfield() != Subfield::Q || h.b.is_zero() {
        return Ok(false);
    }
    let tau_cond = h.b.pow(G)?.div(&h.b.tau())?;
    if !require_cube(&tau_cond, Subfield::M)? {
        return Ok(false);
    }
    let n1 = h.b.norm_rel(Subfield::M, Subfield::L1)?;
    if !require_cube(&n1, Subfield::L1)? {
        return Ok(false);
    }
    let r = h.b.sigma().div(&h.a.mul(&h.b))?;
    require_cube(&r, Subfield::M)
}

pub fn check_h(h: &HPair) -> Result<bool> {
    match h.case {
        CaseTag::Mu3Nonsplit => check_h_mu3(h),
        CaseTag::Z3Nonsplit => check_h_z3(h),
    }
}

/// Small search for ξ ∈ M with N_{M/L₁}(ξ) ≡ a modulo cubes of L₁, over
/// ξ = x + yθ + zθ² with x, y, z ∈ Z[ζ₃] of coordinates bounded by `bound`.
/// Returns (ξ, N(ξ)).
pub fn search_norm_mu3(a: &TowerElement, bound: i64) -> Option<(TowerElement, TowerElement)> {
    let n = &a.n;
    let range: Vec<i64> = (-bound..=bound).collect();
    let len = range.len();
    let total = len.pow(6);
    let mut best: Option<(TowerElement, TowerElement)> = None;
    for idx in 1..total {
        let mut c = [0i64; 6];
        let mut x = idx;
        for slot in c.iter_mut() {
            *slot = range[x % len];
            x /= len;
        }
        let xi = TowerElement::from_ints(n, c);
        if xi.is_zero() {
            continue;
        }
        let nm = xi.norm_rel(Subfield::M, Subfield::L1).ok()?;
        if nm.is_zero() {
            continue;
        }
        let Ok(ratio) = nm.div(a) else { continue };
        if let CubeTest::Cube(_) = cube_class_test_in(&ratio, Subfield::L1) {
            let better = match &best {
                None => true,
                Some((b, _)) => xi.height_bits() < b.height_bits(),
            };
            if better {
                best = Some((xi, nm));
                break;
            }
        }
    }
    best
}

/// y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆ over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub a1: BigRational,
    pub a2: BigRational,
    pub a3: BigRational,
    pub a4: BigRational,
    pub a6: BigRational,
}

/// An affine point with coordinates in the tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerPoint {
    pub x: TowerElement,
    pub y: TowerElement,
}

/// ℓ(x, y) = y − λx − ν.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub lambda: TowerElement,
    pub nu: TowerElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentData {
    pub curve: Curve,
    pub s: TowerPoint,
    pub t: TowerPoint,
    pub tan_s: LinearForm,
    pub tan_t: LinearForm,
}

impl Curve {
    pub fn new(a: [BigRational; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a;
        Curve { a1, a2, a3, a4, a6 }
    }

    pub fn from_ints(a: [i64; 5]) -> Self {
        Self::new(a.map(|x| BigRational::from_integer(BigInt::from(x))))
    }

    pub fn coeffs(&self) -> [&BigRational; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    /// Δ from the usual b-invariants.
    pub fn discriminant(&self) -> BigRational {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = a1 * a1 + a2 * BigRational::from_integer(4.into());
        let b4 = a1 * a3 + a4 * BigRational::from_integer(2.into());
        let b6 = a3 * a3 + a6 * BigRational::from_integer(4.into());
        let b8 = a1 * a1 * a6 + a2 * a6 * BigRational::from_integer(4.into()) - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let k = |v: i64| BigRational::from_integer(v.into());
        -(&b2 * &b2 * &b8) - k(8) * &b4 * &b4 * &b4 - k(27) * &b6 * &b6 + k(9) * &b2 * &b4 * &b6
    }

    fn lift(&self, q: &BigRational, n: &BigInt) -> TowerElement {
        TowerElement::rational(n, q.clone())
    }

    /// F(x, y) = y² + a₁xy + a₃y − x³ − a₂x² − a₄x − a₆ in the tower.
    pub fn residual(&self, p: &TowerPoint) -> TowerElement {
        let n = &p.x.n;
        let (x, y) = (&p.x, &p.y);
        let lhs = y.square().add(&self.lift(&self.a1, n).mul(x).mul(y)).add(&self.lift(&self.a3, n).mul(y));
        let rhs = x
            .cube()
            .add(&self.lift(&self.a2, n).mul(&x.square()))
            .add(&self.lift(&self.a4, n).mul(x))
            .add(&self.lift(&self.a6, n));
        lhs.sub(&rhs)
    }

    pub fn contains(&self, p: &TowerPoint) -> bool {
        self.residual(p).is_zero()
    }

    /// −P = (x, −y − a₁x − a₃).
    pub fn negate(&self, p: &TowerPoint) -> TowerPoint {
        let n = &p.x.n;
        let y = p.y.neg().sub(&self.lift(&self.a1, n).mul(&p.x)).sub(&self.lift(&self.a3, n));
        TowerPoint { x: p.x.clone(), y }
    }
}

/// Tangent line at P by implicit differentiation.
pub fn tangent_form(curve: &Curve, p: &TowerPoint) -> Result<LinearForm> {
    let n = &p.x.n;
    let l = |q: &BigRational| TowerElement::rational(n, q.clone());
    let three = TowerElement::integer(n, &BigInt::from(3));
    let two = TowerElement::integer(n, &BigInt::from(2));
    let (x, y) = (&p.x, &p.y);
    let fy = two.mul(y).add(&l(&curve.a1).mul(x)).add(&l(&curve.a3));
    if fy.is_zero() {
        return Err(Error::VerticalTangent);
    }
    let num = three
        .mul(&x.square())
        .add(&two.mul(&l(&curve.a2)).mul(x))
        .add(&l(&curve.a4))
        .sub(&l(&curve.a1).mul(y));
    let lambda = num.div(&fy)?;
    let nu = y.sub(&lambda.mul(x));
    Ok(LinearForm { lambda, nu })
}

impl LinearForm {
    pub fn eval(&self, x: &TowerElement, y: &TowerElement) -> TowerElement {
        y.sub(&self.lambda.mul(x)).sub(&self.nu)
    }

    /// Substituting y = λx + ν into the curve gives a monic cubic in x (up to sign);
    /// returns its coefficients lowest first.
    pub fn restriction(&self, curve: &Curve) -> [TowerElement; 4] {
        let n = &self.lambda.n;
        let l = |q: &BigRational| TowerElement::rational(n, q.clone());
        let (lam, nu) = (&self.lambda, &self.nu);
        // (λx+ν)² + a₁x(λx+ν) + a₃(λx+ν) − x³ − a₂x² − a₄x − a₆
        let c3 = TowerElement::integer(n, &BigInt::from(-1));
        let c2 = lam.square().add(&l(&curve.a1).mul(lam)).sub(&l(&curve.a2));
        let two = TowerElement::integer(n, &BigInt::from(2));
        let c1 = two.mul(lam).mul(nu).add(&l(&curve.a1).mul(nu)).add(&l(&curve.a3).mul(lam)).sub(&l(&curve.a4));
        let c0 = nu.square().add(&l(&curve.a3).mul(nu)).sub(&l(&curve.a6));
        [c0, c1, c2, c3]
    }
}

impl TangentData {
    pub fn new(curve: Curve, s: TowerPoint, t: TowerPoint) -> Result<Self> {
        for (name, p) in [("S", &s), ("T", &t)] {
            if !curve.contains(p) {
                return Err(Error::Precondition(format!("torsion point {name} is not on the curve")));
            }
        }
        let tan_s = tangent_form(&curve, &s)?;
        let tan_t = tangent_form(&curve, &t)?;
        Ok(TangentData { curve, s, t, tan_s, tan_t })
    }
}

/// Multiplicity of x₀ as a root of the polynomial c (lowest first) over the tower.
pub fn root_multiplicity(c: &[TowerElement], x0: &TowerElement) -> usize {
    let mut poly: Vec<TowerElement> = c.to_vec();
    let mut m = 0;
    loop {
        if poly.iter().all(|x| x.is_zero()) {
            return m;
        }
        // Horner with remainder
        let d = poly.len() - 1;
        let mut q = vec![TowerElement::zero(&x0.n); d];
        let mut acc = TowerElement::zero(&x0.n);
        for i in (0..=d).rev() {
            acc = acc.mul(x0).add(&poly[i]);
            if i > 0 {
                q[i - 1] = acc.clone();
            }
        }
        if !acc.is_zero() || d == 0 {
            return m;
        }
        m += 1;
        poly = q;
    }
}

pub fn sqrt_minus_three(n: &BigInt) -> TowerElement {
    TowerElement::from_ints(n, [1, 0, 0, 2, 0, 0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::parse_element;

    fn n(k: i64) -> BigInt {
        BigInt::from(k)
    }

    fn q(k: i64) -> BigRational {
        BigRational::from_integer(n(k))
    }

    pub(crate) fn curve_181() -> (Curve, TowerPoint, TowerPoint) {
        let k = n(181);
        let c = Curve::from_ints([0, -48, 0, -1248, -8112]);
        let s = TowerPoint {
            x: TowerElement::zero(&k),
            y: sqrt_minus_three(&k).scale(&q(52)),
        };
        let theta = TowerElement::theta(&k);
        let d = theta.sub(&TowerElement::integer(&k, &n(4)));
        let tx = TowerElement::integer(&k, &n(156)).div(&d).unwrap();
        let ty = theta.scale(&q(156)).div(&d).unwrap();
        (c, s, TowerPoint { x: tx, y: ty })
    }

    #[test]
    fn paper_tangent_lines_181() {
        let (c, s, t) = curve_181();
        let k = n(181);
        assert!(c.contains(&s) && c.contains(&t));
        let ts = tangent_form(&c, &s).unwrap();
        let r3 = sqrt_minus_three(&k);
        assert_eq!(ts.lambda, r3.scale(&q(4)));
        assert_eq!(ts.nu, r3.scale(&q(52)));
        let tt = tangent_form(&c, &t).unwrap();
        let theta = TowerElement::theta(&k);
        assert_eq!(tt.lambda, theta.add(&TowerElement::integer(&k, &n(2))).scale(&q(2)));
        let want_nu = theta
            .add(&TowerElement::integer(&k, &n(4)))
            .scale(&q(-156))
            .div(&theta.sub(&TowerElement::integer(&k, &n(4))))
            .unwrap();
        assert_eq!(tt.nu, want_nu);
        for (form, p) in [(&ts, &s), (&tt, &t)] {
            assert!(root_multiplicity(&form.restriction(&c), &p.x) >= 2);
        }
    }

    #[test]
    fn tangent_at_origin() {
        let k = n(7);
        let c = Curve::from_ints([3, 0, 5, 0, 0]);
        let s = TowerPoint { x: TowerElement::zero(&k), y: TowerElement::zero(&k) };
        let f = tangent_form(&c, &s).unwrap();
        assert!(f.lambda.is_zero() && f.nu.is_zero());
        // y² = x³ − x has a vertical tangent at (0, 0)
        let c2 = Curve::from_ints([0, 0, 0, -1, 0]);
        assert_eq!(tangent_form(&c2, &s), Err(Error::VerticalTangent));
    }

    #[test]
    fn eigenspace_examples() {
        let k = n(181);
        assert!(eigenspace_check(&TowerElement::zeta(&k)).unwrap());
        let a2 = TowerElement::from_l1(&k, q(52), q(39));
        assert!(eigenspace_check(&a2).unwrap());
        assert!(!eigenspace_check(&TowerElement::integer(&k, &n(2))).unwrap());
    }

    #[test]
    fn paper_b_values_pass_the_mu3_conditions() {
        let k = n(181);
        let b1 = parse_element("[217, 40, 7, 0, 0, 0]", &k).unwrap();
        let b2 = parse_element("[3011, 314, 59, 0, 0, 0]", &k).unwrap();
        let a1 = TowerElement::zeta(&k);
        let a2 = TowerElement::from_l1(&k, q(52), q(39));
        for (a, b) in [(a1.clone(), b1.clone()), (a2, b2)] {
            let h = HPair { case: CaseTag::Mu3Nonsplit, a, b };
            assert!(check_h_mu3(&h).unwrap());
        }
        let one = HPair { case: CaseTag::Mu3Nonsplit, a: TowerElement::one(&k), b: TowerElement::one(&k) };
        assert!(check_h_mu3(&one).unwrap());
        let bad = HPair { case: CaseTag::Mu3Nonsplit, a: a1, b: TowerElement::theta(&k) };
        assert!(!check_h_mu3(&bad).unwrap());
    }

    #[test]
    fn paper_b_values_pass_the_z3_conditions() {
        let k = n(802);
        let b1 = parse_element("[290/3, -4/3, 5/3, 41/3, 11/3, 5/3]", &k).unwrap();
        let h = HPair { case: CaseTag::Z3Nonsplit, a: TowerElement::integer(&k, &n(2)), b: b1 };
        assert!(check_h_z3(&h).unwrap());
        let one = HPair { case: CaseTag::Z3Nonsplit, a: TowerElement::one(&k), b: TowerElement::one(&k) };
        assert!(check_h_z3(&one).unwrap());
        let bad = HPair { case: CaseTag::Z3Nonsplit, a: TowerElement::integer(&k, &n(2)), b: TowerElement::theta(&k) };
        assert!(!check_h_z3(&bad).unwrap());
    }

    #[test]
    fn z3_lift_of_one_plus_cube_root_of_two() {
        let k = n(2);
        let xi = TowerElement::from_ints(&k, [1, 1, 0, 0, 0, 0]);
        let h = lift_z3(&q(3), &xi).unwrap();
        assert!(check_h_z3(&h).unwrap());
        assert_eq!(lift_z3(&q(5), &xi), Err(Error::NormMismatch));
        let r = TowerElement::integer(&k, &n(5));
        let h = lift_z3(&q(125), &r).unwrap();
        assert!(crate::tower::cube_class_test(&h.b).is_cube());
    }

    #[test]
    fn mu3_lift_of_rational_xi() {
        let k = n(10);
        let xi = TowerElement::from_l1(&k, q(2), q(1));
        let a = xi.cube();
        let h = lift_mu3(&a, &xi).unwrap();
        assert!(crate::tower::cube_class_test(&h.b).is_cube());
        assert!(check_h_mu3(&h).unwrap());
    }

    #[test]
    fn mu3_lifts_pass_their_checks() {
        for k in [2i64, 3, 5, 7, 10] {
            let kk = n(k);
            for c in [[1, 1, 0, 0, 0, 0], [2, 0, 1, 1, 0, 0], [1, -1, 1, 0, 1, 0], [0, 1, 0, 1, 0, 1]] {
                // ξ·τ(ξ)² has norm in the eigenspace where τ acts by squaring.
                let x0 = TowerElement::from_ints(&kk, c);
                let xi = x0.mul(&x0.tau().square());
                let a = xi.norm_rel(Subfield::M, Subfield::L1).unwrap();
                assert!(eigenspace_check(&a).unwrap());
                let h = lift_mu3(&a, &xi).unwrap();
                assert!(check_h_mu3(&h).unwrap(), "n={k} ξ={xi}");
            }
        }
    }

    #[test]
    fn z3_lifts_pass_their_checks() {
        for k in [2i64, 3, 5, 7, 10] {
            let kk = n(k);
            for c in [[1, 1, 0, 0, 0, 0], [2, 0, 1, 0, 0, 0], [1, -1, 1, 0, 0, 0], [3, 1, 1, 0, 0, 0]] {
                let xi = TowerElement::from_ints(&kk, c);
                let a = xi.norm_rel(Subfield::L2, Subfield::Q).unwrap().to_rational().unwrap();
                let h = lift_z3(&a, &xi).unwrap();
                assert!(check_h_z3(&h).unwrap(), "n={k} ξ={xi}");
            }
        }
    }
}
