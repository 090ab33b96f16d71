//! Images of tower elements in the completions K_v and in K_v[θ]/(θ³ − n).
//!
//! Depending on how x³ − n factors over K_v, θ either has an image in Q_p
//! (the usual case), generates a totally ramified tame extension (p | n), or
//! generates the unramified cubic extension. In the last two cases only the
//! information needed for cube classes is extracted.

use crate::arith::valuation;
use crate::error::{Error, Result};
use crate::local::{EisensteinLocal, LocalCubeClass, LocalField, Regime};
use crate::padic::{hensel_root, padic_roots, PadicNumber};
use crate::tower::TowerElement;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaImage {
    /// θ ↦ t ∈ Q_p.
    Embedded(PadicNumber),
    /// n = p^e·m with e ∈ {1, 2}, p ≠ 3.
    Ramified { e: u32, m: BigInt },
    /// x³ − n irreducible over Q_p with p ∤ 3n.
    Unramified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalEmbedding {
    pub field: LocalField,
    pub theta: ThetaImage,
}

/// Class information for an element of K_v[θ].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtClass {
    /// The element lies in K_v (θ embedded); its class there.
    Base(LocalCubeClass),
    /// Totally ramified case: (Θ-exponent, unit character) in F^×/F^{×3}.
    Ramified([u8; 2]),
    /// Unramified case: only the valuation mod 3 is kept.
    Valuation(u8),
}

impl ExtClass {
    pub fn sub(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (ExtClass::Base(a), ExtClass::Base(b)) => Ok(ExtClass::Base(a.add(&b.neg()))),
            (ExtClass::Ramified(a), ExtClass::Ramified(b)) => {
                Ok(ExtClass::Ramified([(a[0] + 3 - b[0]) % 3, (a[1] + 3 - b[1]) % 3]))
            }
            (ExtClass::Valuation(a), ExtClass::Valuation(b)) => Ok(ExtClass::Valuation((a + 3 - b) % 3)),
            _ => Err(Error::Precondition("mixing classes of different extensions".into())),
        }
    }

    /// A class of K_v^× whose image is self, when one exists.
    pub fn descend(&self) -> Result<LocalCubeClass> {
        match self {
            ExtClass::Base(c) => Ok(*c),
            ExtClass::Ramified([pi, u]) => {
                if *pi != 0 {
                    return Err(Error::Precondition("ratio is not in the image of the base field".into()));
                }
                Ok(LocalCubeClass::Tame([0, *u]))
            }
            ExtClass::Valuation(v) => Ok(LocalCubeClass::Tame([*v, 0])),
        }
    }
}

pub const THETA_PREC: u32 = 24;

impl LocalEmbedding {
    /// Chooses the image of θ. `seed` selects among several roots in Q_p.
    pub fn new(field: LocalField, n: &BigInt, seed: Option<&PadicNumber>) -> Result<Self> {
        let p = field.p.clone();
        let prec = field.prec.max(THETA_PREC);
        let vn = valuation(n, &p);
        if vn % 3 != 0 {
            if p == BigInt::from(3) {
                return Err(Error::UnsupportedLocal(p, "wildly ramified cube root".into()));
            }
            if vn > 2 {
                return Err(Error::UnsupportedLocal(p, "radicand not cube-free".into()));
            }
            let m = n / p.pow(vn);
            return Ok(LocalEmbedding { field, theta: ThetaImage::Ramified { e: vn, m } });
        }
        let poly = [-n.clone(), BigInt::zero(), BigInt::zero(), BigInt::one()];
        if let Some(s) = seed {
            let s_int = s.to_integer_mod(s.abs_prec().max(1) as u32).ok_or(Error::InsufficientPrecision)?;
            let t = if s.valuation().unwrap_or(0) == 0 {
                // refine a unit seed by Newton's method
                hensel_root(&poly, &p, &s_int, prec).or_else(|_| {
                    // fall back to matching the seed against all roots
                    select_root(n, &p, prec, &s_int, s.abs_prec())
                })?
            } else {
                select_root(n, &p, prec, &s_int, s.abs_prec())?
            };
            return Ok(LocalEmbedding { field, theta: ThetaImage::Embedded(t) });
        }
        let roots = padic_roots(&[BigRational::from_integer(-n.clone()), BigRational::zero(), BigRational::zero(), BigRational::one()], &p, prec);
        match roots.into_iter().next() {
            Some(t) => Ok(LocalEmbedding { field, theta: ThetaImage::Embedded(t) }),
            None if p == BigInt::from(3) => Err(Error::UnsupportedLocal(p, "radicand not a cube in Q_3".into())),
            None => Ok(LocalEmbedding { field, theta: ThetaImage::Unramified }),
        }
    }

    pub fn theta_value(&self) -> Option<&PadicNumber> {
        match &self.theta {
            ThetaImage::Embedded(t) => Some(t),
            _ => None,
        }
    }

    /// Image of an element of L₁ (no θ component).
    pub fn embed_l1(&self, e: &TowerElement) -> Result<EisensteinLocal> {
        let (a, b) = e.to_l1().ok_or_else(|| Error::Precondition("element has a θ component".into()))?;
        Ok(self.field.from_eisenstein(&a, &b))
    }

    /// Coefficients X₀, X₁, X₂ ∈ K_v with e = X₀ + X₁θ + X₂θ².
    pub fn coefficients(&self, e: &TowerElement) -> [EisensteinLocal; 3] {
        [0usize, 1, 2].map(|i| self.field.from_eisenstein(&e.c[i], &e.c[i + 3]))
    }

    /// Image in K_v when θ is embedded.
    pub fn embed(&self, e: &TowerElement) -> Result<EisensteinLocal> {
        let t = self.theta_value().ok_or_else(|| Error::UnsupportedLocal(self.field.p.clone(), "θ has no image in Q_p".into()))?;
        Ok(self.eval(&self.coefficients(e), t))
    }

    fn eval(&self, x: &[EisensteinLocal; 3], t: &PadicNumber) -> EisensteinLocal {
        let f = &self.field;
        let t1 = f.from_padic(t.clone());
        let t2 = f.mul(&t1, &t1);
        f.add(&f.add(&x[0], &f.mul(&x[1], &t1)), &f.mul(&x[2], &t2))
    }

    /// Class of X₀ + X₁θ + X₂θ² in the appropriate quotient.
    pub fn class_of(&self, x: &[EisensteinLocal; 3]) -> Result<ExtClass> {
        let f = &self.field;
        match &self.theta {
            ThetaImage::Embedded(t) => Ok(ExtClass::Base(f.cube_class(&self.eval(x, t))?)),
            ThetaImage::Unramified => {
                let mut best: Option<i64> = None;
                for c in x {
                    if f.is_zero(c) {
                        continue;
                    }
                    let v = f.valuation(c)?;
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
                let v = best.ok_or(Error::InsufficientPrecision)?;
                Ok(ExtClass::Valuation(v.rem_euclid(3) as u8))
            }
            ThetaImage::Ramified { e, m } => {
                // v_F(X_iθ^i) = 3v(X_i) + i·e; the residues i·e mod 3 are distinct,
                // so the minimum is attained by exactly one term.
                let mut lead: Option<(i64, usize)> = None;
                for (i, c) in x.iter().enumerate() {
                    if f.is_zero(c) {
                        continue;
                    }
                    let w = 3 * f.valuation(c)? + (i as i64) * (*e as i64);
                    if lead.map_or(true, |(b, _)| w < b) {
                        lead = Some((w, i));
                    }
                }
                let (_, i) = lead.ok_or(Error::InsufficientPrecision)?;
                let ci = match f.cube_class(&x[i])? {
                    LocalCubeClass::Tame(c) => c,
                    LocalCubeClass::Wild(_) => unreachable!("ramified θ is only used at tame primes"),
                };
                let chi_m = match f.cube_class(&f.from_rational(&BigRational::from_integer(m.clone())))? {
                    LocalCubeClass::Tame([_, c]) => c as i64,
                    LocalCubeClass::Wild(_) => unreachable!(),
                };
                // Classes of p and θ in F^×/F^{×3} as (Θ-exponent, unit character).
                let (cp, ct): ([i64; 2], [i64; 2]) = if *e == 1 {
                    // θ is a uniformizer and p = θ³/m
                    ([0, -chi_m], [1, 0])
                } else {
                    // Π = θ²/p is a uniformizer, p = Π³/m², θ = pm/Π
                    ([0, chi_m], [2, 2 * chi_m])
                };
                let v = ci[0] as i64;
                let pi = v * cp[0] + (i as i64) * ct[0];
                let u = v * cp[1] + ci[1] as i64 + (i as i64) * ct[1];
                Ok(ExtClass::Ramified([pi.rem_euclid(3) as u8, u.rem_euclid(3) as u8]))
            }
        }
    }

    pub fn class_of_element(&self, e: &TowerElement) -> Result<ExtClass> {
        self.class_of(&self.coefficients(e))
    }

    /// Degree [K_v : Q_p].
    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn is_split(&self) -> bool {
        matches!(self.field.regime, Regime::Split { .. })
    }
}

/// The root of x³ − n in Q_p agreeing with `seed` to the given absolute precision.
fn select_root(n: &BigInt, p: &BigInt, prec: u32, seed: &BigInt, seed_prec: i64) -> Result<PadicNumber> {
    let roots = padic_roots(&[BigRational::from_integer(-n.clone()), BigRational::zero(), BigRational::zero(), BigRational::one()], p, prec);
    let k = seed_prec.clamp(1, prec as i64) as u32;
    let m = p.pow(k);
    roots
        .into_iter()
        .find(|r| r.to_integer_mod(k).map(|x| (x - seed).mod_floor(&m).is_zero()).unwrap_or(false))
        .ok_or(Error::NoLift)
}
