//! The ring Z[ζ₃] and its cubic residue symbol.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// a + b·ζ₃.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Eisenstein {
    pub a: BigInt,
    pub b: BigInt,
}

impl Eisenstein {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Eisenstein { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn zeta() -> Self {
        Self::new(0, 1)
    }

    /// λ = 1 − ζ₃.
    pub fn lambda() -> Self {
        Self::new(1, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn add(&self, o: &Self) -> Self {
        Eisenstein { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Eisenstein { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> Self {
        Eisenstein { a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let bd = &self.b * &o.b;
        Eisenstein {
            a: &self.a * &o.a - &bd,
            b: &self.a * &o.b + &self.b * &o.a - &bd,
        }
    }

    /// Complex conjugate, ζ ↦ ζ².
    pub fn conj(&self) -> Self {
        Eisenstein { a: &self.a - &self.b, b: -&self.b }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Exact quotient, if `o` divides `self`.
    pub fn div_exact(&self, o: &Self) -> Option<Self> {
        let n = o.norm();
        if n.is_zero() {
            return None;
        }
        let t = self.mul(&o.conj());
        if (&t.a % &n).is_zero() && (&t.b % &n).is_zero() {
            Some(Eisenstein { a: t.a / &n, b: t.b / &n })
        } else {
            None
        }
    }

    /// Quotient rounded to the nearest lattice point; the remainder has
    /// norm at most 3/4 of N(o).
    pub fn div_round(&self, o: &Self) -> Self {
        let n = o.norm();
        let t = self.mul(&o.conj());
        Eisenstein { a: round_div(&t.a, &n), b: round_div(&t.b, &n) }
    }

    pub fn rem(&self, o: &Self) -> Self {
        self.sub(&self.div_round(o).mul(o))
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn divisible_by_lambda(&self) -> bool {
        ((&self.a + &self.b) % 3u32).is_zero()
    }

    /// α ≡ 2 (mod 3).
    pub fn is_primary(&self) -> bool {
        self.a.mod_floor(&BigInt::from(3)) == BigInt::from(2) && (&self.b % 3u32).is_zero()
    }

    /// Writes self = ε·α with α primary, returning (α, e, s) where ε = (−1)^s ζ^e.
    /// Requires self coprime to 3.
    pub fn primary_part(&self) -> Option<(Self, u8, bool)> {
        if self.is_zero() || self.divisible_by_lambda() {
            return None;
        }
        for e in 0..3u8 {
            for s in [false, true] {
                // candidate α = self·ζ^{−e}·(−1)^s
                let inv = Self::zeta().pow((3 - e as u32) % 3);
                let mut c = self.mul(&inv);
                if s {
                    c = c.neg();
                }
                if c.is_primary() {
                    return Some((c, e, s));
                }
            }
        }
        None
    }
}

fn round_div(x: &BigInt, n: &BigInt) -> BigInt {
    // floor((2x + n) / 2n)
    (x * 2u32 + n).div_floor(&(n * 2u32))
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*zeta3", self.b)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*zeta3", self.a, -&self.b)
        } else {
            write!(f, "{} + {}*zeta3", self.a, self.b)
        }
    }
}

pub fn gcd(x: &Eisenstein, y: &Eisenstein) -> Eisenstein {
    let (mut a, mut b) = (x.clone(), y.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a
}

/// The prime of Z[ζ₃] above p ≡ 1 (mod 3) on which ζ₃ ≡ r.
pub fn split_prime(p: &BigInt, r: &BigInt) -> Eisenstein {
    gcd(&Eisenstein::new(p.clone(), 0), &Eisenstein::new(-r, 1))
}

/// Index of (α/β)₃ as a power of ζ₃, for β coprime to 3 and to α.
/// Returns None when they share a factor.
pub fn cubic_residue_symbol(alpha: &Eisenstein, beta: &Eisenstein) -> Option<u8> {
    let (mut beta, _, _) = beta.primary_part()?;
    let mut alpha = alpha.clone();
    let mut acc: u64 = 0;
    loop {
        if beta.is_unit() {
            return Some((acc % 3) as u8);
        }
        alpha = alpha.rem(&beta);
        if alpha.is_zero() {
            return None;
        }
        let mut k = 0u64;
        while alpha.divisible_by_lambda() {
            alpha = alpha.div_exact(&Eisenstein::lambda()).unwrap();
            k += 1;
        }
        let (prim, m, _) = alpha.primary_part().unwrap();
        // (ζ/β) = ζ^{(Nβ−1)/3}; (λ/β) = ζ^{2m} where β = (3m − 1) + 3nζ; (−1/β) = 1.
        let nb = beta.norm();
        let e_zeta = ((&nb - 1u32) / 3u32).mod_floor(&BigInt::from(3));
        let m_beta = ((&beta.a + 1u32) / 3u32).mod_floor(&BigInt::from(3));
        let e_lambda = (m_beta * 2u32) % 3u32;
        let ez: u64 = e_zeta.try_into().unwrap();
        let el: u64 = e_lambda.try_into().unwrap();
        acc += m as u64 * ez + k * el;
        // cubic reciprocity between primary elements
        alpha = beta;
        beta = prim;
    }
}
