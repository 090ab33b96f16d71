//! Integer helpers shared by every module: cube-free parts, the b = b₁b₂²
//! split, modular cube roots and a few exact root extractions.

use crate::error::{Error, Result};
use crate::factor::{factor_with, mod_pow, FactorConfig, Factorization};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Floor of the real cube root, for any sign.
pub fn icbrt(n: &BigInt) -> BigInt {
    if n.is_negative() {
        let r = (-n).cbrt();
        if &(&r * &r * &r) == &(-n) {
            -r
        } else {
            -r - 1
        }
    } else {
        n.cbrt()
    }
}

/// Exact integer cube root if `n` is a perfect cube.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let r = icbrt(n);
    (&r * &r * &r == *n).then_some(r)
}

/// Exact rational cube root if `q` is a cube in Q.
pub fn rational_cbrt(q: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(exact_cbrt(q.numer())?, exact_cbrt(q.denom())?))
}

pub fn mod_inv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// v_p(n) for n ≠ 0.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

pub fn rat_valuation(q: &BigRational, p: &BigInt) -> i64 {
    valuation(q.numer(), p) as i64 - valuation(q.denom(), p) as i64
}

/// n = f·g³ with f cube-free, for n ≥ 1.
pub fn cube_free_part(n: &BigInt) -> Result<(BigInt, BigInt)> {
    cube_free_part_with(n, &FactorConfig::default())
}

pub fn cube_free_part_with(n: &BigInt, cfg: &FactorConfig) -> Result<(BigInt, BigInt)> {
    if !n.is_positive() {
        return Err(Error::Precondition(format!("cube_free_part needs n ≥ 1, got {n}")));
    }
    let fac = factor_with(n, cfg)?;
    let (mut f, mut g) = (BigInt::one(), BigInt::one());
    for (p, e) in &fac.0 {
        f *= p.pow(e % 3);
        g *= p.pow(e / 3);
    }
    Ok((f, g))
}

/// b = b₁·b₂² with b₁, b₂ squarefree and coprime; `b` must be cube-free.
pub fn split_square(b: &BigInt) -> Result<(BigInt, BigInt)> {
    let fac = factor_with(b, &FactorConfig::default())?;
    split_square_factored(&fac)
}

pub fn split_square_factored(fac: &Factorization) -> Result<(BigInt, BigInt)> {
    let (mut b1, mut b2) = (BigInt::one(), BigInt::one());
    for (p, e) in &fac.0 {
        match e {
            1 => b1 *= p,
            2 => b2 *= p,
            _ => return Err(Error::Precondition("split_square needs a cube-free input".into())),
        }
    }
    Ok((b1, b2))
}

/// How to choose among the several cube roots of a modulo a composite m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubeRootChoice {
    #[default]
    Smallest,
    Largest,
}

/// All cube roots of `a` modulo the prime `q`, ascending; empty when none exist.
pub fn cube_roots_mod_prime(a: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let a = a.mod_floor(q);
    if a.is_zero() {
        return vec![BigInt::zero()];
    }
    let three = BigInt::from(3);
    if *q == three || (q % 3u32) == BigInt::from(2) || *q == BigInt::from(2) {
        if *q == three || *q == BigInt::from(2) {
            return vec![a];
        }
        let e = (2 * q - 1) / 3;
        return vec![mod_pow(&a, &e, q)];
    }
    // q ≡ 1 (mod 3): q − 1 = 3^s·t with 3 ∤ t.
    let qm1: BigInt = q - 1;
    if !mod_pow(&a, &(&qm1 / 3), q).is_one() {
        return Vec::new();
    }
    let mut s = 0u32;
    let mut t = qm1.clone();
    while (&t % 3u32).is_zero() {
        t /= 3;
        s += 1;
    }
    let u = if (&t % 3u32) == BigInt::from(2) { (&t + 1) / 3 } else { (2 * &t + 1) / 3 };
    // x³ = a^(3u) = a·a^(3u−1) where a^(3u−1) lies in the 3-Sylow subgroup.
    let mut z = BigInt::from(2);
    while mod_pow(&z, &(&qm1 / 3), q).is_one() {
        z += 1;
    }
    let g = mod_pow(&z, &t, q); // generator of the 3-Sylow subgroup, order 3^s
    let mut x = mod_pow(&a, &u, q);
    let err = (mod_pow(&x, &three, q) * mod_inv(&a, q).unwrap()).mod_floor(q);
    // Find k with err = g^(3k), then x ← x·g^(−k).
    let order = BigInt::from(3).pow(s);
    let k = sylow_log(&err, &g, &order, s, q);
    match k {
        Some(k) => {
            if !(&k % 3u32).is_zero() {
                return Vec::new();
            }
            let kk = &k / 3;
            let ginv = mod_inv(&g, q).unwrap();
            x = (x * mod_pow(&ginv, &kk, q)).mod_floor(q);
        }
        None => return Vec::new(),
    }
    debug_assert_eq!(mod_pow(&x, &three, q), a);
    let w = mod_pow(&z, &(&qm1 / 3), q);
    let mut roots = vec![x.clone(), (&x * &w).mod_floor(q), (&x * &w * &w).mod_floor(q)];
    roots.sort();
    roots
}

/// Discrete log of `h` to base `g` in the cyclic group of order 3^s, digit by digit.
fn sylow_log(h: &BigInt, g: &BigInt, order: &BigInt, s: u32, q: &BigInt) -> Option<BigInt> {
    let gamma = mod_pow(g, &(order / 3), q); // order 3
    let mut k = BigInt::zero();
    let ginv = mod_inv(g, q)?;
    let mut pow3 = BigInt::one();
    for i in 0..s {
        let cur = (h * mod_pow(&ginv, &k, q)).mod_floor(q);
        let e = BigInt::from(3).pow(s - 1 - i);
        let d = mod_pow(&cur, &e, q);
        let digit = if d.is_one() {
            0
        } else if d == gamma {
            1
        } else if d == (&gamma * &gamma).mod_floor(q) {
            2
        } else {
            return None;
        };
        k += &pow3 * digit;
        pow3 *= 3;
    }
    Some(k)
}

const ENUMERATION_LIMIT: usize = 531_441; // 3^12

/// c with c³ ≡ a (mod m), m squarefree with the given factorization.
pub fn cube_root_mod(a: &BigInt, m: &BigInt, fac: &Factorization) -> Result<BigInt> {
    cube_root_mod_choice(a, m, fac, CubeRootChoice::Smallest)
}

pub fn cube_root_mod_choice(
    a: &BigInt,
    m: &BigInt,
    fac: &Factorization,
    choice: CubeRootChoice,
) -> Result<BigInt> {
    if m.is_one() {
        return Ok(BigInt::zero());
    }
    let mut per_prime: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    for (q, e) in &fac.0 {
        if *e != 1 {
            return Err(Error::Precondition("cube_root_mod needs a squarefree modulus".into()));
        }
        let roots = cube_roots_mod_prime(a, q);
        if roots.is_empty() {
            return Err(Error::NotCubeMod { a: a.clone(), q: q.clone() });
        }
        per_prime.push((q.clone(), roots));
    }
    // CRT basis: e_i ≡ 1 mod q_i, ≡ 0 mod q_j.
    let basis: Vec<BigInt> = per_prime
        .iter()
        .map(|(q, _)| {
            let mq = m / q;
            (&mq * mod_inv(&mq, q).unwrap()).mod_floor(m)
        })
        .collect();
    let combos: usize = per_prime
        .iter()
        .map(|(_, r)| r.len())
        .try_fold(1usize, |acc, l| acc.checked_mul(l))
        .unwrap_or(usize::MAX);
    let better = |x: &BigInt, best: &Option<BigInt>| match (best, choice) {
        (None, _) => true,
        (Some(b), CubeRootChoice::Smallest) => x < b,
        (Some(b), CubeRootChoice::Largest) => x > b,
    };
    if combos <= ENUMERATION_LIMIT {
        let mut best: Option<BigInt> = None;
        let mut idx = vec![0usize; per_prime.len()];
        loop {
            let mut x = BigInt::zero();
            for (i, (_, roots)) in per_prime.iter().enumerate() {
                x += &roots[idx[i]] * &basis[i];
            }
            let x = x.mod_floor(m);
            if better(&x, &best) {
                best = Some(x);
            }
            let mut i = 0;
            loop {
                if i == idx.len() {
                    return Ok(best.unwrap());
                }
                idx[i] += 1;
                if idx[i] < per_prime[i].1.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }
    // Too many combinations: fix primes one at a time, largest modulus first,
    // keeping whichever root moves the partial CRT value the right way.
    let mut order: Vec<usize> = (0..per_prime.len()).collect();
    order.sort_by(|&i, &j| per_prime[j].0.cmp(&per_prime[i].0));
    let mut x = BigInt::zero();
    for &i in &order {
        let mut best: Option<BigInt> = None;
        for r in &per_prime[i].1 {
            let cand = (&x + r * &basis[i]).mod_floor(m);
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
        x = best.unwrap();
    }
    Ok(x)
}

/// Factors `n` and returns its absolute value's prime list (cheap wrapper).
pub fn prime_divisors(n: &BigInt, cfg: &FactorConfig) -> Result<Vec<BigInt>> {
    if n.is_zero() {
        return Ok(Vec::new());
    }
    Ok(factor_with(n, cfg)?.0.into_iter().map(|(p, _)| p).collect())
}

pub fn to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}
