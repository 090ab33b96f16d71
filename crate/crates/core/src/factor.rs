//! Integer factorization: trial division, Pollard-Brent rho, and a
//! Baillie-PSW primality test for certifying the reported primes.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Prime-power decomposition of |n|, primes ascending and pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization(pub Vec<(BigInt, u32)>);

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.0.iter().map(|(p, _)| p)
    }

    pub fn value(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    pub fn exponent(&self, p: &BigInt) -> u32 {
        self.0.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e)
    }

    fn push(&mut self, p: BigInt, e: u32) {
        match self.0.binary_search_by(|(q, _)| q.cmp(&p)) {
            Ok(i) => self.0[i].1 += e,
            Err(i) => self.0.insert(i, (p, e)),
        }
    }
}

/// Work limits and reproducibility knobs for [`factor`].
#[derive(Debug, Clone)]
pub struct FactorConfig {
    /// Total number of rho iterations allowed across the whole call.
    pub budget: u64,
    pub seed: u64,
    /// Known divisors (not necessarily prime) that are split off first.
    pub hints: Vec<BigInt>,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig { budget: 50_000_000, seed: 0x5eed, hints: Vec::new() }
    }
}

const TRIAL_BOUND: u32 = 10_000;

fn small_primes(bound: u32) -> Vec<u32> {
    let mut sieve = vec![true; bound as usize + 1];
    let mut out = Vec::new();
    for i in 2..=bound as usize {
        if sieve[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= bound as usize {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

pub fn mod_pow(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    let r = b.mod_floor(m).modpow(e, m);
    r.mod_floor(m)
}

fn miller_rabin(n: &BigInt, base: u32) -> bool {
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = BigInt::from(base).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigInt::from(3) && (&n % 4u32) == BigInt::from(3) {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

fn is_perfect_square(n: &BigInt) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigInt) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    let mut d = BigInt::from(5);
    loop {
        let j = jacobi(&d, n);
        if j == -1 {
            break;
        }
        if j == 0 && d.abs() != *n {
            return false;
        }
        d = if d.is_positive() { -d - 2 } else { -d + 2 };
    }
    let p = BigInt::one();
    let q: BigInt = (BigInt::one() - &d) / 4;
    let np1: BigInt = n + 1;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;
    let inv2: BigInt = (n + 1u32) / 2u32;
    let (mut u, mut v, mut qk) = (BigInt::one(), p.clone(), q.mod_floor(n));
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(n);
        v = (&v * &v - &qk * 2u32).mod_floor(n);
        qk = (&qk * &qk).mod_floor(n);
        if k.bit(i) {
            let nu = ((&p * &u + &v) * &inv2).mod_floor(n);
            let nv = ((&d * &u + &p * &v) * &inv2).mod_floor(n);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(n);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk * 2u32).mod_floor(n);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(n);
    }
    false
}

/// Deterministic below 3.3·10²⁴ (first thirteen prime bases); Baillie-PSW above.
pub fn is_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    const BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &b in &BASES {
        if *n == BigInt::from(b) {
            return true;
        }
        if (n % b).is_zero() {
            return false;
        }
    }
    let limit: BigInt = "3317044064679887385961981".parse().unwrap();
    if *n < limit {
        return BASES.iter().all(|&b| miller_rabin(n, b));
    }
    miller_rabin(n, 2) && strong_lucas(n)
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

fn rho_u64(n: u64, c: u64, y0: u64, budget: &mut u64) -> Option<u64> {
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let f = |x: u64| ((mulmod(x, x) as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, m) = (y0 % n, 1u64, 128u64);
    let (mut x, mut ys) = (0u64, 0u64);
    let mut q = 1u64;
    let mut g = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mulmod(q, x.abs_diff(y));
            }
            g = num_integer::gcd(q, n);
            k += m;
        }
        *budget = budget.saturating_sub(r);
        if *budget == 0 && g == 1 {
            return None;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = num_integer::gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    Some(g)
}

fn rho_big(n: &BigInt, c: &BigInt, y0: &BigInt, budget: &mut u64) -> Option<BigInt> {
    let f = |x: &BigInt| (x * x + c) % n;
    let (mut y, mut r, m) = (y0 % n, 1u64, 128u64);
    let (mut x, mut ys) = (BigInt::zero(), BigInt::zero());
    let mut q = BigInt::one();
    let mut g = BigInt::one();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = gcd(&q, n);
            k += m;
        }
        *budget = budget.saturating_sub(r);
        if *budget == 0 && g.is_one() {
            return None;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = gcd(&(&x - &ys).abs(), n);
            if !g.is_one() {
                break;
            }
        }
    }
    Some(g)
}

/// Finds a nontrivial divisor of the composite `n`.
fn find_divisor(n: &BigInt, rng: &mut ChaCha8Rng, budget: &mut u64) -> Result<BigInt> {
    if let Some(r) = perfect_power_root(n) {
        return Ok(r);
    }
    loop {
        if *budget == 0 {
            return Err(Error::FactorTimeout(n.clone()));
        }
        let d = if let Some(small) = n.to_u64() {
            let c = rng.gen_range(1..small.max(3));
            let y0 = rng.gen_range(0..small);
            rho_u64(small, c, y0, budget).map(BigInt::from)
        } else {
            let c = BigInt::from(rng.gen::<u64>() | 1);
            let y0 = BigInt::from(rng.gen::<u64>());
            rho_big(n, &c, &y0, budget)
        };
        match d {
            Some(d) if !d.is_one() && d != *n => return Ok(d),
            Some(_) => continue,
            None => return Err(Error::FactorTimeout(n.clone())),
        }
    }
}

fn perfect_power_root(n: &BigInt) -> Option<BigInt> {
    for k in 2..=(n.bits() as u32).min(64) {
        let r = n.nth_root(k);
        if r > BigInt::one() && r.pow(k) == *n {
            return Some(r);
        }
    }
    None
}

/// Exact factorization of |n|, n ≠ 0. `1` factors as the empty product.
pub fn factor(n: &BigInt) -> Result<Factorization> {
    factor_with(n, &FactorConfig::default())
}

pub fn factor_with(n: &BigInt, cfg: &FactorConfig) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor 0".into()));
    }
    let mut out = Factorization::default();
    let m = n.abs();
    // Hints may be composite; treat them as a seed set of cofactors.
    let mut pending: Vec<BigInt> = Vec::new();
    for h in &cfg.hints {
        let h = h.abs();
        if h <= BigInt::one() {
            continue;
        }
        let g = m.gcd(&h);
        if !g.is_one() {
            pending.push(g);
        }
    }
    let mut rest = m.clone();
    let mut split: Vec<BigInt> = Vec::new();
    for g in pending {
        // Keep pieces coprime by refining against what we already split off.
        let mut parts = vec![g];
        for s in split.iter() {
            let mut next = Vec::new();
            for p in parts {
                let c = p.gcd(s);
                if c.is_one() {
                    next.push(p);
                } else {
                    let mut q = p.clone();
                    while (&q % &c).is_zero() {
                        q /= &c;
                    }
                    if !q.is_one() {
                        next.push(q);
                    }
                }
            }
            parts = next;
        }
        split.extend(parts);
    }
    let mut cofactors: Vec<BigInt> = Vec::new();
    for s in split {
        let mut e = 0u32;
        while (&rest % &s).is_zero() {
            rest /= &s;
            e += 1;
        }
        for _ in 0..e {
            cofactors.push(s.clone());
        }
    }
    cofactors.push(rest);

    let primes = small_primes(TRIAL_BOUND);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut budget = cfg.budget;
    let mut stack: Vec<BigInt> = Vec::new();
    for mut c in cofactors {
        for &p in &primes {
            if c.is_one() {
                break;
            }
            let pb = BigInt::from(p);
            if (&c % &pb).is_zero() {
                let mut e = 0;
                while (&c % &pb).is_zero() {
                    c /= &pb;
                    e += 1;
                }
                out.push(pb, e);
            }
        }
        if !c.is_one() {
            stack.push(c);
        }
    }
    let tb = BigInt::from(TRIAL_BOUND);
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if &c <= &(&tb * &tb) || is_prime(&c) {
            out.push(c, 1);
            continue;
        }
        let d = find_divisor(&c, &mut rng, &mut budget)?;
        let e = &c / &d;
        stack.push(d);
        stack.push(e);
    }
    debug_assert_eq!(out.value(), n.abs());
    Ok(out)
}
