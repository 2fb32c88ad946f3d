//! Integer and rational factorization: trial division, then Brent's variant of
//! Pollard rho with Miller-Rabin primality.

use std::collections::BTreeMap;
use std::fmt;

use rug::integer::IsPrime;
use rug::ops::Pow;
use rug::{Integer, Rational};

use super::FieldError;

const TRIAL_LIMIT: u64 = 1_000_000;

/// `sign * prod p^e`, primes ascending, exponents nonzero (negative in the
/// denominator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i32,
    pub factors: Vec<(Integer, i32)>,
}

impl Factorization {
    pub fn value(&self) -> Rational {
        let mut r = Rational::from(self.sign);
        for (p, e) in &self.factors {
            let pe = p.clone().pow(e.unsigned_abs());
            if *e > 0 {
                r *= pe;
            } else {
                r /= pe;
            }
        }
        r
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.sign < 0 {
            parts.push("-1".into());
        }
        for (p, e) in &self.factors {
            if *e == 1 {
                parts.push(p.to_string());
            } else {
                parts.push(format!("{}^{}", p, e));
            }
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Prime factorization of `|n|`, ascending primes with multiplicities.
pub fn factor_integer(n: &Integer) -> Result<Vec<(Integer, u32)>, FieldError> {
    if n.cmp0().is_eq() {
        return Err(FieldError::NonzeroRequired);
    }
    let mut m = Integer::from(n.abs_ref());
    let mut out: BTreeMap<Integer, u32> = BTreeMap::new();

    let push = |p: u64, m: &mut Integer, out: &mut BTreeMap<Integer, u32>| {
        while m.is_divisible_u(p as u32) {
            *m /= p as u32;
            *out.entry(Integer::from(p)).or_default() += 1;
        }
    };
    push(2, &mut m, &mut out);
    push(3, &mut m, &mut out);
    let mut d = 5u64;
    while d <= TRIAL_LIMIT && Integer::from(d * d) <= m {
        push(d, &mut m, &mut out);
        push(d + 2, &mut m, &mut out);
        d += 6;
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(c) = stack.pop() {
            if c == 1 {
                continue;
            }
            if is_prime(&c) {
                *out.entry(c).or_default() += 1;
                continue;
            }
            if c.significant_bits() > 128 {
                return Err(FieldError::FactorLimit(c.to_string()));
            }
            let d = split(&c);
            let rest = Integer::from(&c / &d);
            stack.push(d);
            stack.push(rest);
        }
    }
    Ok(out.into_iter().collect())
}

fn is_prime(n: &Integer) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => n.is_probably_prime(40) != IsPrime::No,
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial divisor of the composite `n`.
fn split(n: &Integer) -> Integer {
    if n.is_even() {
        return Integer::from(2);
    }
    if let Some(v) = n.to_u64() {
        let mut c = 1u64;
        loop {
            if let Some(d) = brent_u64(v, c) {
                return Integer::from(d);
            }
            c += 1;
        }
    }
    let mut c = Integer::from(1);
    loop {
        if let Some(d) = brent_big(n, &c) {
            return d;
        }
        c += 1;
    }
}

fn brent_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let m = 128u64;
    let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
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
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &Integer, c: &Integer) -> Option<Integer> {
    let f = |x: &Integer| -> Integer { (Integer::from(x.square_ref()) + c) % n };
    let mut y = Integer::from(2);
    let mut r = 1u64;
    let mut q = Integer::from(1);
    let m = 128u64;
    let mut g = Integer::from(1);
    let mut x = Integer::new();
    let mut ys = Integer::new();
    while g == 1 {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * Integer::from(&x - &y).abs()) % n;
            }
            g = Integer::from(q.gcd_ref(n));
            k += m;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = Integer::from(&x - &ys).abs().gcd(n);
            if g > 1 {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Signed prime factorization of a nonzero rational.
pub fn factor_rational(r: &Rational) -> Result<Factorization, FieldError> {
    if r.cmp0().is_eq() {
        return Err(FieldError::NonzeroRequired);
    }
    let sign = if r.cmp0().is_lt() { -1 } else { 1 };
    let mut factors: Vec<(Integer, i32)> = Vec::new();
    for (p, e) in factor_integer(r.numer())? {
        factors.push((p, e as i32));
    }
    if *r.denom() != 1 {
        for (p, e) in factor_integer(r.denom())? {
            factors.push((p, -(e as i32)));
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { sign, factors })
}

/// `r = m * s^2` with `m` a squarefree integer carrying the sign and `s > 0`.
pub fn squarefree_split(r: &Rational) -> Result<(Integer, Rational), FieldError> {
    let f = factor_rational(r)?;
    let mut m = Integer::from(f.sign);
    let mut s = Rational::from(1);
    for (p, e) in &f.factors {
        if e.rem_euclid(2) == 1 {
            m *= p;
        }
        // p^e = p^(e mod 2) * (p^k)^2 with k = floor(e/2)
        let k = e.div_euclid(2);
        let pk = p.clone().pow(k.unsigned_abs());
        if k >= 0 {
            s *= pk;
        } else {
            s /= pk;
        }
    }
    Ok((m, s))
}
