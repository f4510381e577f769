//! Exact modular arithmetic primitives: factored moduli, modular inverse,
//! CRT recombination, square-and-multiply exponentiation, and the Euler and
//! Carmichael totients of prime powers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default trial-division bound for [`factorize`].
pub const DEFAULT_TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// A modulus `m >= 2` together with its prime-power factorization
/// `p_1^{e_1} * ... * p_r^{e_r}`, primes strictly increasing.
///
/// Indices into the factorization are 1-based throughout, matching the
/// index-set convention used by the idempotent and lattice modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredModulus {
    m: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl FactoredModulus {
    /// Builds a modulus from an explicit factorization. The primes must be
    /// strictly increasing, each at least 2 and (probably) prime, with all
    /// exponents positive.
    pub fn from_factors(factors: Vec<(BigUint, u32)>) -> Result<FactoredModulus> {
        if factors.is_empty() {
            return Err(Error::InputTooSmall("empty factorization".into()));
        }
        let two = BigUint::from(2u32);
        let mut m = BigUint::one();
        for (idx, (p, e)) in factors.iter().enumerate() {
            if *p < two {
                return Err(Error::Parse(format!("factor {} is below 2", p)));
            }
            if *e == 0 {
                return Err(Error::Parse(format!("exponent of {} is zero", p)));
            }
            if idx > 0 && factors[idx - 1].0 >= *p {
                return Err(Error::Parse("primes must be strictly increasing".into()));
            }
            if !is_probable_prime(p) {
                return Err(Error::Parse(format!("{} is not prime", p)));
            }
            m *= p.pow(*e);
        }
        Ok(FactoredModulus { m, factors })
    }

    pub fn m(&self) -> &BigUint {
        &self.m
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn r(&self) -> usize {
        self.factors.len()
    }

    /// The prime `p_i`, 1-based.
    pub fn prime(&self, i: usize) -> &BigUint {
        &self.factors[i - 1].0
    }

    /// The exponent `e_i`, 1-based.
    pub fn exponent(&self, i: usize) -> u32 {
        self.factors[i - 1].1
    }

    /// The prime power `p_i^{e_i}`, 1-based.
    pub fn prime_power(&self, i: usize) -> BigUint {
        let (p, e) = &self.factors[i - 1];
        p.pow(*e)
    }

    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }

    /// Text form `p1^e1*p2^e2*...`.
    pub fn to_factored_string(&self) -> String {
        self.factors
            .iter()
            .map(|(p, e)| format!("{}^{}", p, e))
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses either a plain decimal integer (factored by trial division) or
    /// the factored text form `p1^e1*p2^e2*...` (exponent `^1` may be omitted).
    pub fn parse(input: &str) -> Result<FactoredModulus> {
        let input = input.trim();
        if input.contains('*') || input.contains('^') {
            let mut factors = Vec::new();
            for part in input.split('*') {
                let (p_str, e_str) = match part.split_once('^') {
                    Some((p, e)) => (p, e),
                    None => (part, "1"),
                };
                let p = BigUint::from_str(p_str.trim())
                    .map_err(|_| Error::Parse(format!("bad prime `{}`", p_str)))?;
                let e: u32 = e_str
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent `{}`", e_str)))?;
                factors.push((p, e));
            }
            FactoredModulus::from_factors(factors)
        } else {
            let n = BigUint::from_str(input)
                .map_err(|_| Error::Parse(format!("bad integer `{}`", input)))?;
            factorize(&n)
        }
    }
}

impl fmt::Display for FactoredModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.m, self.to_factored_string())
    }
}

#[derive(Serialize, Deserialize)]
struct FactoredModulusWire {
    m: String,
    factors: Vec<(String, String)>,
}

impl Serialize for FactoredModulus {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FactoredModulusWire {
            m: self.m.to_string(),
            factors: self
                .factors
                .iter()
                .map(|(p, e)| (p.to_string(), e.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FactoredModulus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = FactoredModulusWire::deserialize(deserializer)?;
        let mut factors = Vec::with_capacity(wire.factors.len());
        for (p, e) in &wire.factors {
            let p = BigUint::from_str(p).map_err(D::Error::custom)?;
            let e: u32 = e.parse().map_err(D::Error::custom)?;
            factors.push((p, e));
        }
        let fm = FactoredModulus::from_factors(factors).map_err(D::Error::custom)?;
        if fm.m.to_string() != wire.m {
            return Err(D::Error::custom("factors do not multiply to m"));
        }
        Ok(fm)
    }
}

/// Factorizes `n >= 2` by trial division up to [`DEFAULT_TRIAL_DIVISION_BOUND`].
pub fn factorize(n: &BigUint) -> Result<FactoredModulus> {
    factorize_with_bound(n, DEFAULT_TRIAL_DIVISION_BOUND)
}

/// Factorizes `n >= 2` by trial division up to `bound`. A leftover cofactor
/// is accepted if it is provably or probably prime, otherwise the input must
/// be supplied pre-factored.
pub fn factorize_with_bound(n: &BigUint, bound: u64) -> Result<FactoredModulus> {
    if *n < BigUint::from(2u32) {
        return Err(Error::InputTooSmall(n.to_string()));
    }
    let mut rest = n.clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();

    let try_divisor = |rest: &mut BigUint, d: u64, factors: &mut Vec<(BigUint, u32)>| {
        let db = BigUint::from(d);
        let mut e = 0u32;
        while (&*rest % &db).is_zero() {
            *rest /= &db;
            e += 1;
        }
        if e > 0 {
            factors.push((db, e));
        }
    };

    try_divisor(&mut rest, 2, &mut factors);
    try_divisor(&mut rest, 3, &mut factors);
    // wheel over 6k±1
    let mut d = 5u64;
    while d <= bound && BigUint::from(d) * BigUint::from(d) <= rest {
        try_divisor(&mut rest, d, &mut factors);
        try_divisor(&mut rest, d + 2, &mut factors);
        d += 6;
    }

    if !rest.is_one() {
        let bound_sq = BigUint::from(bound) * BigUint::from(bound);
        if rest <= bound_sq || is_probable_prime(&rest) {
            factors.push((rest, 1));
        } else {
            return Err(Error::FactorizationLimitExceeded {
                cofactor: rest.to_string(),
                bound,
            });
        }
    }
    FactoredModulus::from_factors(factors)
}

/// Miller-Rabin with a fixed base set; deterministic for inputs below 3.3e24,
/// strongly probable beyond that. Desk-scale plumbing, not crypto.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    const SMALL: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &p in &SMALL {
        let pb = BigUint::from(p);
        if *n == pb {
            return true;
        }
        if (n % pb).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &SMALL {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least nonnegative `x` with `a*x = 1 (mod n)`.
pub fn mod_inverse(a: &BigUint, n: &BigUint) -> Result<BigUint> {
    if *n < BigUint::from(2u32) {
        return Err(Error::InputTooSmall(n.to_string()));
    }
    let a_red = a % n;
    let e = BigInt::from(a_red.clone()).extended_gcd(&BigInt::from(n.clone()));
    if !e.gcd.is_one() {
        return Err(Error::NotInvertible {
            a: a.to_string(),
            n: n.to_string(),
        });
    }
    let n_int = BigInt::from(n.clone());
    let x = ((e.x % &n_int) + &n_int) % &n_int;
    Ok(x.to_biguint().expect("reduced to [0, n)"))
}

/// Combines residues with pairwise-coprime moduli into the unique value in
/// `[0, prod moduli)` hitting each residue.
pub fn crt_combine(residues: &[(BigUint, BigUint)]) -> Result<BigUint> {
    let mut x = BigUint::zero();
    let mut modulus = BigUint::one();
    for (r, n) in residues {
        if n.is_zero() {
            return Err(Error::InputTooSmall("0".into()));
        }
        if !modulus.gcd(n).is_one() {
            return Err(Error::ModuliNotCoprime);
        }
        if n.is_one() {
            continue;
        }
        // x' = x + modulus * ((r - x) * modulus^{-1} mod n)
        let x_mod_n = &x % n;
        let diff = (r + n - &x_mod_n) % n;
        let inv = mod_inverse(&modulus, n)?;
        let t = (diff * inv) % n;
        x += &modulus * t;
        modulus *= n;
    }
    Ok(x)
}

#[inline]
fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// `b^e mod n` with `n < 2^64` and `e < 2^128`.
pub(crate) fn pow_mod_u64(b: u64, mut e: u128, n: u64) -> u64 {
    debug_assert!(n >= 2);
    let mut base = b % n;
    let mut acc = 1 % n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, base, n);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod_u64(base, base, n);
        }
    }
    acc
}

/// `b^e mod n` by square-and-multiply, with `b^0 = 1`.
pub fn pow_mod(b: &BigUint, e: &BigUint, n: &BigUint) -> Result<BigUint> {
    if *n < BigUint::from(2u32) {
        return Err(Error::InputTooSmall(n.to_string()));
    }
    if let (Some(n64), Some(e128)) = (n.to_u64(), e.to_u128()) {
        let b64 = (b % n).to_u64().expect("reduced below u64 modulus");
        return Ok(BigUint::from(pow_mod_u64(b64, e128, n64)));
    }
    Ok(b.modpow(e, n))
}

/// Euler totient of a prime power: `phi(p^e) = p^{e-1}(p-1)`.
pub fn euler_phi_prime_power(p: &BigUint, e: u32) -> BigUint {
    debug_assert!(e >= 1);
    p.pow(e - 1) * (p - 1u32)
}

/// Carmichael totient of a prime power: `phi(p^e)` except `2^{e-2}` for
/// `p = 2, e >= 3`.
pub fn carmichael_prime_power(p: &BigUint, e: u32) -> BigUint {
    debug_assert!(e >= 1);
    if *p == BigUint::from(2u32) && e >= 3 {
        BigUint::from(2u32).pow(e - 2)
    } else {
        euler_phi_prime_power(p, e)
    }
}

#[cfg(test)]
pub(crate) fn big(n: u64) -> BigUint {
    BigUint::from(n)
}
