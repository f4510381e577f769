//! Idempotent-CRT modular exponentiation.
//!
//! `b^e mod m` splits into a sum over top-level idempotents
//! `d_i = d_{R \ {i}}` with per-prime-power reduced exponents:
//! for units the sum runs over all of `R`; for cycle elements of `C_I` it
//! runs over `R \ I` only; for arbitrary `b` the same reduced sum is valid
//! once `e >= max(e_1, ..., e_r)`. A reduced exponent of zero contributes
//! the term `d_i` itself (`b^0` read as the identity of the group `d_i U`).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

use crate::arith::{
    self, carmichael_prime_power, crt_combine, euler_phi_prime_power, pow_mod, FactoredModulus,
};
use crate::error::{Error, Result};
use crate::idempotent::idempotent_from_set;
use crate::index_set::IndexSet;

/// Which totient reduces the per-prime exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TotientKind {
    Euler,
    Carmichael,
}

impl TotientKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TotientKind::Euler => "euler",
            TotientKind::Carmichael => "carmichael",
        }
    }
}

/// Which theorem the dispatcher applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Strategy {
    /// `gcd(b, m) = 1`: sum over all `r` top-level idempotents.
    Unit,
    /// `d_I b = b`: sum over `R \ I`, any `e >= 1`.
    Cycle,
    /// arbitrary `b`, `e >= max(e_i)`: sum over `R \ T`.
    General,
    /// plain square-and-multiply (non-cycle `b` with small `e`, or `e = 0`).
    Fallback,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Unit => "UNIT",
            Strategy::Cycle => "CYCLE",
            Strategy::General => "GENERAL",
            Strategy::Fallback => "FALLBACK",
        }
    }
}

/// The dispatch decision for one exponentiation.
#[derive(Debug, Clone)]
pub struct ExpPlan {
    pub strategy: Strategy,
    /// Indices summed over (`S \ T` of the applied theorem).
    pub active: IndexSet,
    /// `(i, e mod totient(p_i^{e_i}))` for each active index.
    pub reduced_exponents: Vec<(usize, BigUint)>,
    pub totient_kind: TotientKind,
}

impl Serialize for ExpPlan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExpPlan", 4)?;
        st.serialize_field("strategy", self.strategy.as_str())?;
        st.serialize_field("active", &self.active)?;
        let reduced: Vec<(usize, String)> = self
            .reduced_exponents
            .iter()
            .map(|(i, e)| (*i, e.to_string()))
            .collect();
        st.serialize_field("reduced_exponents", &reduced)?;
        st.serialize_field("totient_kind", self.totient_kind.as_str())?;
        st.end()
    }
}

/// Precomputed per-modulus data for the exponentiation theorems: top-level
/// idempotents and both totients of every prime power, with parallel `u64`
/// tables when the modulus fits a machine word.
#[derive(Debug, Clone)]
pub struct ExpContext {
    modulus: FactoredModulus,
    top: Vec<BigUint>,
    phi: Vec<BigUint>,
    lam: Vec<BigUint>,
    max_e: u32,
    // u64 mirror, populated when m < 2^64
    m64: Option<u64>,
    top64: Vec<u64>,
    phi64: Vec<u64>,
    lam64: Vec<u64>,
    primes64: Vec<u64>,
}

impl ExpContext {
    pub fn new(modulus: &FactoredModulus) -> Result<ExpContext> {
        let r = modulus.r();
        let full = IndexSet::full(r);
        let mut top = Vec::with_capacity(r);
        let mut phi = Vec::with_capacity(r);
        let mut lam = Vec::with_capacity(r);
        for i in 1..=r {
            top.push(idempotent_from_set(modulus, full.remove(i))?.value().clone());
            phi.push(euler_phi_prime_power(modulus.prime(i), modulus.exponent(i)));
            lam.push(carmichael_prime_power(modulus.prime(i), modulus.exponent(i)));
        }
        let m64 = modulus.m().to_u64();
        let (mut top64, mut phi64, mut lam64, mut primes64) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        if m64.is_some() {
            top64 = top.iter().map(|x| x.to_u64().unwrap()).collect();
            phi64 = phi.iter().map(|x| x.to_u64().unwrap()).collect();
            lam64 = lam.iter().map(|x| x.to_u64().unwrap()).collect();
            primes64 = (1..=r).map(|i| modulus.prime(i).to_u64().unwrap()).collect();
        }
        Ok(ExpContext {
            modulus: modulus.clone(),
            top,
            phi,
            lam,
            max_e: modulus.max_exponent(),
            m64,
            top64,
            phi64,
            lam64,
            primes64,
        })
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    fn totient(&self, i: usize, kind: TotientKind) -> &BigUint {
        match kind {
            TotientKind::Euler => &self.phi[i - 1],
            TotientKind::Carmichael => &self.lam[i - 1],
        }
    }

    fn totient64(&self, i: usize, kind: TotientKind) -> u64 {
        match kind {
            TotientKind::Euler => self.phi64[i - 1],
            TotientKind::Carmichael => self.lam64[i - 1],
        }
    }

    /// Component index set of `b`, i.e. `{i : p_i | b}`.
    fn component_set(&self, b: &BigUint) -> IndexSet {
        let mut set = IndexSet::EMPTY;
        for i in 1..=self.modulus.r() {
            if (b % self.modulus.prime(i)).is_zero() {
                set = set.insert(i);
            }
        }
        set
    }

    fn component_set64(&self, b: u64) -> IndexSet {
        let mut set = IndexSet::EMPTY;
        for (idx, &p) in self.primes64.iter().enumerate() {
            if b % p == 0 {
                set = set.insert(idx + 1);
            }
        }
        set
    }

    /// `d_I` as the sum of the top-level idempotents off `I`.
    fn idempotent_value(&self, set: IndexSet) -> BigUint {
        let mut acc = BigUint::ZERO;
        for i in 1..=self.modulus.r() {
            if !set.contains(i) {
                acc += &self.top[i - 1];
            }
        }
        if set.is_empty() {
            BigUint::one()
        } else {
            acc % self.modulus.m()
        }
    }

    fn idempotent_value64(&self, set: IndexSet, m: u64) -> u64 {
        let mut acc: u128 = 0;
        for (idx, &d) in self.top64.iter().enumerate() {
            if !set.contains(idx + 1) {
                acc += d as u128;
            }
        }
        if set.is_empty() {
            1 % m
        } else {
            (acc % m as u128) as u64
        }
    }

    /// The theorem sum over the indices off `dead`; also returns the reduced
    /// exponents per active index.
    fn reduced_sum(
        &self,
        dead: IndexSet,
        b: &BigUint,
        e: &BigUint,
        kind: TotientKind,
    ) -> Result<(BigUint, Vec<(usize, BigUint)>)> {
        let m = self.modulus.m();
        if let (Some(m64), Some(e128)) = (self.m64, e.to_u128()) {
            let b64 = (b % m).to_u64().expect("reduced below u64 modulus");
            let (value, reduced) = self.reduced_sum_u64(dead, b64, e128, kind, m64);
            let reduced = reduced
                .into_iter()
                .map(|(i, x)| (i, BigUint::from(x)))
                .collect();
            return Ok((BigUint::from(value), reduced));
        }
        let mut acc = BigUint::ZERO;
        let mut reduced = Vec::new();
        for i in 1..=self.modulus.r() {
            if dead.contains(i) {
                continue;
            }
            let ered = e % self.totient(i, kind);
            let term = if ered.is_zero() {
                self.top[i - 1].clone()
            } else {
                &self.top[i - 1] * pow_mod(b, &ered, m)? % m
            };
            acc += term;
            reduced.push((i, ered));
        }
        Ok((acc % m, reduced))
    }

    fn reduced_sum_u64(
        &self,
        dead: IndexSet,
        b: u64,
        e: u128,
        kind: TotientKind,
        m: u64,
    ) -> (u64, Vec<(usize, u64)>) {
        let mut acc: u128 = 0;
        let mut reduced = Vec::with_capacity(self.top64.len());
        for i in 1..=self.top64.len() {
            if dead.contains(i) {
                continue;
            }
            let t = self.totient64(i, kind);
            let ered = if e <= u64::MAX as u128 {
                e as u64 % t
            } else {
                (e % t as u128) as u64
            };
            let term = if ered == 0 {
                self.top64[i - 1]
            } else {
                mulmod(self.top64[i - 1], arith::pow_mod_u64(b, ered as u128, m), m)
            };
            acc += term as u128;
            reduced.push((i, ered));
        }
        ((acc % m as u128) as u64, reduced)
    }

    /// Unit exponentiation over all `r` top-level idempotents.
    pub fn unit(&self, u: &BigUint, e: &BigUint, kind: TotientKind) -> Result<BigUint> {
        let u = u % self.modulus.m();
        if !u.gcd(self.modulus.m()).is_one() {
            return Err(Error::NotAUnit {
                b: u.to_string(),
                m: self.modulus.m().to_string(),
            });
        }
        Ok(self.reduced_sum(IndexSet::EMPTY, &u, e, kind)?.0)
    }

    /// Cycle-element exponentiation over `R \ I`, valid for any `e >= 1`.
    pub fn cycle(&self, b: &BigUint, e: &BigUint, kind: TotientKind) -> Result<BigUint> {
        if e.is_zero() {
            return Err(Error::ExponentTooSmall {
                e: e.to_string(),
                min: 1,
            });
        }
        let b = b % self.modulus.m();
        let set = self.component_set(&b);
        let d = self.idempotent_value(set);
        if d * &b % self.modulus.m() != b {
            return Err(Error::NotCycleElement {
                b: b.to_string(),
                m: self.modulus.m().to_string(),
            });
        }
        Ok(self.reduced_sum(set, &b, e, kind)?.0)
    }

    /// General exponentiation over `R \ T`, valid once `e >= max(e_i)`.
    pub fn general(&self, b: &BigUint, e: &BigUint, kind: TotientKind) -> Result<BigUint> {
        if *e < BigUint::from(self.max_e) {
            return Err(Error::ExponentTooSmall {
                e: e.to_string(),
                min: self.max_e,
            });
        }
        let b = b % self.modulus.m();
        let set = self.component_set(&b);
        Ok(self.reduced_sum(set, &b, e, kind)?.0)
    }

    /// Dispatches to the strongest applicable theorem, falling back to plain
    /// square-and-multiply. Always agrees with [`pow_mod`]; `e = 0` returns 1.
    pub fn auto(&self, b: &BigUint, e: &BigUint, kind: TotientKind) -> (BigUint, ExpPlan) {
        let m = self.modulus.m();
        let b = b % m;
        let fallback_plan = |strategy: Strategy| ExpPlan {
            strategy,
            active: IndexSet::EMPTY,
            reduced_exponents: Vec::new(),
            totient_kind: kind,
        };
        if e.is_zero() {
            return (BigUint::one() % m, fallback_plan(Strategy::Fallback));
        }

        let r = self.modulus.r();
        let (set, is_cycle) = if let Some(m64) = self.m64 {
            let b64 = b.to_u64().expect("reduced below u64 modulus");
            let set = self.component_set64(b64);
            let d = self.idempotent_value64(set, m64);
            (set, mulmod(d, b64, m64) == b64)
        } else {
            let set = self.component_set(&b);
            let d = self.idempotent_value(set);
            (set, d * &b % m == b)
        };

        let (strategy, dead) = if set.is_empty() {
            (Strategy::Unit, IndexSet::EMPTY)
        } else if is_cycle {
            (Strategy::Cycle, set)
        } else if *e >= BigUint::from(self.max_e) {
            (Strategy::General, set)
        } else {
            let value = pow_mod(&b, e, m).expect("modulus is at least 2");
            return (value, fallback_plan(Strategy::Fallback));
        };

        let (value, reduced) = self
            .reduced_sum(dead, &b, e, kind)
            .expect("reduced sum cannot fail once b is reduced");
        (
            value,
            ExpPlan {
                strategy,
                active: dead.complement(r),
                reduced_exponents: reduced,
                totient_kind: kind,
            },
        )
    }

    /// Variant of the theorem sum that reduces per prime power and then
    /// recombines by CRT instead of summing modulo `m`. Used by the
    /// benchmark harness for comparison.
    pub fn auto_crt_variant(&self, b: &BigUint, e: &BigUint, kind: TotientKind) -> (BigUint, ExpPlan) {
        let m = self.modulus.m();
        let b = b % m;
        let (value, plan) = self.auto(&b, e, kind);
        if plan.strategy == Strategy::Fallback {
            return (value, plan);
        }
        let mut residues = Vec::with_capacity(self.modulus.r());
        let mut reduced_iter = plan.reduced_exponents.iter();
        for i in 1..=self.modulus.r() {
            let q = self.modulus.prime_power(i);
            if plan.active.contains(i) {
                let (_, ered) = reduced_iter.next().expect("one entry per active index");
                let residue = if ered.is_zero() {
                    BigUint::one() % &q
                } else {
                    pow_mod(&(&b % &q), ered, &q).expect("prime power is at least 2")
                };
                residues.push((residue, q));
            } else {
                // b vanishes modulo the dead prime powers in every applicable theorem
                residues.push((BigUint::ZERO, q));
            }
        }
        let crt_value = crt_combine(&residues).expect("prime powers are pairwise coprime");
        debug_assert_eq!(crt_value, value);
        (crt_value, plan)
    }
}

/// One-shot helpers that build an [`ExpContext`] per call.
pub fn modexp_unit(
    modulus: &FactoredModulus,
    u: &BigUint,
    e: &BigUint,
    kind: TotientKind,
) -> Result<BigUint> {
    ExpContext::new(modulus)?.unit(u, e, kind)
}

pub fn modexp_cycle(
    modulus: &FactoredModulus,
    b: &BigUint,
    e: &BigUint,
    kind: TotientKind,
) -> Result<BigUint> {
    ExpContext::new(modulus)?.cycle(b, e, kind)
}

pub fn modexp_general(
    modulus: &FactoredModulus,
    b: &BigUint,
    e: &BigUint,
    kind: TotientKind,
) -> Result<BigUint> {
    ExpContext::new(modulus)?.general(b, e, kind)
}

pub fn modexp_auto(
    modulus: &FactoredModulus,
    b: &BigUint,
    e: &BigUint,
    kind: TotientKind,
) -> Result<(BigUint, ExpPlan)> {
    Ok(ExpContext::new(modulus)?.auto(b, e, kind))
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Which arithmetic route the benchmark exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BenchVariant {
    /// Terms summed modulo `m` (the default formulation).
    SumModM,
    /// Per-prime-power reduction recombined by CRT.
    ReduceThenCrt,
}

impl BenchVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchVariant::SumModM => "sum-mod-m",
            BenchVariant::ReduceThenCrt => "reduce-then-crt",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quantiles {
    pub median_ns: u64,
    pub p95_ns: u64,
    pub samples: u64,
}

fn quantiles(mut samples: Vec<u64>) -> Quantiles {
    let n = samples.len();
    samples.sort_unstable();
    Quantiles {
        median_ns: samples[n / 2],
        p95_ns: samples[(n * 95 / 100).min(n - 1)],
        samples: n as u64,
    }
}

/// Relative timing of the idempotent-CRT dispatcher against plain
/// square-and-multiply on identical inputs. No absolute speed claims: the
/// report records per-strategy quantiles and a mismatch count that must be
/// zero.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub modulus: String,
    pub seed: u64,
    pub sample_count: usize,
    pub exponent_bits: u32,
    pub totient_kind: TotientKind,
    pub variant: BenchVariant,
    pub strategy_histogram: BTreeMap<String, u64>,
    pub idempotent_crt_ns: BTreeMap<String, Quantiles>,
    pub baseline_ns: Quantiles,
    pub mismatches: u64,
}

/// Runs `sample_count` deterministic random `(b, e)` pairs through both the
/// dispatcher and the baseline, timing each and checking agreement.
pub fn bench_compare(
    modulus: &FactoredModulus,
    sample_count: usize,
    exponent_bits: u32,
    seed: u64,
    kind: TotientKind,
    variant: BenchVariant,
) -> Result<BenchReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ctx = ExpContext::new(modulus)?;
    let m = modulus.m();
    let m_bits = m.bits();

    let random_big = |rng: &mut rand_chacha::ChaCha8Rng, bits: u64| -> BigUint {
        let n_bytes = (bits as usize + 7) / 8;
        let mut bytes = vec![0u8; n_bytes];
        rng.fill(&mut bytes[..]);
        let excess = (n_bytes as u64) * 8 - bits;
        if n_bytes > 0 && excess > 0 {
            bytes[n_bytes - 1] &= 0xff >> excess;
        }
        BigUint::from_bytes_le(&bytes)
    };

    let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
    let mut dispatch_times: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut baseline_times: Vec<u64> = Vec::with_capacity(sample_count);
    let mut mismatches = 0u64;

    for _ in 0..sample_count {
        let b = random_big(&mut rng, m_bits) % m;
        let e = random_big(&mut rng, exponent_bits as u64);

        let t0 = Instant::now();
        let (value, plan) = match variant {
            BenchVariant::SumModM => ctx.auto(&b, &e, kind),
            BenchVariant::ReduceThenCrt => ctx.auto_crt_variant(&b, &e, kind),
        };
        let dispatch_ns = t0.elapsed().as_nanos() as u64;

        let t1 = Instant::now();
        let expected = pow_mod(&b, &e, m)?;
        baseline_times.push(t1.elapsed().as_nanos() as u64);

        if value != expected {
            mismatches += 1;
        }
        let name = plan.strategy.as_str().to_string();
        *histogram.entry(name.clone()).or_insert(0) += 1;
        dispatch_times.entry(name).or_default().push(dispatch_ns);
    }

    Ok(BenchReport {
        modulus: modulus.to_factored_string(),
        seed,
        sample_count,
        exponent_bits,
        totient_kind: kind,
        variant,
        strategy_histogram: histogram,
        idempotent_crt_ns: dispatch_times
            .into_iter()
            .map(|(k, v)| (k, quantiles(v)))
            .collect(),
        baseline_ns: quantiles(baseline_times),
        mismatches,
    })
}
