//! Construction and combination of the idempotents of `Z/mZ`.
//!
//! Every idempotent is determined by the subset `I` of prime-power indices on
//! which it vanishes: `d_I = 0 (mod p_i^{e_i})` for `i` in `I` and
//! `d_I = 1 (mod p_j^{e_j})` otherwise. There are exactly `2^r` of them.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{crt_combine, FactoredModulus};
use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// Cap on `r` for full `2^r` enumeration.
pub const ENUMERATION_CAP_R: usize = 24;

/// The canonical (least nonnegative) idempotent `d_I` of `Z/mZ`, together
/// with its defining index set and `g_I = gcd(d_I, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Idempotent {
    modulus: FactoredModulus,
    set: IndexSet,
    value: BigUint,
    g: BigUint,
}

impl Idempotent {
    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn set(&self) -> IndexSet {
        self.set
    }

    /// The residue `d_I` in `[0, m)`.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// `g_I = gcd(d_I, m)`, the product of the prime powers indexed by `I`.
    pub fn g(&self) -> &BigUint {
        &self.g
    }

    /// The cofactor `a_I = d_I / g_I`, coprime to `m / g_I`.
    pub fn cofactor(&self) -> BigUint {
        &self.value / &self.g
    }

    /// True when `|I| = r - 1`, i.e. the row directly below 0 in the lattice.
    pub fn is_top_level(&self) -> bool {
        self.set.len() + 1 == self.modulus.r()
    }

    pub(crate) fn check_same_modulus(&self, other: &Idempotent) -> Result<()> {
        if self.modulus.m() != other.modulus.m() {
            return Err(Error::MixedModuli {
                left: self.modulus.m().to_string(),
                right: other.modulus.m().to_string(),
            });
        }
        Ok(())
    }
}

impl Serialize for Idempotent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Idempotent", 3)?;
        s.serialize_field("I", &self.set.indices())?;
        s.serialize_field("d", &self.value.to_string())?;
        s.serialize_field("g", &self.g.to_string())?;
        s.end()
    }
}

/// Builds `d_I` by CRT from the congruence pattern (0 on `I`, 1 off `I`).
/// `I = {}` gives 1 and `I = R` gives 0.
pub fn idempotent_from_set(modulus: &FactoredModulus, set: IndexSet) -> Result<Idempotent> {
    let r = modulus.r();
    set.check_range(r)?;
    let mut residues = Vec::with_capacity(r);
    let mut g = BigUint::one();
    for i in 1..=r {
        let q = modulus.prime_power(i);
        if set.contains(i) {
            g *= &q;
            residues.push((BigUint::ZERO, q));
        } else {
            residues.push((BigUint::one(), q));
        }
    }
    let value = crt_combine(&residues).expect("prime powers are pairwise coprime");
    debug_assert_eq!(value.gcd(modulus.m()), g);
    Ok(Idempotent {
        modulus: modulus.clone(),
        set,
        value,
        g,
    })
}

/// All `2^r` idempotents, in ascending-bitmask subset order.
pub fn enumerate_idempotents(modulus: &FactoredModulus) -> Result<Vec<Idempotent>> {
    let r = modulus.r();
    if r > ENUMERATION_CAP_R {
        return Err(Error::CapExceeded {
            what: "2^r idempotent enumeration",
            value: r.to_string(),
            cap: ENUMERATION_CAP_R as u64,
        });
    }
    (0..(1u64 << r))
        .map(|bits| idempotent_from_set(modulus, IndexSet::from_bits(bits)))
        .collect()
}

/// The dual idempotent `d_{R \ I} = (1 - d_I) mod m`.
pub fn complement(d: &Idempotent) -> Idempotent {
    let m = d.modulus.m();
    let value = (m + 1u32 - &d.value) % m;
    Idempotent {
        modulus: d.modulus.clone(),
        set: d.set.complement(d.modulus.r()),
        value,
        g: m / &d.g,
    }
}

/// Product of idempotents: `prod d_I = d_{union I} (mod m)`.
pub fn multiply(ds: &[Idempotent]) -> Result<Idempotent> {
    let first = ds
        .first()
        .ok_or_else(|| Error::BadParams("multiply needs a nonempty list".into()))?;
    let mut union = IndexSet::EMPTY;
    for d in ds {
        first.check_same_modulus(d)?;
        union = union.union(d.set);
    }
    let result = idempotent_from_set(&first.modulus, union)?;
    debug_assert_eq!(
        ds.iter().fold(BigUint::one(), |acc, d| acc * &d.value) % first.modulus.m(),
        result.value
    );
    Ok(result)
}

/// Decomposes a sum: `d_I + d_J = d_{I u J} + d_{I n J} (mod m)`.
pub fn add_decompose(di: &Idempotent, dj: &Idempotent) -> Result<(Idempotent, Idempotent)> {
    di.check_same_modulus(dj)?;
    let u = idempotent_from_set(&di.modulus, di.set.union(dj.set))?;
    let n = idempotent_from_set(&di.modulus, di.set.intersection(dj.set))?;
    debug_assert_eq!(
        (&di.value + &dj.value) % di.modulus.m(),
        (&u.value + &n.value) % di.modulus.m()
    );
    Ok((u, n))
}

/// `(d_J - d_I) mod m`, which equals `d_J + d_{R \ I} - 1 (mod m)`.
pub fn subtract(dj: &Idempotent, di: &Idempotent) -> Result<BigUint> {
    dj.check_same_modulus(di)?;
    let m = dj.modulus.m();
    let diff = (m + &dj.value - &di.value) % m;
    debug_assert_eq!(
        diff,
        (&dj.value + complement(di).value + m - 1u32) % m
    );
    Ok(diff)
}
