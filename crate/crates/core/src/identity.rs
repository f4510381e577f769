//! The additive identity catalog for idempotents of `Z/mZ`, with literal
//! evaluation of both sides of each identity.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::arith::FactoredModulus;
use crate::error::{Error, Result};
use crate::idempotent::{enumerate_idempotents, idempotent_from_set};
use crate::index_set::IndexSet;

/// Identifier of an identity modulo `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    /// `d_I + d_{R\I} = 1`
    ComplementSum,
    /// `sum_{i in R\J} d_{R\{i}} = d_J`
    PrimitiveSum,
    /// `sum_{i=1}^r d_{R\{i}} = 1`
    TopLevelSum,
    /// `sum d_{I_i} = k - 1 + d_J` for pairwise-disjoint parts with union `J`
    DisjointUnionSum,
    /// `sum_{|J|=k} d_J = C(r-1, k)`
    LevelSum,
    /// `sum_{|J|=k-n, J subset I} d_J = C(k-1,n-1) + C(k-1,n) d_I`
    BelowNLevels,
    /// `sum_{J subseteq I} d_J = 2^{k-1}(1 + d_I)`, also `= 2^{k-1} (mod g_I)`
    SublatticeSum,
    /// `sum_{I subseteq R} d_I = 2^{r-1}`
    AllIdempotentSum,
    /// odd `m`: `d_I + d_J` idempotent iff `d_I + d_J = d_{I n J}`
    OddSumIdempotentCriterion,
}

pub const ALL_IDENTITIES: [IdentityId; 9] = [
    IdentityId::ComplementSum,
    IdentityId::PrimitiveSum,
    IdentityId::TopLevelSum,
    IdentityId::DisjointUnionSum,
    IdentityId::LevelSum,
    IdentityId::BelowNLevels,
    IdentityId::SublatticeSum,
    IdentityId::AllIdempotentSum,
    IdentityId::OddSumIdempotentCriterion,
];

impl IdentityId {
    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::ComplementSum => "COMPLEMENT_SUM",
            IdentityId::PrimitiveSum => "PRIMITIVE_SUM",
            IdentityId::TopLevelSum => "TOP_LEVEL_SUM",
            IdentityId::DisjointUnionSum => "DISJOINT_UNION_SUM",
            IdentityId::LevelSum => "LEVEL_SUM",
            IdentityId::BelowNLevels => "BELOW_N_LEVELS",
            IdentityId::SublatticeSum => "SUBLATTICE_SUM",
            IdentityId::AllIdempotentSum => "ALL_IDEMPOTENT_SUM",
            IdentityId::OddSumIdempotentCriterion => "ODD_SUM_IDEMPOTENT_CRITERION",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_IDENTITIES
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity `{}`", s)))
    }
}

/// Parameters for [`verify_identity`] and the generalized catalog; each
/// identity reads only the fields it needs.
#[derive(Debug, Clone, Default)]
pub struct IdentityParams {
    pub set_i: Option<IndexSet>,
    pub set_j: Option<IndexSet>,
    pub parts: Option<Vec<IndexSet>>,
    pub k: Option<usize>,
    pub n: Option<usize>,
}

impl IdentityParams {
    pub fn with_i(set_i: IndexSet) -> Self {
        IdentityParams {
            set_i: Some(set_i),
            ..Default::default()
        }
    }

    pub fn with_j(set_j: IndexSet) -> Self {
        IdentityParams {
            set_j: Some(set_j),
            ..Default::default()
        }
    }

    pub fn with_k(k: usize) -> Self {
        IdentityParams {
            k: Some(k),
            ..Default::default()
        }
    }

    pub fn with_parts(parts: Vec<IndexSet>) -> Self {
        IdentityParams {
            parts: Some(parts),
            ..Default::default()
        }
    }

    pub fn with_i_n(set_i: IndexSet, n: usize) -> Self {
        IdentityParams {
            set_i: Some(set_i),
            n: Some(n),
            ..Default::default()
        }
    }

    pub fn with_i_j(set_i: IndexSet, set_j: IndexSet) -> Self {
        IdentityParams {
            set_i: Some(set_i),
            set_j: Some(set_j),
            ..Default::default()
        }
    }

    fn need_i(&self) -> Result<IndexSet> {
        self.set_i
            .ok_or_else(|| Error::BadParams("missing set I".into()))
    }

    fn need_j(&self) -> Result<IndexSet> {
        self.set_j
            .ok_or_else(|| Error::BadParams("missing set J".into()))
    }

    fn need_parts(&self) -> Result<&[IndexSet]> {
        match self.parts.as_deref() {
            Some(p) if !p.is_empty() => Ok(p),
            _ => Err(Error::BadParams("missing nonempty part list".into())),
        }
    }

    fn need_k(&self) -> Result<usize> {
        self.k.ok_or_else(|| Error::BadParams("missing k".into()))
    }

    fn need_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::BadParams("missing n".into()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        if let Some(i) = self.set_i {
            map.insert("I".into(), serde_json::json!(i.indices()));
        }
        if let Some(j) = self.set_j {
            map.insert("J".into(), serde_json::json!(j.indices()));
        }
        if let Some(parts) = &self.parts {
            let v: Vec<Vec<usize>> = parts.iter().map(|p| p.indices()).collect();
            map.insert("parts".into(), serde_json::json!(v));
        }
        if let Some(k) = self.k {
            map.insert("k".into(), serde_json::json!(k));
        }
        if let Some(n) = self.n {
            map.insert("n".into(), serde_json::json!(n));
        }
        serde_json::Value::Object(map)
    }
}

/// Outcome of one identity check: both sides evaluated literally and reduced
/// modulo the ambient modulus carried in the report.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub identity_id: String,
    pub modulus: FactoredModulus,
    pub params: serde_json::Value,
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub holds: bool,
}

impl Serialize for IdentityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IdentityReport", 6)?;
        s.serialize_field("identity_id", &self.identity_id)?;
        s.serialize_field("modulus", &self.modulus)?;
        s.serialize_field("params", &self.params)?;
        s.serialize_field("lhs", &self.lhs.to_string())?;
        s.serialize_field("rhs", &self.rhs.to_string())?;
        s.serialize_field("holds", &self.holds)?;
        s.end()
    }
}

/// Exact binomial coefficient, 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn d_value(m: &FactoredModulus, set: IndexSet) -> Result<BigUint> {
    Ok(idempotent_from_set(m, set)?.value().clone())
}

/// Evaluates both sides of the identity literally and reports whether they
/// agree modulo `m`.
pub fn verify_identity(
    modulus: &FactoredModulus,
    id: IdentityId,
    params: &IdentityParams,
) -> Result<IdentityReport> {
    let m = modulus.m();
    let r = modulus.r();
    let full = IndexSet::full(r);

    let (lhs, rhs, extra_holds) = match id {
        IdentityId::ComplementSum => {
            let i = params.need_i()?;
            i.check_range(r)?;
            let lhs = (d_value(modulus, i)? + d_value(modulus, i.complement(r))?) % m;
            (lhs, BigUint::one() % m, true)
        }
        IdentityId::PrimitiveSum => {
            let j = params.need_j()?;
            j.check_range(r)?;
            let mut lhs = BigUint::ZERO;
            for i in j.complement(r).indices() {
                lhs += d_value(modulus, full.remove(i))?;
            }
            (lhs % m, d_value(modulus, j)?, true)
        }
        IdentityId::TopLevelSum => {
            let mut lhs = BigUint::ZERO;
            for i in 1..=r {
                lhs += d_value(modulus, full.remove(i))?;
            }
            (lhs % m, BigUint::one() % m, true)
        }
        IdentityId::DisjointUnionSum => {
            let parts = params.need_parts()?;
            let mut union = IndexSet::EMPTY;
            for (a, part) in parts.iter().enumerate() {
                part.check_range(r)?;
                for other in &parts[..a] {
                    if !part.is_disjoint(*other) {
                        return Err(Error::BadParams(format!(
                            "parts {} and {} are not disjoint",
                            other, part
                        )));
                    }
                }
                union = union.union(*part);
            }
            let mut lhs = BigUint::ZERO;
            for part in parts {
                lhs += d_value(modulus, *part)?;
            }
            let rhs = (BigUint::from(parts.len() as u64 - 1) + d_value(modulus, union)?) % m;
            (lhs % m, rhs, true)
        }
        IdentityId::LevelSum => {
            let k = params.need_k()?;
            if k >= r {
                return Err(Error::BadParams(format!("k = {} must be below r = {}", k, r)));
            }
            let mut lhs = BigUint::ZERO;
            for j in IndexSet::level_sets(r, k) {
                lhs += d_value(modulus, j)?;
            }
            (lhs % m, binomial(r as u64 - 1, k as u64) % m, true)
        }
        IdentityId::BelowNLevels => {
            let i = params.need_i()?;
            let n = params.need_n()?;
            i.check_range(r)?;
            let k = i.len();
            if n == 0 || n >= k {
                return Err(Error::BadParams(format!(
                    "n = {} must satisfy 0 < n < |I| = {}",
                    n, k
                )));
            }
            let mut lhs = BigUint::ZERO;
            for j in i.subsets() {
                if j.len() == k - n {
                    lhs += d_value(modulus, j)?;
                }
            }
            let rhs = (binomial(k as u64 - 1, n as u64 - 1)
                + binomial(k as u64 - 1, n as u64) * d_value(modulus, i)?)
                % m;
            (lhs % m, rhs, true)
        }
        IdentityId::SublatticeSum => {
            let i = params.need_i()?;
            i.check_range(r)?;
            let k = i.len();
            if k == 0 {
                return Err(Error::BadParams("|I| must be at least 1".into()));
            }
            let mut lhs = BigUint::ZERO;
            for j in i.subsets() {
                lhs += d_value(modulus, j)?;
            }
            let di = idempotent_from_set(modulus, i)?;
            let pow2 = BigUint::one() << (k - 1);
            let rhs = (&pow2 * (BigUint::one() + di.value())) % m;
            // corollary: the same sum is 2^{k-1} (mod g_I)
            let corollary = (&lhs % di.g()) == (&pow2 % di.g());
            (lhs % m, rhs, corollary)
        }
        IdentityId::AllIdempotentSum => {
            let mut lhs = BigUint::ZERO;
            for d in enumerate_idempotents(modulus)? {
                lhs += d.value();
            }
            let rhs = (BigUint::one() << (r - 1)) % m;
            (lhs % m, rhs, true)
        }
        IdentityId::OddSumIdempotentCriterion => {
            if (m % 2u32).is_zero() {
                return Err(Error::BadParams("criterion requires odd m".into()));
            }
            let i = params.need_i()?;
            let j = params.need_j()?;
            i.check_range(r)?;
            j.check_range(r)?;
            let sum = (d_value(modulus, i)? + d_value(modulus, j)?) % m;
            let is_idempotent = (&sum * &sum) % m == sum;
            let matches_meet = sum == d_value(modulus, i.intersection(j))?;
            (
                BigUint::from(is_idempotent as u32),
                BigUint::from(matches_meet as u32),
                true,
            )
        }
    };

    Ok(IdentityReport {
        identity_id: id.to_string(),
        modulus: modulus.clone(),
        params: params.to_json(),
        holds: lhs == rhs && extra_holds,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, factorize};

    fn fm(n: u64) -> FactoredModulus {
        factorize(&big(n)).unwrap()
    }

    fn set(indices: &[usize]) -> IndexSet {
        IndexSet::from_indices(indices.iter().copied()).unwrap()
    }

    fn check(m: u64, id: IdentityId, params: IdentityParams) -> IdentityReport {
        verify_identity(&fm(m), id, &params).unwrap()
    }

    #[test]
    fn level_sum_m30() {
        // oracle values mod 30: level 1 = {16, 21, 25}, 16+21+25 = 62 = 2
        let rep = check(30, IdentityId::LevelSum, IdentityParams::with_k(1));
        assert_eq!(rep.lhs, big(2));
        assert_eq!(rep.rhs, big(2));
        assert!(rep.holds);
    }

    #[test]
    fn top_level_sum_m30() {
        // 6 + 10 + 15 = 31 = 1 (mod 30)
        let rep = check(30, IdentityId::TopLevelSum, IdentityParams::default());
        assert_eq!(rep.lhs, big(1));
        assert!(rep.holds);
    }

    #[test]
    fn complement_sum_empty_set() {
        for m in [12u64, 30, 97] {
            let rep = check(m, IdentityId::ComplementSum, IdentityParams::with_i(IndexSet::EMPTY));
            assert_eq!(rep.lhs, big(1));
            assert!(rep.holds);
        }
    }

    #[test]
    fn sublattice_sum_m30() {
        // 1 + 16 + 21 + 6 = 44 = 14; rhs 2(1+6) = 14
        let rep = check(30, IdentityId::SublatticeSum, IdentityParams::with_i(set(&[1, 2])));
        assert_eq!(rep.lhs, big(14));
        assert_eq!(rep.rhs, big(14));
        assert!(rep.holds);
    }

    #[test]
    fn catalog_holds_everywhere_small() {
        // every identity, all valid params, a few moduli
        for m in [12u64, 30, 105, 210] {
            let modulus = fm(m);
            let r = modulus.r();
            for i_bits in 0..(1u64 << r) {
                let i = IndexSet::from_bits(i_bits);
                assert!(check(m, IdentityId::ComplementSum, IdentityParams::with_i(i)).holds);
                assert!(check(m, IdentityId::PrimitiveSum, IdentityParams::with_j(i)).holds);
                if !i.is_empty() {
                    assert!(check(m, IdentityId::SublatticeSum, IdentityParams::with_i(i)).holds);
                }
                for n in 1..i.len() {
                    assert!(check(m, IdentityId::BelowNLevels, IdentityParams::with_i_n(i, n)).holds);
                }
                if m % 2 == 1 {
                    for j_bits in 0..(1u64 << r) {
                        let j = IndexSet::from_bits(j_bits);
                        assert!(check(
                            m,
                            IdentityId::OddSumIdempotentCriterion,
                            IdentityParams::with_i_j(i, j)
                        )
                        .holds);
                    }
                }
            }
            for k in 0..r {
                assert!(check(m, IdentityId::LevelSum, IdentityParams::with_k(k)).holds);
            }
            assert!(check(m, IdentityId::TopLevelSum, IdentityParams::default()).holds);
            assert!(check(m, IdentityId::AllIdempotentSum, IdentityParams::default()).holds);
        }
    }

    #[test]
    fn disjoint_union_sum() {
        let rep = check(
            30,
            IdentityId::DisjointUnionSum,
            IdentityParams::with_parts(vec![set(&[1]), set(&[2]), set(&[3])]),
        );
        assert!(rep.holds);
        // overlapping parts rejected
        let err = verify_identity(
            &fm(30),
            IdentityId::DisjointUnionSum,
            &IdentityParams::with_parts(vec![set(&[1, 2]), set(&[2])]),
        );
        assert!(matches!(err, Err(Error::BadParams(_))));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(matches!(
            verify_identity(&fm(30), IdentityId::LevelSum, &IdentityParams::with_k(3)),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            verify_identity(
                &fm(30),
                IdentityId::BelowNLevels,
                &IdentityParams::with_i_n(set(&[1, 2]), 2)
            ),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            verify_identity(
                &fm(12),
                IdentityId::OddSumIdempotentCriterion,
                &IdentityParams::with_i_j(set(&[1]), set(&[2]))
            ),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            verify_identity(&fm(30), IdentityId::ComplementSum, &IdentityParams::default()),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn odd_sum_criterion_matches_direct_squaring() {
        // for odd m: d_I + d_J is idempotent iff I u J = R
        for m in [15u64, 105, 1155] {
            let modulus = fm(m);
            let r = modulus.r();
            for i_bits in 0..(1u64 << r) {
                for j_bits in 0..(1u64 << r) {
                    let i = IndexSet::from_bits(i_bits);
                    let j = IndexSet::from_bits(j_bits);
                    let di = idempotent_from_set(&modulus, i).unwrap();
                    let dj = idempotent_from_set(&modulus, j).unwrap();
                    let s = (di.value() + dj.value()) % modulus.m();
                    let is_idem = (&s * &s) % modulus.m() == s;
                    assert_eq!(is_idem, i.union(j) == IndexSet::full(r), "m={} I={} J={}", m, i, j);
                }
            }
        }
    }

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(0, 0), big(1));
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(4, 5), BigUint::ZERO);
        assert_eq!(binomial(60, 30), "118264581564861424".parse().unwrap());
    }
}
