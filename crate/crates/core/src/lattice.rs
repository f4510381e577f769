//! The idempotent lattice of `Z/mZ`, finite consistent sublattices of the
//! divisibility lattice, and the generalized identity catalog modulo `g_S`.
//!
//! The order has two equivalent faces: `d_I <= d_J` iff `I` is a subset of
//! `J` iff `g_I | g_J`, with join/meet realized by set union/intersection on
//! the index side and lcm/gcd on the divisor side.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::arith::FactoredModulus;
use crate::error::{Error, Result};
use crate::idempotent::{idempotent_from_set, Idempotent, ENUMERATION_CAP_R};
use crate::identity::{binomial, IdentityParams, IdentityReport};
use crate::index_set::IndexSet;

/// `d_I <= d_J`, i.e. `I` is a subset of `J`.
pub fn leq(di: &Idempotent, dj: &Idempotent) -> Result<bool> {
    di.check_same_modulus(dj)?;
    let by_set = di.set().is_subset(dj.set());
    debug_assert_eq!(by_set, dj.g().is_multiple_of(di.g()));
    Ok(by_set)
}

/// Join `d_I v d_J = d_{I u J}`; its `g` is `lcm(g_I, g_J)`.
pub fn join(di: &Idempotent, dj: &Idempotent) -> Result<Idempotent> {
    di.check_same_modulus(dj)?;
    let out = idempotent_from_set(di.modulus(), di.set().union(dj.set()))?;
    debug_assert_eq!(*out.g(), di.g().lcm(dj.g()));
    Ok(out)
}

/// Meet `d_I ^ d_J = d_{I n J}`; its `g` is `gcd(g_I, g_J)`.
pub fn meet(di: &Idempotent, dj: &Idempotent) -> Result<Idempotent> {
    di.check_same_modulus(dj)?;
    let out = idempotent_from_set(di.modulus(), di.set().intersection(dj.set()))?;
    debug_assert_eq!(*out.g(), di.g().gcd(dj.g()));
    Ok(out)
}

/// All `C(r, k)` idempotents at level `k` (those with `|I| = k`), in
/// ascending bitmask order. Level `r - 1` is the top level.
pub fn level(modulus: &FactoredModulus, k: usize) -> Result<Vec<Idempotent>> {
    let r = modulus.r();
    if k > r {
        return Err(Error::LevelOutOfRange { k, r });
    }
    IndexSet::level_sets(r, k)
        .into_iter()
        .map(|s| idempotent_from_set(modulus, s))
        .collect()
}

/// A finite consistent sublattice `L_{m,S,T}` of the divisibility lattice:
/// its elements are exactly the divisors `g_K` for `T subseteq K subseteq S`,
/// with infimum `g_T` and supremum `g_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistentLattice {
    modulus: FactoredModulus,
    set_s: IndexSet,
    set_t: IndexSet,
    g_s: BigUint,
    g_t: BigUint,
}

fn g_of(modulus: &FactoredModulus, set: IndexSet) -> BigUint {
    set.indices()
        .into_iter()
        .map(|i| modulus.prime_power(i))
        .product()
}

/// Builds `L_{m,S,T}`; requires `T subseteq S subseteq {1..r}`.
pub fn consistent_lattice(
    modulus: &FactoredModulus,
    set_s: IndexSet,
    set_t: IndexSet,
) -> Result<ConsistentLattice> {
    set_s.check_range(modulus.r())?;
    set_t.check_range(modulus.r())?;
    if !set_t.is_subset(set_s) {
        return Err(Error::NotNested);
    }
    Ok(ConsistentLattice {
        g_s: g_of(modulus, set_s),
        g_t: g_of(modulus, set_t),
        modulus: modulus.clone(),
        set_s,
        set_t,
    })
}

impl ConsistentLattice {
    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn set_s(&self) -> IndexSet {
        self.set_s
    }

    pub fn set_t(&self) -> IndexSet {
        self.set_t
    }

    pub fn g_s(&self) -> &BigUint {
        &self.g_s
    }

    pub fn g_t(&self) -> &BigUint {
        &self.g_t
    }

    /// All index sets `K` with `T subseteq K subseteq S`, ascending bitmask.
    pub fn element_sets(&self) -> Result<Vec<IndexSet>> {
        let free = self.set_s.difference(self.set_t);
        if free.len() > ENUMERATION_CAP_R {
            return Err(Error::CapExceeded {
                what: "consistent-lattice enumeration",
                value: free.len().to_string(),
                cap: ENUMERATION_CAP_R as u64,
            });
        }
        Ok(free.subsets().map(|sub| self.set_t.union(sub)).collect())
    }

    /// `g_S` restricted to its own factorization, usable as an ambient
    /// modulus for the generalized identities. Requires `S` nonempty.
    pub fn g_s_modulus(&self) -> Result<FactoredModulus> {
        if self.set_s.is_empty() {
            return Err(Error::BadParams(
                "S is empty, so g_S = 1 cannot serve as a modulus".into(),
            ));
        }
        let factors = self
            .set_s
            .indices()
            .into_iter()
            .map(|i| (self.modulus.prime(i).clone(), self.modulus.exponent(i)))
            .collect();
        FactoredModulus::from_factors(factors)
    }
}

/// The pairs `(K, g_K)` of `L`, ascending bitmask order. The output is
/// closed under gcd and lcm, with minimum `g_T` and maximum `g_S`.
pub fn lattice_elements(lattice: &ConsistentLattice) -> Result<Vec<(IndexSet, BigUint)>> {
    Ok(lattice
        .element_sets()?
        .into_iter()
        .map(|k| (k, g_of(lattice.modulus(), k)))
        .collect())
}

/// Identifier of a generalized identity modulo `g_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenIdentityId {
    /// `prod d_I = d_{union I} (mod g_S)`
    GenProduct,
    /// `d_I + d_J = d_{I u J} + d_{I n J} (mod g_S)`
    GenUnionSum,
    /// `sum d_{I_i} = (k-1) d_T + d_J (mod g_S)` for parts meeting exactly in `T`
    GenDisjointSum,
    /// `d_I + d_{S \ (I \ T)} = d_T (mod g_S)`
    GenDualSum,
    /// `sum_{i in I\T} d_{S\{i}} = d_{S \ (I \ T)} (mod g_S)`
    GenSubsetSum,
    /// `sum_{i in S\J} d_{S\{i}} = d_J (mod g_S)`
    GenPrimitiveSum,
    /// `sum_{|J|=k} d_J = C(s-t-1, k-t) d_T (mod g_S)`
    GenLevelSum,
    /// `sum_{|J|=k-n, T < J < I} d_J = C(k-t-1,n-1) d_T + C(k-t-1,n) d_I (mod g_S)`
    GenBelowNLevels,
    /// `sum_{T <= J <= I} d_J = 2^{k-t-1}(d_T + d_I) (mod g_S)`, also
    /// `= 2^{k-t-1} d_T (mod g_I)`
    GenSublatticeSum,
}

pub const ALL_GEN_IDENTITIES: [GenIdentityId; 9] = [
    GenIdentityId::GenProduct,
    GenIdentityId::GenUnionSum,
    GenIdentityId::GenDisjointSum,
    GenIdentityId::GenDualSum,
    GenIdentityId::GenSubsetSum,
    GenIdentityId::GenPrimitiveSum,
    GenIdentityId::GenLevelSum,
    GenIdentityId::GenBelowNLevels,
    GenIdentityId::GenSublatticeSum,
];

impl GenIdentityId {
    pub fn as_str(self) -> &'static str {
        match self {
            GenIdentityId::GenProduct => "GEN_PRODUCT",
            GenIdentityId::GenUnionSum => "GEN_UNION_SUM",
            GenIdentityId::GenDisjointSum => "GEN_DISJOINT_SUM",
            GenIdentityId::GenDualSum => "GEN_DUAL_SUM",
            GenIdentityId::GenSubsetSum => "GEN_SUBSET_SUM",
            GenIdentityId::GenPrimitiveSum => "GEN_PRIMITIVE_SUM",
            GenIdentityId::GenLevelSum => "GEN_LEVEL_SUM",
            GenIdentityId::GenBelowNLevels => "GEN_BELOW_N_LEVELS",
            GenIdentityId::GenSublatticeSum => "GEN_SUBLATTICE_SUM",
        }
    }
}

impl fmt::Display for GenIdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenIdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_GEN_IDENTITIES
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown generalized identity `{}`", s)))
    }
}

/// Checks that `T subseteq K subseteq S`.
fn check_in_lattice(l: &ConsistentLattice, k: IndexSet, name: &str) -> Result<()> {
    if !l.set_t.is_subset(k) || !k.is_subset(l.set_s) {
        return Err(Error::BadParams(format!(
            "{} = {} must satisfy T = {} subseteq {} subseteq S = {}",
            name, k, l.set_t, name, l.set_s
        )));
    }
    Ok(())
}

/// Evaluates both sides of a generalized identity. Idempotents are taken
/// modulo the full `m` and both sides are reduced modulo `g_S` at the end,
/// mirroring how the congruences descend from `m` to its divisor `g_S`.
pub fn verify_general_identity(
    lattice: &ConsistentLattice,
    id: GenIdentityId,
    params: &IdentityParams,
) -> Result<IdentityReport> {
    let modulus = lattice.modulus();
    let m = modulus.m();
    let s = lattice.set_s;
    let t = lattice.set_t;
    let s_len = s.len();
    let t_len = t.len();
    let g_s_modulus = lattice.g_s_modulus()?;
    let g_s = &lattice.g_s;

    let d = |set: IndexSet| -> Result<BigUint> {
        Ok(idempotent_from_set(modulus, set)?.value().clone())
    };
    let d_t = d(t)?;

    // between(lo, hi): all J with lo subseteq J subseteq hi, ascending
    let between = |lo: IndexSet, hi: IndexSet| -> Vec<IndexSet> {
        hi.difference(lo).subsets().map(|x| lo.union(x)).collect()
    };

    let (lhs, rhs, extra_holds) = match id {
        GenIdentityId::GenProduct => {
            let parts = params
                .parts
                .as_deref()
                .filter(|p| !p.is_empty())
                .ok_or_else(|| Error::BadParams("missing nonempty part list".into()))?;
            let mut union = IndexSet::EMPTY;
            let mut lhs = BigUint::one();
            for part in parts {
                check_in_lattice(lattice, *part, "I")?;
                union = union.union(*part);
                lhs = lhs * d(*part)? % m;
            }
            (lhs, d(union)?, true)
        }
        GenIdentityId::GenUnionSum => {
            let i = params
                .set_i
                .ok_or_else(|| Error::BadParams("missing set I".into()))?;
            let j = params
                .set_j
                .ok_or_else(|| Error::BadParams("missing set J".into()))?;
            check_in_lattice(lattice, i, "I")?;
            check_in_lattice(lattice, j, "J")?;
            let lhs = d(i)? + d(j)?;
            let rhs = d(i.union(j))? + d(i.intersection(j))?;
            (lhs, rhs, true)
        }
        GenIdentityId::GenDisjointSum => {
            let parts = params
                .parts
                .as_deref()
                .filter(|p| !p.is_empty())
                .ok_or_else(|| Error::BadParams("missing nonempty part list".into()))?;
            let mut union = IndexSet::EMPTY;
            for (a, part) in parts.iter().enumerate() {
                check_in_lattice(lattice, *part, "I")?;
                for other in &parts[..a] {
                    if part.intersection(*other) != t {
                        return Err(Error::BadParams(format!(
                            "parts {} and {} must intersect exactly in T = {}",
                            other, part, t
                        )));
                    }
                }
                union = union.union(*part);
            }
            let mut lhs = BigUint::ZERO;
            for part in parts {
                lhs += d(*part)?;
            }
            let rhs = BigUint::from(parts.len() as u64 - 1) * &d_t + d(union)?;
            (lhs, rhs, true)
        }
        GenIdentityId::GenDualSum => {
            let i = params
                .set_i
                .ok_or_else(|| Error::BadParams("missing set I".into()))?;
            check_in_lattice(lattice, i, "I")?;
            let dual = s.difference(i.difference(t));
            (d(i)? + d(dual)?, d_t.clone(), true)
        }
        GenIdentityId::GenSubsetSum => {
            let i = params
                .set_i
                .ok_or_else(|| Error::BadParams("missing set I".into()))?;
            check_in_lattice(lattice, i, "I")?;
            if i == t {
                return Err(Error::BadParams("I must strictly contain T".into()));
            }
            let mut lhs = BigUint::ZERO;
            for idx in i.difference(t).indices() {
                lhs += d(s.remove(idx))?;
            }
            (lhs, d(s.difference(i.difference(t)))?, true)
        }
        GenIdentityId::GenPrimitiveSum => {
            let j = params
                .set_j
                .ok_or_else(|| Error::BadParams("missing set J".into()))?;
            check_in_lattice(lattice, j, "J")?;
            if j == s {
                return Err(Error::BadParams("J must be a proper subset of S".into()));
            }
            let mut lhs = BigUint::ZERO;
            for idx in s.difference(j).indices() {
                lhs += d(s.remove(idx))?;
            }
            (lhs, d(j)?, true)
        }
        GenIdentityId::GenLevelSum => {
            let k = params
                .k
                .ok_or_else(|| Error::BadParams("missing k".into()))?;
            if k < t_len || k >= s_len {
                return Err(Error::BadParams(format!(
                    "k = {} must satisfy t = {} <= k < s = {}",
                    k, t_len, s_len
                )));
            }
            let mut lhs = BigUint::ZERO;
            for j in between(t, s) {
                if j.len() == k {
                    lhs += d(j)?;
                }
            }
            let rhs = binomial((s_len - t_len - 1) as u64, (k - t_len) as u64) * &d_t;
            (lhs, rhs, true)
        }
        GenIdentityId::GenBelowNLevels => {
            let i = params
                .set_i
                .ok_or_else(|| Error::BadParams("missing set I".into()))?;
            let n = params
                .n
                .ok_or_else(|| Error::BadParams("missing n".into()))?;
            check_in_lattice(lattice, i, "I")?;
            if i == t || i == s {
                return Err(Error::BadParams(
                    "I must lie strictly between T and S".into(),
                ));
            }
            let k = i.len();
            if n == 0 || n >= k - t_len {
                return Err(Error::BadParams(format!(
                    "n = {} must satisfy 0 < n < k - t = {}",
                    n,
                    k - t_len
                )));
            }
            let mut lhs = BigUint::ZERO;
            for j in between(t, i) {
                if j.len() == k - n {
                    lhs += d(j)?;
                }
            }
            let kt = (k - t_len - 1) as u64;
            let rhs = binomial(kt, n as u64 - 1) * &d_t + binomial(kt, n as u64) * d(i)?;
            (lhs, rhs, true)
        }
        GenIdentityId::GenSublatticeSum => {
            let i = params
                .set_i
                .ok_or_else(|| Error::BadParams("missing set I".into()))?;
            check_in_lattice(lattice, i, "I")?;
            let k = i.len();
            if k == t_len {
                return Err(Error::BadParams("I must strictly contain T".into()));
            }
            let mut lhs = BigUint::ZERO;
            for j in between(t, i) {
                lhs += d(j)?;
            }
            let di = idempotent_from_set(modulus, i)?;
            let pow2 = BigUint::one() << (k - t_len - 1);
            let rhs = &pow2 * (&d_t + di.value());
            // corollary: same sum is 2^{k-t-1} d_T (mod g_I)
            let corollary = (&lhs % di.g()) == (pow2 * &d_t) % di.g();
            (lhs, rhs, corollary)
        }
    };

    let lhs = lhs % m % g_s;
    let rhs = rhs % m % g_s;
    let mut params_json = params.to_json();
    if let serde_json::Value::Object(map) = &mut params_json {
        map.insert("S".into(), serde_json::json!(s.indices()));
        map.insert("T".into(), serde_json::json!(t.indices()));
    }
    Ok(IdentityReport {
        identity_id: id.to_string(),
        modulus: g_s_modulus,
        params: params_json,
        holds: lhs == rhs && extra_holds,
        lhs,
        rhs,
    })
}

/// Node label style for lattice exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelStyle {
    /// Divisor labels `g_K`.
    G,
    /// Idempotent labels `d_K`.
    D,
}

fn dot_label(modulus: &FactoredModulus, k: IndexSet, style: LabelStyle) -> Result<String> {
    Ok(match style {
        LabelStyle::G => g_of(modulus, k).to_string(),
        LabelStyle::D => idempotent_from_set(modulus, k)?.value().to_string(),
    })
}

fn hasse_dot(
    name: &str,
    modulus: &FactoredModulus,
    sets: &[IndexSet],
    style: LabelStyle,
) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", name).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    for &k in sets {
        writeln!(
            out,
            "  n{} [label=\"{}\"];",
            k.bits(),
            dot_label(modulus, k, style)?
        )
        .unwrap();
    }
    // cover edges: sets one element apart
    for &a in sets {
        for &b in sets {
            if a.is_subset(b) && b.len() == a.len() + 1 {
                writeln!(out, "  n{} -> n{};", a.bits(), b.bits()).unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
    Ok(out)
}

/// DOT Hasse diagram of the full idempotent lattice of `Z/mZ`.
pub fn idempotent_lattice_dot(modulus: &FactoredModulus, style: LabelStyle) -> Result<String> {
    let r = modulus.r();
    if r > ENUMERATION_CAP_R {
        return Err(Error::CapExceeded {
            what: "lattice DOT export",
            value: r.to_string(),
            cap: ENUMERATION_CAP_R as u64,
        });
    }
    let sets: Vec<IndexSet> = IndexSet::full(r).subsets().collect();
    hasse_dot("idempotent_lattice", modulus, &sets, style)
}

/// DOT Hasse diagram of a consistent sublattice.
pub fn consistent_lattice_dot(lattice: &ConsistentLattice, style: LabelStyle) -> Result<String> {
    let sets = lattice.element_sets()?;
    hasse_dot("consistent_lattice", lattice.modulus(), &sets, style)
}

/// JSON form of a consistent sublattice: `S`, `T`, `g_S`, `g_T` and the
/// element list, big integers as decimal strings.
pub fn consistent_lattice_json(lattice: &ConsistentLattice) -> Result<serde_json::Value> {
    let elements: Vec<serde_json::Value> = lattice_elements(lattice)?
        .into_iter()
        .map(|(k, g)| serde_json::json!({"K": k.indices(), "g": g.to_string()}))
        .collect();
    Ok(serde_json::json!({
        "m": lattice.modulus().m().to_string(),
        "S": lattice.set_s().indices(),
        "T": lattice.set_t().indices(),
        "g_S": lattice.g_s().to_string(),
        "g_T": lattice.g_t().to_string(),
        "elements": elements,
    }))
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

    fn idem(m: u64, indices: &[usize]) -> Idempotent {
        idempotent_from_set(&fm(m), set(indices)).unwrap()
    }

    #[test]
    fn meet_join_leq_examples() {
        let d1 = idem(30, &[1]); // 16
        let d2 = idem(30, &[2]); // 21
        assert_eq!(join(&d1, &d2).unwrap().value(), &big(6));
        assert_eq!(meet(&d1, &d2).unwrap().value(), &big(1));

        assert_eq!(join(&d1, &d1).unwrap(), d1);
        assert_eq!(meet(&d1, &d1).unwrap(), d1);
        assert!(leq(&d1, &d1).unwrap());

        let d12 = idem(30, &[1, 2]); // 6
        assert!(leq(&d1, &d12).unwrap());
        assert!(!leq(&d12, &d1).unwrap());

        let foreign = idem(12, &[1]);
        assert!(matches!(leq(&d1, &foreign), Err(Error::MixedModuli { .. })));
    }

    #[test]
    fn level_examples() {
        let vals = |k: usize| -> Vec<u64> {
            let mut v: Vec<u64> = level(&fm(30), k)
                .unwrap()
                .iter()
                .map(|d| d.value().try_into().unwrap())
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(vals(2), vec![6, 10, 15]);
        assert_eq!(vals(0), vec![1]);
        assert_eq!(vals(1), vec![16, 21, 25]);
        assert!(level(&fm(30), 2).unwrap().iter().all(|d| d.is_top_level()));
        assert!(level(&fm(30), 4).is_err());
    }

    #[test]
    fn consistent_lattice_examples() {
        let l = consistent_lattice(&fm(30), set(&[1, 2, 3]), set(&[1])).unwrap();
        assert_eq!(l.g_s(), &big(30));
        assert_eq!(l.g_t(), &big(2));
        let gs: Vec<u64> = lattice_elements(&l)
            .unwrap()
            .iter()
            .map(|(_, g)| g.try_into().unwrap())
            .collect();
        let mut sorted = gs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![2, 6, 10, 30]);

        let l2 = consistent_lattice(&fm(30), set(&[1, 2]), IndexSet::EMPTY).unwrap();
        let mut gs2: Vec<u64> = lattice_elements(&l2)
            .unwrap()
            .iter()
            .map(|(_, g)| g.try_into().unwrap())
            .collect();
        gs2.sort_unstable();
        assert_eq!(gs2, vec![1, 2, 3, 6]);

        let l3 = consistent_lattice(&fm(12), set(&[1, 2]), IndexSet::EMPTY).unwrap();
        let mut gs3: Vec<u64> = lattice_elements(&l3)
            .unwrap()
            .iter()
            .map(|(_, g)| g.try_into().unwrap())
            .collect();
        gs3.sort_unstable();
        assert_eq!(gs3, vec![1, 3, 4, 12]);

        // degenerate S = T
        let l4 = consistent_lattice(&fm(30), set(&[2]), set(&[2])).unwrap();
        let e = lattice_elements(&l4).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].1, big(3));

        assert!(matches!(
            consistent_lattice(&fm(30), set(&[1]), set(&[2])),
            Err(Error::NotNested)
        ));
    }

    #[test]
    fn lattice_elements_gcd_lcm_closed() {
        let l = consistent_lattice(&fm(2310), set(&[1, 2, 3, 4, 5]), set(&[2])).unwrap();
        let els = lattice_elements(&l).unwrap();
        assert_eq!(els.len(), 1 << 4);
        let values: Vec<&BigUint> = els.iter().map(|(_, g)| g).collect();
        for a in &values {
            for b in &values {
                assert!(values.contains(&&a.gcd(b)));
                assert!(values.contains(&&a.lcm(b)));
            }
        }
        assert_eq!(values.iter().min().unwrap(), &l.g_t());
        assert_eq!(values.iter().max().unwrap(), &l.g_s());
    }

    #[test]
    fn gen_dual_sum_m30() {
        // S = R, T = {1}, I = {1,2}: 6 + 10 = 16 = d_T (mod 30)
        let l = consistent_lattice(&fm(30), set(&[1, 2, 3]), set(&[1])).unwrap();
        let rep = verify_general_identity(
            &l,
            GenIdentityId::GenDualSum,
            &IdentityParams::with_i(set(&[1, 2])),
        )
        .unwrap();
        assert_eq!(rep.lhs, big(16));
        assert_eq!(rep.rhs, big(16));
        assert!(rep.holds);
    }

    #[test]
    fn gen_level_sum_m30() {
        // S = R, T = {1}, k = 2: 6 + 10 = 16 = C(1,1) * 16 (mod 30)
        let l = consistent_lattice(&fm(30), set(&[1, 2, 3]), set(&[1])).unwrap();
        let rep = verify_general_identity(
            &l,
            GenIdentityId::GenLevelSum,
            &IdentityParams::with_k(2),
        )
        .unwrap();
        assert_eq!(rep.lhs, big(16));
        assert!(rep.holds);
    }

    #[test]
    fn gen_primitive_sum_reduced_modulus() {
        // S = {1,2}, T = {}, J = {}: 21 + 16 = 37 = 1 (mod g_S = 6)
        let l = consistent_lattice(&fm(30), set(&[1, 2]), IndexSet::EMPTY).unwrap();
        let rep = verify_general_identity(
            &l,
            GenIdentityId::GenPrimitiveSum,
            &IdentityParams::with_j(IndexSet::EMPTY),
        )
        .unwrap();
        assert_eq!(rep.modulus.m(), &big(6));
        assert_eq!(rep.lhs, big(1));
        assert!(rep.holds);
    }

    #[test]
    fn gen_sublattice_degenerate_rejected() {
        let l = consistent_lattice(&fm(30), set(&[1, 2]), set(&[1])).unwrap();
        assert!(matches!(
            verify_general_identity(
                &l,
                GenIdentityId::GenSublatticeSum,
                &IdentityParams::with_i(set(&[1])),
            ),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn gen_catalog_holds_small() {
        // a couple of concrete lattices, all valid params
        for (m, s, t) in [
            (30u64, vec![1usize, 2, 3], vec![] as Vec<usize>),
            (30, vec![1, 2, 3], vec![1]),
            (360, vec![1, 2, 3], vec![3]),
            (2310, vec![1, 2, 3, 4], vec![2]),
        ] {
            let modulus = fm(m);
            let l = consistent_lattice(&modulus, set(&s), set(&t)).unwrap();
            let sets = l.element_sets().unwrap();
            for &i in &sets {
                assert!(verify_general_identity(
                    &l,
                    GenIdentityId::GenDualSum,
                    &IdentityParams::with_i(i)
                )
                .unwrap()
                .holds);
                if i != l.set_t() {
                    assert!(verify_general_identity(
                        &l,
                        GenIdentityId::GenSubsetSum,
                        &IdentityParams::with_i(i)
                    )
                    .unwrap()
                    .holds);
                    assert!(verify_general_identity(
                        &l,
                        GenIdentityId::GenSublatticeSum,
                        &IdentityParams::with_i(i)
                    )
                    .unwrap()
                    .holds);
                }
                if i != l.set_s() {
                    assert!(verify_general_identity(
                        &l,
                        GenIdentityId::GenPrimitiveSum,
                        &IdentityParams::with_j(i)
                    )
                    .unwrap()
                    .holds);
                }
                if i != l.set_t() && i != l.set_s() {
                    for n in 1..(i.len() - l.set_t().len()) {
                        assert!(verify_general_identity(
                            &l,
                            GenIdentityId::GenBelowNLevels,
                            &IdentityParams::with_i_n(i, n)
                        )
                        .unwrap()
                        .holds);
                    }
                }
                for &j in &sets {
                    let mut p = IdentityParams::with_i_j(i, j);
                    assert!(verify_general_identity(&l, GenIdentityId::GenUnionSum, &p)
                        .unwrap()
                        .holds);
                    p.parts = Some(vec![i, j]);
                    assert!(verify_general_identity(&l, GenIdentityId::GenProduct, &p)
                        .unwrap()
                        .holds);
                }
            }
            for k in t.len()..s.len() {
                assert!(verify_general_identity(
                    &l,
                    GenIdentityId::GenLevelSum,
                    &IdentityParams::with_k(k)
                )
                .unwrap()
                .holds);
            }
        }
    }

    #[test]
    fn dot_export_shape() {
        let dot = idempotent_lattice_dot(&fm(12), LabelStyle::D).unwrap();
        assert!(dot.contains("digraph"));
        assert!(dot.contains("label=\"4\""));
        assert!(dot.contains("label=\"9\""));
        // r = 2: 4 nodes, 4 cover edges
        assert_eq!(dot.matches("->").count(), 4);

        let l = consistent_lattice(&fm(30), set(&[1, 2, 3]), set(&[1])).unwrap();
        let dot = consistent_lattice_dot(&l, LabelStyle::G).unwrap();
        assert!(dot.contains("label=\"30\""));
        assert!(dot.contains("label=\"2\""));
    }
}
