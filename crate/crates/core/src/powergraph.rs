//! Orbits of repeated powering in `Z/mZ` and the components of the
//! sequential power graph.
//!
//! Each residue `b` lives in the component `C_I` whose index set is
//! `I = {i : p_i | b}`; the component's cycle part is the group `d_I * U`
//! with identity `d_I`, and `b` is a cycle element exactly when
//! `d_I * b = b (mod m)`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::arith::FactoredModulus;
use crate::error::{Error, Result};
use crate::idempotent::{idempotent_from_set, Idempotent};
use crate::index_set::IndexSet;

/// Default cap on `m` for unit/component enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;
/// Default cap on `m` for whole-graph export.
pub const DEFAULT_GRAPH_CAP: u64 = 5_000;

/// The component `C_I` containing a residue: its index set, square-free
/// multiplier `pi_I`, divisor `g_I`, and idempotent `d_I`.
#[derive(Debug, Clone)]
pub struct ComponentDescriptor {
    pub set: IndexSet,
    /// `pi_I`, the product of the primes (not prime powers) indexed by `I`.
    pub multiplier: BigUint,
    pub g: BigUint,
    pub idempotent: Idempotent,
    /// Number of residues in `C_I`; filled only on request for small `m`.
    pub size: Option<u64>,
}

impl serde::Serialize for ComponentDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ComponentDescriptor", 5)?;
        st.serialize_field("I", &self.set)?;
        st.serialize_field("multiplier", &self.multiplier.to_string())?;
        st.serialize_field("g", &self.g.to_string())?;
        st.serialize_field("idempotent", &self.idempotent)?;
        st.serialize_field("size", &self.size)?;
        st.end()
    }
}

impl ComponentDescriptor {
    /// Fills `size` by enumeration, subject to `cap` on `m`.
    pub fn with_size(mut self, modulus: &FactoredModulus, cap: u64) -> Result<Self> {
        self.size = Some(component_elements(modulus, self.set, cap)?.len() as u64);
        Ok(self)
    }
}

/// The tail and cycle of the sequence `a, a^2, a^3, ...` in `Z/mZ`.
///
/// The tail is the maximal prefix of non-recurring powers, so it is empty
/// exactly when `a` itself is a cycle element. Exactly one idempotent
/// appears in the orbit and it sits in the cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub base: BigUint,
    pub tail: Vec<BigUint>,
    pub cycle: Vec<BigUint>,
}

impl OrbitDecomposition {
    pub fn tail_length(&self) -> usize {
        self.tail.len()
    }

    pub fn cycle_length(&self) -> usize {
        self.cycle.len()
    }

    /// The unique idempotent among the orbit's residues.
    pub fn idempotent_value(&self, m: &BigUint) -> BigUint {
        self.cycle
            .iter()
            .find(|x| (&(*x * *x) % m) == **x)
            .expect("every cycle contains an idempotent")
            .clone()
    }
}

/// Identifies the component of `b`: `I = {i : p_i | b}` (so `b = 0` lands in
/// `C_R`).
pub fn component_of(modulus: &FactoredModulus, b: &BigUint) -> Result<ComponentDescriptor> {
    let b = b % modulus.m();
    let mut set = IndexSet::EMPTY;
    let mut multiplier = BigUint::from(1u32);
    for i in 1..=modulus.r() {
        if (&b % modulus.prime(i)).is_zero() {
            set = set.insert(i);
            multiplier *= modulus.prime(i);
        }
    }
    let idempotent = idempotent_from_set(modulus, set)?;
    Ok(ComponentDescriptor {
        set,
        multiplier,
        g: idempotent.g().clone(),
        idempotent,
        size: None,
    })
}

/// Decomposes the power sequence of `a` into tail and cycle.
pub fn orbit(modulus: &FactoredModulus, a: &BigUint) -> OrbitDecomposition {
    let m = modulus.m();
    let a = a % m;
    if let (Some(m64), Some(a64)) = (m.to_u64(), a.to_u64()) {
        if m64 <= u32::MAX as u64 {
            return orbit_u64(a64, m64, a.clone());
        }
    }
    let mut seen: HashMap<BigUint, usize> = HashMap::new();
    let mut powers: Vec<BigUint> = Vec::new();
    let mut x = a.clone();
    loop {
        if let Some(&start) = seen.get(&x) {
            let cycle = powers.split_off(start);
            return OrbitDecomposition {
                base: a,
                tail: powers,
                cycle,
            };
        }
        seen.insert(x.clone(), powers.len());
        powers.push(x.clone());
        x = x * &a % m;
    }
}

fn orbit_u64(a: u64, m: u64, base: BigUint) -> OrbitDecomposition {
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut powers: Vec<u64> = Vec::new();
    let mut x = a;
    let start = loop {
        if let Some(&start) = seen.get(&x) {
            break start;
        }
        seen.insert(x, powers.len());
        powers.push(x);
        x = x * a % m;
    };
    let cycle = powers.split_off(start);
    OrbitDecomposition {
        base,
        tail: powers.into_iter().map(BigUint::from).collect(),
        cycle: cycle.into_iter().map(BigUint::from).collect(),
    }
}

/// True iff `d_I * b = b (mod m)` for `b`'s component idempotent, which is
/// equivalent to `b` appearing in its own orbit's cycle.
pub fn is_cycle_element(modulus: &FactoredModulus, b: &BigUint) -> Result<bool> {
    let b = b % modulus.m();
    let comp = component_of(modulus, &b)?;
    Ok(comp.idempotent.value() * &b % modulus.m() == b)
}

fn m_as_u64(modulus: &FactoredModulus, cap: u64, what: &'static str) -> Result<u64> {
    match modulus.m().to_u64() {
        Some(m) if m <= cap => Ok(m),
        _ => Err(Error::CapExceeded {
            what,
            value: modulus.m().to_string(),
            cap,
        }),
    }
}

/// The cycle part of `C_I`: the set `{d_I * u mod m : u a unit}`, a group
/// under multiplication with identity `d_I`. Ascending order.
pub fn cycle_elements(modulus: &FactoredModulus, set: IndexSet, cap: u64) -> Result<Vec<BigUint>> {
    let m = m_as_u64(modulus, cap, "cycle enumeration")?;
    let d = idempotent_from_set(modulus, set)?
        .value()
        .to_u64()
        .expect("value below m");
    let mut out: BTreeSet<u64> = BTreeSet::new();
    for u in 0..m {
        if num_integer::gcd(u, m) == 1 {
            out.insert(mulmod(d, u, m));
        }
    }
    Ok(out.into_iter().map(BigUint::from).collect())
}

/// All residues of `C_I`: the values `pi_I * x mod m` with
/// `gcd(x, m / g_I) = 1`. The `2^r` component sets partition `[0, m)`.
/// Ascending order.
pub fn component_elements(
    modulus: &FactoredModulus,
    set: IndexSet,
    cap: u64,
) -> Result<Vec<BigUint>> {
    set.check_range(modulus.r())?;
    let m = m_as_u64(modulus, cap, "component enumeration")?;
    let primes: Vec<u64> = (1..=modulus.r())
        .map(|i| modulus.prime(i).to_u64().expect("prime divides m"))
        .collect();
    let mut out = Vec::new();
    'outer: for b in 0..m {
        for (idx, &p) in primes.iter().enumerate() {
            if set.contains(idx + 1) != (b % p == 0) {
                continue 'outer;
            }
        }
        out.push(BigUint::from(b));
    }
    Ok(out)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The sequential power graph on `[0, m)`: edges `(c^i, c^{i+1})` over all
/// bases `c` and `i >= 1`, deduplicated, self-loops at idempotents kept.
#[derive(Debug, Clone)]
pub struct PowerGraph {
    m: u64,
    edges: BTreeSet<(u64, u64)>,
    /// Weakly-connected components, each tagged with its index set and
    /// listing its nodes in ascending order.
    components: Vec<(IndexSet, Vec<u64>)>,
    idempotents: BTreeSet<u64>,
}

impl PowerGraph {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn edges(&self) -> &BTreeSet<(u64, u64)> {
        &self.edges
    }

    pub fn components(&self) -> &[(IndexSet, Vec<u64>)] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// DOT rendering: one subgraph cluster per component, idempotent nodes
    /// double-circled.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph power_graph {{").unwrap();
        for (idx, (set, nodes)) in self.components.iter().enumerate() {
            writeln!(out, "  subgraph cluster_{} {{", idx).unwrap();
            writeln!(out, "    label=\"C_{}\";", set).unwrap();
            for &n in nodes {
                if self.idempotents.contains(&n) {
                    writeln!(out, "    n{} [label=\"{}\", shape=doublecircle];", n, n).unwrap();
                } else {
                    writeln!(out, "    n{} [label=\"{}\"];", n, n).unwrap();
                }
            }
            writeln!(out, "  }}").unwrap();
        }
        for &(a, b) in &self.edges {
            writeln!(out, "  n{} -> n{};", a, b).unwrap();
        }
        writeln!(out, "}}").unwrap();
        out
    }

    /// JSON adjacency form.
    pub fn to_json(&self) -> serde_json::Value {
        let mut adjacency: HashMap<u64, Vec<u64>> = HashMap::new();
        for &(a, b) in &self.edges {
            adjacency.entry(a).or_default().push(b);
        }
        let mut adj_sorted: Vec<serde_json::Value> = Vec::new();
        for n in 0..self.m {
            let targets = adjacency.remove(&n).unwrap_or_default();
            adj_sorted.push(serde_json::json!({"node": n, "succ": targets}));
        }
        let comps: Vec<serde_json::Value> = self
            .components
            .iter()
            .map(|(set, nodes)| {
                serde_json::json!({
                    "I": set.indices(),
                    "nodes": nodes,
                })
            })
            .collect();
        serde_json::json!({
            "m": self.m,
            "adjacency": adj_sorted,
            "components": comps,
            "idempotents": self.idempotents,
        })
    }
}

struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra as usize] = rb;
        }
    }
}

/// Builds the whole sequential power graph by walking every base's orbit.
/// The weakly-connected component count equals `2^r` and each component
/// contains exactly one idempotent.
pub fn export_power_graph(modulus: &FactoredModulus, cap: u64) -> Result<PowerGraph> {
    let m = m_as_u64(modulus, cap, "power-graph export")?;
    let mut edges: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut seen = vec![false; m as usize];
    for c in 0..m {
        // edges of the walk c, c^2, ...: the successor map is multiply-by-c,
        // so the walk closes as soon as a power repeats
        for s in seen.iter_mut() {
            *s = false;
        }
        let mut x = c;
        seen[x as usize] = true;
        loop {
            let next = mulmod(x, c, m);
            edges.insert((x, next));
            if seen[next as usize] {
                break;
            }
            seen[next as usize] = true;
            x = next;
        }
    }

    let mut dsu = Dsu::new(m as usize);
    for &(a, b) in &edges {
        dsu.union(a as u32, b as u32);
    }
    let mut by_root: HashMap<u32, Vec<u64>> = HashMap::new();
    for n in 0..m {
        by_root.entry(dsu.find(n as u32)).or_default().push(n);
    }
    let idempotents: BTreeSet<u64> = (0..m).filter(|&x| mulmod(x, x, m) == x).collect();
    let mut components: Vec<(IndexSet, Vec<u64>)> = Vec::new();
    for nodes in by_root.into_values() {
        let rep = BigUint::from(nodes[0]);
        let set = component_of(modulus, &rep)?.set;
        components.push((set, nodes));
    }
    components.sort_by_key(|(set, _)| set.bits());
    Ok(PowerGraph {
        m,
        edges,
        components,
        idempotents,
    })
}

#[cfg(test)]
mod tests {
    use num_integer::Integer;
    use super::*;
    use crate::arith::{big, factorize};

    fn fm(n: u64) -> FactoredModulus {
        factorize(&big(n)).unwrap()
    }

    fn set(indices: &[usize]) -> IndexSet {
        IndexSet::from_indices(indices.iter().copied()).unwrap()
    }

    fn vals(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn component_of_examples() {
        let c = component_of(&fm(12), &big(2)).unwrap();
        assert_eq!(c.set, set(&[1]));
        assert_eq!(c.multiplier, big(2));
        assert_eq!(c.idempotent.value(), &big(4));

        let c = component_of(&fm(12), &big(1)).unwrap();
        assert_eq!(c.set, IndexSet::EMPTY);
        assert_eq!(c.multiplier, big(1));
        assert_eq!(c.idempotent.value(), &big(1));

        let c = component_of(&fm(30), &big(10)).unwrap();
        assert_eq!(c.set, set(&[1, 3]));
        assert_eq!(c.multiplier, big(10));
        assert_eq!(c.idempotent.value(), &big(10));

        // 0 lands in C_R
        let c = component_of(&fm(30), &BigUint::ZERO).unwrap();
        assert_eq!(c.set, IndexSet::full(3));
    }

    #[test]
    fn multiplier_is_radical_of_g() {
        let m = fm(360);
        for bits in 0..(1u64 << m.r()) {
            let c = component_of(
                &m,
                idempotent_from_set(&m, IndexSet::from_bits(bits)).unwrap().value(),
            )
            .unwrap();
            assert!(c.g.is_multiple_of(&c.multiplier));
            // same prime support
            let mut g = c.g.clone();
            let mut pi = c.multiplier.clone();
            for i in 1..=m.r() {
                let p = m.prime(i);
                assert_eq!((&g % p).is_zero(), (&pi % p).is_zero());
                while (&g % p).is_zero() {
                    g /= p;
                }
                while (&pi % p).is_zero() {
                    pi /= p;
                }
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&fm(12), &big(2));
        assert_eq!(vals(&o.tail), vec![2]);
        assert_eq!(vals(&o.cycle), vec![4, 8]);

        let o = orbit(&fm(12), &big(1));
        assert!(o.tail.is_empty());
        assert_eq!(vals(&o.cycle), vec![1]);

        let o = orbit(&fm(30), &big(7));
        assert!(o.tail.is_empty());
        assert_eq!(vals(&o.cycle), vec![7, 19, 13, 1]);
    }

    #[test]
    fn orbit_shape_invariants() {
        let m = fm(360);
        for a in 0..360u64 {
            let o = orbit(&m, &big(a));
            // tail || cycle are the distinct powers in order
            let mut x = big(a);
            for v in o.tail.iter().chain(&o.cycle) {
                assert_eq!(v, &x);
                x = x * big(a) % m.m();
            }
            // one more step from the cycle end returns to cycle[0]
            assert_eq!(&x, &o.cycle[0]);
            assert!(o.cycle_length() >= 1);
            // exactly one idempotent, in the cycle
            let idems_in_tail = o.tail.iter().filter(|v| (&(*v * *v) % m.m()) == **v).count();
            let idems_in_cycle = o.cycle.iter().filter(|v| (&(*v * *v) % m.m()) == **v).count();
            assert_eq!((idems_in_tail, idems_in_cycle), (0, 1), "a = {}", a);
        }
    }

    #[test]
    fn is_cycle_element_examples() {
        assert!(!is_cycle_element(&fm(12), &big(2)).unwrap());
        assert!(is_cycle_element(&fm(30), &big(2)).unwrap());
        for m in [fm(12), fm(30)] {
            for bits in 0..(1u64 << m.r()) {
                let d = idempotent_from_set(&m, IndexSet::from_bits(bits)).unwrap();
                assert!(is_cycle_element(&m, d.value()).unwrap());
            }
        }
    }

    #[test]
    fn cycle_elements_examples() {
        let m12 = fm(12);
        assert_eq!(
            vals(&cycle_elements(&m12, set(&[1]), 1000).unwrap()),
            vec![4, 8]
        );
        // I = {}: all units
        assert_eq!(
            vals(&cycle_elements(&m12, IndexSet::EMPTY, 1000).unwrap()),
            vec![1, 5, 7, 11]
        );
        // I = R: {0}
        assert_eq!(
            vals(&cycle_elements(&m12, IndexSet::full(2), 1000).unwrap()),
            vec![0]
        );
        assert!(matches!(
            cycle_elements(&m12, set(&[1]), 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn component_elements_examples() {
        let m12 = fm(12);
        assert_eq!(
            vals(&component_elements(&m12, set(&[1]), 1000).unwrap()),
            vec![2, 4, 8, 10]
        );
        assert_eq!(
            vals(&component_elements(&m12, IndexSet::EMPTY, 1000).unwrap()),
            vec![1, 5, 7, 11]
        );
        assert_eq!(
            vals(&component_elements(&m12, IndexSet::full(2), 1000).unwrap()),
            vec![0, 6]
        );
    }

    #[test]
    fn components_partition_small() {
        for m in [12u64, 30, 360, 97] {
            let modulus = fm(m);
            let mut all: Vec<u64> = Vec::new();
            for bits in 0..(1u64 << modulus.r()) {
                all.extend(vals(&component_elements(
                    &modulus,
                    IndexSet::from_bits(bits),
                    1000,
                )
                .unwrap()));
            }
            all.sort_unstable();
            assert_eq!(all, (0..m).collect::<Vec<u64>>());
        }
    }

    #[test]
    fn graph_component_counts() {
        assert_eq!(export_power_graph(&fm(12), 5000).unwrap().component_count(), 4);
        assert_eq!(export_power_graph(&fm(13), 5000).unwrap().component_count(), 2);
        assert_eq!(export_power_graph(&fm(30), 5000).unwrap().component_count(), 8);
    }

    #[test]
    fn graph_each_component_has_one_idempotent() {
        let g = export_power_graph(&fm(60), 5000).unwrap();
        for (_, nodes) in g.components() {
            let count = nodes
                .iter()
                .filter(|&&x| x as u128 * x as u128 % 60 == x as u128)
                .count();
            assert_eq!(count, 1);
        }
    }

    #[test]
    fn graph_dot_marks_idempotents() {
        let g = export_power_graph(&fm(12), 5000).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("n4 [label=\"4\", shape=doublecircle]"));
        assert!(dot.contains("n9 [label=\"9\", shape=doublecircle]"));
        assert!(dot.contains("subgraph cluster_0"));
        // self-loop at idempotents retained
        assert!(dot.contains("n0 -> n0;"));
        assert!(dot.contains("n1 -> n1;"));
    }
}
