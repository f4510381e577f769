//! Property tests for the structural invariants: idempotent algebra,
//! lattice characterization, CRT round-trips, and orbit shape.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use proptest::prelude::*;

use idemring::arith::{crt_combine, factorize, mod_inverse, pow_mod, FactoredModulus};
use idemring::idempotent::{
    add_decompose, complement, enumerate_idempotents, idempotent_from_set, multiply, subtract,
};
use idemring::index_set::IndexSet;
use idemring::lattice::{join, leq, meet};
use idemring::powergraph::{component_of, is_cycle_element, orbit};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// A modulus built from a few small prime powers, so everything stays fast.
fn modulus_strategy() -> impl Strategy<Value = FactoredModulus> {
    let primes = [2u64, 3, 5, 7, 11, 13];
    proptest::collection::vec(0..primes.len(), 1..=4).prop_map(move |picks| {
        let mut factors: Vec<(BigUint, u32)> = Vec::new();
        for (offset, pick) in picks.iter().enumerate() {
            let p = primes[*pick];
            if factors.iter().all(|(q, _)| *q != big(p)) {
                factors.push((big(p), 1 + (offset as u32 % 3)));
            }
        }
        factors.sort();
        FactoredModulus::from_factors(factors).unwrap()
    })
}

fn subset_of(r: usize, bits: u64) -> IndexSet {
    IndexSet::from_bits(bits & IndexSet::full(r).bits())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn idempotents_square_to_themselves(m in modulus_strategy()) {
        for d in enumerate_idempotents(&m).unwrap() {
            let v = d.value();
            prop_assert_eq!(&((v * v) % m.m()), v);
            prop_assert_eq!(&v.gcd(m.m()), d.g());
            prop_assert!(d.cofactor().gcd(&(m.m() / d.g())).is_one());
        }
    }

    #[test]
    fn complement_pairs_sum_to_one(m in modulus_strategy(), bits in any::<u64>()) {
        let set = subset_of(m.r(), bits);
        let d = idempotent_from_set(&m, set).unwrap();
        let c = complement(&d);
        prop_assert_eq!(c.set(), set.complement(m.r()));
        prop_assert_eq!((d.value() + c.value()) % m.m(), BigUint::one() % m.m());
        prop_assert_eq!((d.value() * c.value()) % m.m(), BigUint::ZERO);
    }

    #[test]
    fn products_take_unions(m in modulus_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let di = idempotent_from_set(&m, subset_of(m.r(), a)).unwrap();
        let dj = idempotent_from_set(&m, subset_of(m.r(), b)).unwrap();
        let product = multiply(&[di.clone(), dj.clone()]).unwrap();
        prop_assert_eq!(product.set(), di.set().union(dj.set()));
        prop_assert_eq!(
            product.value().clone(),
            di.value() * dj.value() % m.m()
        );

        // d_I + d_J = d_{I u J} + d_{I n J}
        let (union, intersection) = add_decompose(&di, &dj).unwrap();
        prop_assert_eq!(
            (di.value() + dj.value()) % m.m(),
            (union.value() + intersection.value()) % m.m()
        );

        // subtraction corollary when I subset J
        if di.set().is_subset(dj.set()) {
            let diff = subtract(&dj, &di).unwrap();
            prop_assert_eq!(
                (diff + di.value()) % m.m(),
                dj.value() % m.m()
            );
        }
    }

    #[test]
    fn lattice_order_matches_divisibility(m in modulus_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let di = idempotent_from_set(&m, subset_of(m.r(), a)).unwrap();
        let dj = idempotent_from_set(&m, subset_of(m.r(), b)).unwrap();
        prop_assert_eq!(leq(&di, &dj).unwrap(), dj.g().is_multiple_of(di.g()));
        prop_assert_eq!(join(&di, &dj).unwrap().g().clone(), di.g().lcm(dj.g()));
        prop_assert_eq!(meet(&di, &dj).unwrap().g().clone(), di.g().gcd(dj.g()));
    }

    #[test]
    fn crt_round_trips(m in modulus_strategy(), x in any::<u64>()) {
        let x = big(x) % m.m();
        let residues: Vec<(BigUint, BigUint)> = (1..=m.r())
            .map(|i| (&x % m.prime_power(i), m.prime_power(i)))
            .collect();
        prop_assert_eq!(crt_combine(&residues).unwrap(), x);
    }

    #[test]
    fn inverses_invert(m in modulus_strategy(), a in any::<u64>()) {
        let a = big(a) % m.m();
        match mod_inverse(&a, m.m()) {
            Ok(inv) => prop_assert_eq!(a * inv % m.m(), BigUint::one() % m.m()),
            Err(_) => prop_assert!(!a.gcd(m.m()).is_one()),
        }
    }

    #[test]
    fn pow_mod_matches_iteration(m in modulus_strategy(), b in any::<u64>(), e in 0u32..24) {
        let b = big(b) % m.m();
        let mut cur = BigUint::one() % m.m();
        for _ in 0..e {
            cur = cur * &b % m.m();
        }
        prop_assert_eq!(pow_mod(&b, &big(e as u64), m.m()).unwrap(), cur);
    }

    #[test]
    fn orbits_partition_into_tail_and_cycle(m in modulus_strategy(), a in any::<u64>()) {
        prop_assume!(m.m().bits() <= 40);
        let a = big(a) % m.m();
        let orb = orbit(&m, &a);

        // powers a^1, a^2, ... reproduce tail then cycle
        let mut cur = a.clone();
        for expected in orb.tail.iter().chain(orb.cycle.iter()) {
            prop_assert_eq!(&cur, expected);
            cur = cur * &a % m.m();
        }
        // after the walk we are back at the cycle start
        prop_assert_eq!(&cur, &orb.cycle[0]);

        // the cycle contains exactly one idempotent, matching the component
        let idem = orb.idempotent_value(m.m());
        prop_assert!(orb.cycle.contains(&idem));
        let descriptor = component_of(&m, &a).unwrap();
        prop_assert_eq!(&idem, descriptor.idempotent.value());

        // tail elements are not cycle elements; cycle elements are
        for x in &orb.tail {
            prop_assert!(!is_cycle_element(&m, x).unwrap());
        }
        for x in &orb.cycle {
            prop_assert!(is_cycle_element(&m, x).unwrap());
        }
    }

    #[test]
    fn factorize_round_trips(parts in proptest::collection::vec((0usize..6, 1u32..3), 1..4)) {
        let primes = [2u64, 3, 5, 7, 11, 13];
        let mut n = BigUint::one();
        for (pick, e) in parts {
            n *= big(primes[pick]).pow(e);
        }
        prop_assume!(n >= big(2));
        let m = factorize(&n).unwrap();
        let mut product = BigUint::one();
        for (p, e) in m.factors() {
            product *= p.pow(*e);
        }
        prop_assert_eq!(product, n.clone());
        prop_assert_eq!(m.m(), &n);
    }
}
