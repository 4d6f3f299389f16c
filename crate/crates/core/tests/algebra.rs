use std::collections::{BTreeMap, BTreeSet};

use confuse_core::field::FieldSpec;
use confuse_core::numbers::{divisors, gcd, prime_power};
use confuse_core::ring::{
    closure, enumerate_subgroups, gcd_classes, project_subgroup, ring_confusable_sets, units,
    RingSpec,
};
use confuse_core::Elem;
use proptest::prelude::*;

fn small_fields() -> Vec<FieldSpec> {
    (2..20u64)
        .filter_map(prime_power)
        .map(|(p, n)| FieldSpec::make(p as u32, n).unwrap())
        .collect()
}

#[test]
fn field_axioms_exhaustively_below_20() {
    for f in small_fields() {
        let q = f.order();
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, b), f.mul_poly(a, b), "table vs polynomial product");
                for c in 0..q {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}

#[test]
fn generator_powers_are_distinct_and_logs_invert() {
    for f in small_fields() {
        let q = f.order();
        let powers: BTreeSet<Elem> = (0..q - 1).map(|k| f.pow(f.generator(), k as u64)).collect();
        assert_eq!(powers.len() as u32, q - 1);
        for a in 1..q {
            let k = f.dlog().log(a).unwrap();
            assert_eq!(f.dlog().exp(k as u64), a);
        }
        assert_eq!(f.dlog().log(0), None);
    }
}

#[test]
fn canonical_choices() {
    let f8 = FieldSpec::make(2, 3).unwrap();
    assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
    assert_eq!(f8.generator(), 2);
    assert_eq!(f8.format(f8.pow(2, 3)), "x+1");
    assert_eq!(f8.format(f8.pow(2, 6)), "x^2+1");
    assert_eq!(f8.mul(2, 4), 3);
    assert_eq!(FieldSpec::make(7, 1).unwrap().generator(), 3);
    assert_eq!(FieldSpec::make(2, 1).unwrap().generator(), 1);
    let f7 = FieldSpec::make(7, 1).unwrap();
    assert_eq!((f7.mul(2, 2), f7.mul(2, 4)), (4, 1));
}

#[test]
fn partition_is_independent_of_the_generator() {
    for f in small_fields() {
        for d in f.admissible_divisors() {
            let reference = f.confusable_sets(d).unwrap().unordered_sets();
            for g in f.primitive_elements() {
                let alt = f.with_generator(g).unwrap();
                assert_eq!(alt.confusable_sets(d).unwrap().unordered_sets(), reference);
            }
        }
    }
}

#[test]
fn field_sets_have_randomizer_size() {
    for f in small_fields() {
        for d in f.admissible_divisors() {
            let s = f.confusable_sets(d).unwrap();
            let b = s.randomizer().len();
            assert_eq!(b as u32 * d, f.order() - 1);
            assert!(s
                .sets()
                .iter()
                .filter(|x| x != &&vec![0])
                .all(|x| x.len() == b));
            assert_eq!(s.sets().len() as u32, d + 1);
        }
    }
}

#[test]
fn gcd_classes_match_scaled_units() {
    for n in 2..=100u32 {
        let classes = gcd_classes(n);
        let mut all: Vec<Elem> = vec![0];
        for c in &classes {
            let expected: Vec<Elem> = units(n / c.d).into_iter().map(|u| u * c.d).collect();
            assert_eq!(c.members, expected, "n={n} d={}", c.d);
            assert!(c
                .members
                .iter()
                .all(|&a| gcd(a as u64, n as u64) == c.d as u64));
            all.extend(&c.members);
        }
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}

/// Brute force over all subsets of the unit group, feasible for small φ(n).
fn subgroups_brute(n: u32) -> BTreeSet<Vec<Elem>> {
    let u = units(n);
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << u.len()) {
        let s: Vec<Elem> = (0..u.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| u[i])
            .collect();
        let set: BTreeSet<Elem> = s.iter().copied().collect();
        let closed = s.iter().all(|&a| {
            s.iter()
                .all(|&b| set.contains(&((a as u64 * b as u64 % n as u64) as Elem)))
        });
        if closed && set.contains(&1) {
            out.insert(s);
        }
    }
    out
}

#[test]
fn subgroup_enumeration_agrees_with_subset_brute_force() {
    for n in 2..=40u32 {
        if units(n).len() > 16 {
            continue;
        }
        let found: BTreeSet<Vec<Elem>> = enumerate_subgroups(n).unwrap().into_iter().collect();
        assert_eq!(found, subgroups_brute(n), "n={n}");
    }
    assert_eq!(enumerate_subgroups(3).unwrap(), vec![vec![1], vec![1, 2]]);
}

#[test]
fn projection_sweep_and_ring_partitions_up_to_100() {
    let mut checked = 0;
    for n in 2..=100u32 {
        for g in enumerate_subgroups(n).unwrap() {
            let spec = RingSpec::new(n, g.clone()).unwrap();
            for d in divisors(n as u64).into_iter().skip(1) {
                let r = project_subgroup(&spec, d as u32).unwrap();
                assert_eq!(r.multiplicity as usize * r.base_subgroup.len(), g.len());
                assert_eq!(closure(d as u32, &r.base_subgroup), r.base_subgroup);
                checked += 1;
            }
            let s = ring_confusable_sets(&spec).unwrap();
            let mut all: Vec<Elem> = s.sets().concat();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
    assert!(checked > 1000);
}

#[test]
fn ring_examples() {
    let r = |n, g: &[Elem]| RingSpec::new(n, g.to_vec()).unwrap();
    let p = project_subgroup(&r(15, &[1, 11]), 5).unwrap();
    assert_eq!((p.base_subgroup, p.multiplicity), (vec![1], 2));
    let p = project_subgroup(&r(15, &[1, 4, 11, 14]), 3).unwrap();
    assert_eq!((p.base_subgroup, p.multiplicity), (vec![1, 2], 2));
    let p = project_subgroup(&RingSpec::full(15).unwrap(), 3).unwrap();
    assert_eq!((p.base_subgroup, p.multiplicity), (vec![1, 2], 4));
    let s = ring_confusable_sets(&r(15, &[1, 11])).unwrap();
    let expected: BTreeSet<Vec<Elem>> = [
        vec![0],
        vec![1, 11],
        vec![2, 7],
        vec![4, 14],
        vec![8, 13],
        vec![3],
        vec![6],
        vec![9],
        vec![12],
        vec![5, 10],
    ]
    .into();
    assert_eq!(s.unordered_sets(), expected);
    let s = ring_confusable_sets(&r(15, &[1, 4, 11, 14])).unwrap();
    assert_eq!(
        s.sets(),
        &[
            vec![0],
            vec![1, 4, 11, 14],
            vec![2, 7, 8, 13],
            vec![3, 12],
            vec![5, 10],
            vec![6, 9]
        ]
    );
    assert!(RingSpec::new(15, vec![1, 2]).is_err());
    assert!(RingSpec::new(15, vec![1, 3]).is_err());
}

#[test]
fn ring_json() {
    let spec: RingSpec = serde_json::from_str(r#"{"n":15,"G":[1,11]}"#).unwrap();
    assert_eq!(spec.group(), &[1, 11]);
    assert_eq!(
        serde_json::to_string(&spec).unwrap(),
        r#"{"n":15,"G":[1,11]}"#
    );
}

fn larger_field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![
        (2u32, 8u32),
        (3, 5),
        (5, 3),
        (7, 3),
        (2, 10),
        (31, 2),
        (101, 1),
    ])
    .prop_map(|(p, n)| FieldSpec::make(p, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larger_fields_obey_axioms(f in larger_field(), seed in any::<[u32; 3]>()) {
        let q = f.order();
        let (a, b, c) = (seed[0] % q, seed[1] % q, seed[2] % q);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, b), f.mul_poly(a, b));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(f.inv(a).unwrap(), a), 1);
        }
        prop_assert_eq!(f.parse(&f.format(a)).unwrap(), a);
    }

    #[test]
    fn larger_field_structures_validate(f in larger_field(), pick in any::<prop::sample::Index>()) {
        let ds = f.admissible_divisors();
        let d = ds[pick.index(ds.len())];
        let s = f.confusable_sets(d).unwrap();
        let counts: BTreeMap<usize, usize> = s.sets().iter().filter(|x| x[0] != 0).fold(BTreeMap::new(), |mut m, x| {
            *m.entry(x.len()).or_default() += 1;
            m
        });
        prop_assert_eq!(counts.get(&s.randomizer().len()).copied().unwrap_or(0) as u32, d);
    }

    #[test]
    fn ring_structures_partition(n in 2u32..200, pick in any::<prop::sample::Index>()) {
        let groups = enumerate_subgroups(n).unwrap();
        let g = groups[pick.index(groups.len())].clone();
        let s = ring_confusable_sets(&RingSpec::new(n, g).unwrap()).unwrap();
        for a in 0..n {
            prop_assert!(s.sets()[s.index_of(a)].contains(&a));
        }
    }
}
