use std::collections::BTreeMap;

use confuse_core::expansion::{
    all_expansions, converse_report, find_expansion, search_expansions, CarrierKind, FunctionTable,
    SearchBounds,
};
use confuse_core::field::FieldSpec;
use confuse_core::protocol::bundled_table;
use confuse_core::ring::{ring_confusable_sets, RingSpec};
use confuse_core::structures::{structures_of_size, ConfusableStructure};
use confuse_core::{Elem, Limits, Rate};
use proptest::prelude::*;

fn injections(m: usize, n: u32) -> Vec<Vec<Elem>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Elem>| {
                (0..n)
                    .filter(|a| !p.contains(a))
                    .map(|a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Existence by trying every pair of injective maps.
fn brute_force_exists(f: &FunctionTable, s: &ConfusableStructure) -> bool {
    let n = s.carrier().size();
    let maps2 = injections(f.m2() as usize, n);
    injections(f.m1() as usize, n).iter().any(|m1| {
        maps2.iter().any(|m2| {
            let mut fwd: BTreeMap<usize, u32> = BTreeMap::new();
            let mut back: BTreeMap<u32, usize> = BTreeMap::new();
            m1.iter().enumerate().all(|(i, &a)| {
                m2.iter().enumerate().all(|(j, &b)| {
                    let set = s.index_of(s.carrier().add(a, b));
                    let label = f.get(i as u32, j as u32);
                    *fwd.entry(set).or_insert(label) == label
                        && *back.entry(label).or_insert(set) == set
                })
            })
        })
    })
}

fn all_tables(m1: usize, m2: usize, max_out: u32) -> Vec<FunctionTable> {
    let cells = m1 * m2;
    let mut out = Vec::new();
    let mut cur = vec![0u32; cells];
    fn rec(
        i: usize,
        used: u32,
        max_out: u32,
        cur: &mut Vec<u32>,
        m2: usize,
        out: &mut Vec<FunctionTable>,
    ) {
        if i == cur.len() {
            let rows = cur.chunks(m2).map(<[u32]>::to_vec).collect();
            out.push(FunctionTable::new(rows).unwrap());
            return;
        }
        for v in 0..=(used.min(max_out - 1)) {
            cur[i] = v;
            rec(i + 1, used.max(v + 1), max_out, cur, m2, out);
        }
    }
    rec(0, 0, max_out, &mut cur, m2, &mut out);
    out
}

#[test]
fn backtracker_agrees_with_brute_force_on_small_grids() {
    let structures: Vec<_> = (2..=7)
        .flat_map(|n| structures_of_size(n, Limits::default()).unwrap())
        .collect();
    let mut compared = 0;
    for (m1, m2) in [
        (1, 1),
        (1, 2),
        (2, 1),
        (2, 2),
        (1, 3),
        (3, 1),
        (2, 3),
        (3, 2),
    ] {
        for f in all_tables(m1, m2, 3) {
            for s in &structures {
                if s.carrier().size() < m1.max(m2) as u32 {
                    continue;
                }
                let fast = find_expansion(&f, s).unwrap();
                assert_eq!(
                    fast.is_some(),
                    brute_force_exists(&f, s),
                    "{f:?} {}",
                    s.describe()
                );
                if let Some(e) = fast {
                    e.validate(&f).unwrap();
                }
                compared += 1;
            }
        }
    }
    assert!(compared > 1000);
}

fn structure_of(kind: &str, n: u32, param: &[Elem]) -> ConfusableStructure {
    match kind {
        "field" => {
            let (p, k) = confuse_core::numbers::prime_power(n as u64).unwrap();
            FieldSpec::make(p as u32, k)
                .unwrap()
                .confusable_sets(param[0])
                .unwrap()
        }
        _ => ring_confusable_sets(&RingSpec::new(n, param.to_vec()).unwrap()).unwrap(),
    }
}

#[test]
fn known_expansions_are_found() {
    let cases: [(&str, &str, u32, &[Elem], &[Elem], &[Elem]); 7] = [
        ("equal3", "field", 3, &[1], &[0, 1, 2], &[0, 2, 1]),
        ("selected_switch", "ring", 6, &[1, 5], &[4, 2], &[0, 2, 5]),
        ("four_output", "field", 7, &[3], &[0, 3], &[2, 3, 4]),
        ("z4_example", "ring", 4, &[1, 3], &[1, 0], &[0, 2]),
        ("and", "field", 3, &[1], &[0, 1], &[1, 2]),
        ("threshold_2x3", "field", 7, &[2], &[0, 3], &[1, 2, 3]),
        ("reveal_key", "ring", 8, &[1, 3], &[1, 2], &[0, 2, 6]),
    ];
    for (name, kind, n, param, m1, m2) in cases {
        let f = bundled_table(name).unwrap();
        let s = structure_of(kind, n, param);
        let all = all_expansions(&f, &s, usize::MAX).unwrap();
        let hit = all.iter().find(|e| e.map1 == m1 && e.map2 == m2);
        assert!(
            hit.is_some(),
            "{name}: worked maps not among {} solutions",
            all.len()
        );
        hit.unwrap().validate(&f).unwrap();
        assert_eq!(
            find_expansion(&f, &s).unwrap().as_ref(),
            all.iter().find(|e| e.map1[0] == 0)
        );
    }
}

#[test]
fn search_order_and_first_hits() {
    let and = FunctionTable::and();
    let hits = search_expansions(
        &and,
        SearchBounds {
            max_carrier: 8,
            ..Default::default()
        },
    )
    .unwrap();
    let first = &hits[0];
    assert_eq!(first.structure.carrier().label(), "F_3");
    assert_eq!(
        (first.map1.as_slice(), first.map2.as_slice()),
        (&[0, 1][..], &[1, 2][..])
    );

    let z4 = bundled_table("z4_example").unwrap();
    let hits = search_expansions(
        &z4,
        SearchBounds {
            max_carrier: 8,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(hits[0].structure.carrier().label(), "Z_4");
    assert_eq!(hits[0].structure.randomizer(), &[1, 3]);

    let many = search_expansions(
        &and,
        SearchBounds {
            max_carrier: 9,
            kind: CarrierKind::Any,
            limit: usize::MAX,
        },
    )
    .unwrap();
    let sizes: Vec<u32> = many.iter().map(|e| e.structure.carrier().size()).collect();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    let rings = search_expansions(
        &and,
        SearchBounds {
            max_carrier: 9,
            kind: CarrierKind::Ring,
            limit: usize::MAX,
        },
    )
    .unwrap();
    assert!(rings.iter().all(|e| !e.structure.carrier().is_field()));
    assert!(!rings.is_empty());
}

#[test]
fn search_is_deterministic_and_serializable() {
    let f = FunctionTable::equal(3);
    let a = search_expansions(
        &f,
        SearchBounds {
            limit: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let b = search_expansions(
        &f,
        SearchBounds {
            limit: 5,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(a, b);
    let json = serde_json::to_string(&a[0]).unwrap();
    let back: confuse_core::FeasibleExpansion = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a[0]);
}

#[test]
fn converse_reports() {
    let eq = FunctionTable::equal(3);
    let hit = search_expansions(&eq, SearchBounds::default()).unwrap();
    let r = converse_report(&eq, hit.first());
    assert_eq!(
        r.converse,
        Some((Rate::of_alphabet(3), Rate::of_alphabet(3)))
    );
    assert_eq!(r.optimal, Some(true));

    let and = FunctionTable::and();
    let hit = search_expansions(&and, SearchBounds::default()).unwrap();
    let r = converse_report(&and, hit.first());
    assert_eq!(
        r.converse,
        Some((Rate::of_alphabet(2), Rate::of_alphabet(2)))
    );
    assert_eq!(
        r.achieved,
        Some((Rate::of_alphabet(3), Rate::of_alphabet(3)))
    );
    assert_eq!(r.optimal, Some(false));

    let dup = FunctionTable::new(vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
    let r = converse_report(&dup, None);
    assert!(r.identical_rows && !r.identical_cols);
    assert_eq!(r.converse, None);
}

#[test]
fn tampered_expansions_fail_validation() {
    let f = FunctionTable::equal(3);
    let s = structure_of("field", 3, &[1]);
    let mut e = find_expansion(&f, &s).unwrap().unwrap();
    e.map2.swap(1, 2);
    assert!(e.validate(&f).is_err());
    let mut e = find_expansion(&f, &s).unwrap().unwrap();
    e.map1[1] = e.map1[0];
    assert!(e.validate(&f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn found_expansions_always_validate(
        rows in prop::collection::vec(prop::collection::vec(0u32..4, 3), 1..4),
        n in 3u32..12,
    ) {
        let f = FunctionTable::from_values(&rows).unwrap();
        for s in structures_of_size(n, Limits::default()).unwrap() {
            if let Some(e) = find_expansion(&f, &s).unwrap() {
                prop_assert!(e.validate(&f).is_ok());
                prop_assert_eq!(e.map1[0], 0);
            }
        }
    }
}
