use std::collections::{BTreeMap, BTreeSet};

use confuse_core::structures::{
    catalog_fields, catalog_rings, diff_against_reference, Carrier, Provenance, ReferenceTable,
    RenderedElem,
};
use confuse_core::Elem;

#[test]
fn field_catalog_matches_reference() {
    let cat = catalog_fields(20).unwrap();
    let diff = diff_against_reference(&cat, &ReferenceTable::bundled_fields(), 20).unwrap();
    assert!(diff.is_clean(), "{diff:#?}");
    assert_eq!(diff.compared_rows, 20);
}

#[test]
fn ring_catalog_matches_reference() {
    let cat = catalog_rings(20).unwrap();
    let diff = diff_against_reference(&cat, &ReferenceTable::bundled_rings(), 20).unwrap();
    assert!(diff.is_clean(), "{diff:#?}");
    assert_eq!(diff.compared_rows, 35);
}

#[test]
fn tampered_reference_is_reported() {
    let cat = catalog_rings(20).unwrap();
    let mut reference = ReferenceTable::bundled_rings();
    reference.rows[0].sets[1] = vec!["1".into()];
    reference.rows[0].sets.push(vec!["3".into()]);
    let diff = diff_against_reference(&cat, &reference, 20).unwrap();
    assert!(!diff.is_clean());
    assert_eq!(diff.extra.len(), 1);
    assert_eq!(diff.missing.len(), 1);

    let mut reference = ReferenceTable::bundled_fields();
    reference.rows[3].h = Some("x^2+1".into());
    let diff = diff_against_reference(&catalog_fields(20).unwrap(), &reference, 20).unwrap();
    assert_eq!(diff.metadata.len(), 1);
}

#[test]
fn trivial_rows_are_flagged() {
    for e in catalog_fields(20).unwrap() {
        let q = e.structure.carrier().size();
        let Provenance::Divisor(d) = *e.structure.provenance() else {
            panic!("field rows carry a divisor");
        };
        assert_eq!(e.trivial, d == 1 || d == q - 1);
        if d == 1 {
            assert_eq!(e.structure.sets().len(), 2);
        }
    }
    for e in catalog_rings(20).unwrap() {
        assert_eq!(e.trivial, e.structure.randomizer() == [1]);
    }
    let two = catalog_fields(2).unwrap();
    assert_eq!(two.len(), 1);
    assert!(two[0].trivial);
}

#[test]
fn catalogs_cover_the_expected_carriers() {
    let sizes: BTreeSet<u32> = catalog_fields(20)
        .unwrap()
        .iter()
        .map(|e| e.structure.carrier().size())
        .collect();
    assert_eq!(
        sizes,
        BTreeSet::from([2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19])
    );
    let mut per_n: BTreeMap<u32, usize> = BTreeMap::new();
    for e in catalog_rings(20).unwrap() {
        *per_n.entry(e.structure.carrier().size()).or_default() += 1;
    }
    assert_eq!(per_n[&15], 8);
    assert_eq!(per_n[&16], 8);
    assert_eq!(per_n[&4], 2);
    assert!(!per_n.contains_key(&7));
}

/// Independent re-check of the randomization property by direct counting.
fn orbit_uniform(c: &Carrier, gamma: &[Elem], set: &[Elem]) -> bool {
    set.iter().all(|&s| {
        let mut counts: BTreeMap<Elem, usize> = BTreeMap::new();
        for &g in gamma {
            *counts.entry(c.mul(g, s)).or_default() += 1;
        }
        let k = gamma.len() / set.len();
        counts.keys().copied().collect::<Vec<_>>() == set && counts.values().all(|&v| v == k)
    })
}

#[test]
fn every_cataloged_structure_randomizes_uniformly() {
    let all = catalog_fields(20)
        .unwrap()
        .into_iter()
        .chain(catalog_rings(20).unwrap());
    for e in all {
        let s = &e.structure;
        let mut covered: Vec<Elem> = s.sets().concat();
        covered.sort_unstable();
        assert_eq!(covered, (0..s.carrier().size()).collect::<Vec<_>>());
        for set in s.sets() {
            assert!(
                orbit_uniform(s.carrier(), s.randomizer(), set),
                "{}",
                s.describe()
            );
        }
    }
}

#[test]
fn rendered_rows_use_polynomials_for_extension_fields() {
    let cat = catalog_fields(9).unwrap();
    let f9 = cat
        .iter()
        .find(|e| e.structure.carrier().size() == 9 && e.structure.randomizer().len() == 2)
        .unwrap()
        .render();
    assert_eq!(f9.carrier, "F_3^2");
    assert!(f9.sets.iter().any(|s| s
        == &vec![
            RenderedElem::Poly("x".into()),
            RenderedElem::Poly("2x".into())
        ]));
    let json = serde_json::to_string(&f9).unwrap();
    assert!(json.contains("\"2x+1\""));
    let f5 = cat[cat
        .iter()
        .position(|e| e.structure.carrier().size() == 5)
        .unwrap()]
    .render();
    assert!(matches!(f5.sets[0][0], RenderedElem::Int(0)));
}
