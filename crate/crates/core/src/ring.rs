//! The ring `Z_n`: gcd classes, subgroups of the unit group, subgroup
//! projections and the coset-based confusable sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numbers::{divisors, gcd};
use crate::structures::{Carrier, ConfusableStructure, Provenance};
use crate::Elem;

/// `Z_n` with a chosen subgroup `G` of `Z_n^×` acting as the randomizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingSpecRepr", into = "RingSpecRepr")]
pub struct RingSpec {
    n: u32,
    group: Vec<Elem>,
}

#[derive(Serialize, Deserialize)]
struct RingSpecRepr {
    n: u32,
    #[serde(rename = "G")]
    group: Vec<Elem>,
}

impl TryFrom<RingSpecRepr> for RingSpec {
    type Error = Error;
    fn try_from(r: RingSpecRepr) -> Result<Self> {
        RingSpec::new(r.n, r.group)
    }
}

impl From<RingSpec> for RingSpecRepr {
    fn from(r: RingSpec) -> Self {
        RingSpecRepr {
            n: r.n,
            group: r.group,
        }
    }
}

impl RingSpec {
    pub fn new(n: u32, mut group: Vec<Elem>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRing(format!("modulus {n} < 2")));
        }
        group.sort_unstable();
        group.dedup();
        if !group.contains(&1) {
            return Err(Error::InvalidRing("subgroup must contain 1".into()));
        }
        for &g in &group {
            if g >= n || gcd(g as u64, n as u64) != 1 {
                return Err(Error::InvalidRing(format!("{g} is not a unit mod {n}")));
            }
        }
        let members: BTreeSet<Elem> = group.iter().copied().collect();
        for &a in &group {
            for &b in &group {
                if !members.contains(&mul_mod(a, b, n)) {
                    return Err(Error::InvalidRing(format!(
                        "{a}·{b} mod {n} leaves the set"
                    )));
                }
            }
        }
        Ok(RingSpec { n, group })
    }

    /// `Z_n` with the full unit group as randomizer.
    pub fn full(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRing(format!("modulus {n} < 2")));
        }
        Self::new(n, units(n))
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn group(&self) -> &[Elem] {
        &self.group
    }
}

/// `Z_n^(d) = {a ∈ Z_n : gcd(a, n) = d}` for a proper divisor `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdClass {
    pub d: u32,
    pub members: Vec<Elem>,
}

/// `G_n mod d` as `multiplicity` copies of the subgroup `base_subgroup ≤ Z_d^×`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub d: u32,
    pub base_subgroup: Vec<Elem>,
    pub multiplicity: u32,
}

pub(crate) fn mul_mod(a: Elem, b: Elem, n: u32) -> Elem {
    ((a as u64 * b as u64) % n as u64) as Elem
}

/// The unit group `Z_n^×`, ascending.
pub fn units(n: u32) -> Vec<Elem> {
    (1..n).filter(|&a| gcd(a as u64, n as u64) == 1).collect()
}

/// One class per proper divisor of `n`, ordered by divisor. Zero is not
/// included (its gcd with `n` is `n` itself).
pub fn gcd_classes(n: u32) -> Vec<GcdClass> {
    let mut by_d: BTreeMap<u32, Vec<Elem>> = BTreeMap::new();
    for a in 1..n {
        by_d.entry(gcd(a as u64, n as u64) as u32)
            .or_default()
            .push(a);
    }
    by_d.into_iter()
        .map(|(d, members)| GcdClass { d, members })
        .collect()
}

/// Smallest subgroup of `Z_n^×` containing `generators`, ascending.
pub fn closure(n: u32, generators: &[Elem]) -> Vec<Elem> {
    let mut seen = BTreeSet::from([1 % n]);
    let mut queue = VecDeque::from([1 % n]);
    while let Some(a) = queue.pop_front() {
        for &g in generators {
            let b = mul_mod(a, g, n);
            if seen.insert(b) {
                queue.push_back(b);
            }
        }
    }
    seen.into_iter().collect()
}

/// Every subgroup of `Z_n^×`, ordered by size and then lexicographically.
///
/// Breadth-first from the trivial subgroup: each known subgroup `H` is
/// extended by one representative of every nontrivial coset of `H` and
/// closed under multiplication. Every subgroup is reached because each one is
/// generated by adjoining its elements one at a time.
pub fn enumerate_subgroups(n: u32) -> Result<Vec<Vec<Elem>>> {
    enumerate_subgroups_bounded(n, Limits::default().max_ring)
}

pub fn enumerate_subgroups_bounded(n: u32, bound: u64) -> Result<Vec<Vec<Elem>>> {
    if n < 2 {
        return Err(Error::InvalidRing(format!("modulus {n} < 2")));
    }
    if n as u64 > bound {
        return Err(Error::SizeBoundExceeded {
            size: n as u64,
            bound,
        });
    }
    let unit_group = units(n);
    let trivial = vec![1];
    let mut found: BTreeSet<Vec<Elem>> = BTreeSet::from([trivial.clone()]);
    let mut queue = VecDeque::from([trivial]);
    while let Some(h) = queue.pop_front() {
        let members: BTreeSet<Elem> = h.iter().copied().collect();
        let mut covered: BTreeSet<Elem> = members.clone();
        for &u in &unit_group {
            if covered.contains(&u) {
                continue;
            }
            for &g in &h {
                covered.insert(mul_mod(u, g, n));
            }
            let mut gens = h.clone();
            gens.push(u);
            let bigger = closure(n, &gens);
            if found.insert(bigger.clone()) {
                queue.push_back(bigger);
            }
        }
    }
    let mut out: Vec<Vec<Elem>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Reduce `G_n` modulo `d` and check that the multiset is a uniform cover of
/// a subgroup of `Z_d^×`.
pub fn project_subgroup(spec: &RingSpec, d: u32) -> Result<ProjectionReport> {
    if d <= 1 || !spec.n.is_multiple_of(d) {
        return Err(Error::NotADivisor {
            divisor: d as u64,
            value: spec.n as u64,
        });
    }
    let mut counts: BTreeMap<Elem, u32> = BTreeMap::new();
    for &g in &spec.group {
        *counts.entry(g % d).or_insert(0) += 1;
    }
    let violation = Error::ProjectionViolation { divisor: d };
    let multiplicity = *counts.values().next().expect("subgroup is nonempty");
    if counts.values().any(|&c| c != multiplicity) {
        return Err(violation);
    }
    let base: Vec<Elem> = counts.keys().copied().collect();
    let base_set: BTreeSet<Elem> = base.iter().copied().collect();
    let closed = base.iter().all(|&a| {
        gcd(a as u64, d as u64) == 1 && base.iter().all(|&b| base_set.contains(&mul_mod(a, b, d)))
    });
    if !closed || !base_set.contains(&1) {
        return Err(violation);
    }
    Ok(ProjectionReport {
        d,
        base_subgroup: base,
        multiplicity,
    })
}

/// Confusable sets of `Z_n` for the randomizer `G_n`: `{0}` plus, for every
/// proper divisor `d`, the cosets of `G_{n/d}` in `Z_{n/d}^×` scaled by `d`.
pub fn ring_confusable_sets(spec: &RingSpec) -> Result<ConfusableStructure> {
    let n = spec.n;
    let mut sets = vec![vec![0]];
    for d in divisors(n as u64).into_iter().map(|d| d as u32) {
        if d == n {
            continue;
        }
        let m = n / d;
        let base = project_subgroup(spec, m)?.base_subgroup;
        let mut covered = BTreeSet::new();
        for u in units(m) {
            if covered.contains(&u) {
                continue;
            }
            let mut coset: Vec<Elem> = base.iter().map(|&g| mul_mod(u, g, m)).collect();
            coset.sort_unstable();
            covered.extend(coset.iter().copied());
            sets.push(coset.into_iter().map(|c| c * d).collect());
        }
    }
    for set in &mut sets {
        set.sort_unstable();
    }
    sets.sort_by_key(|s| s[0]);
    ConfusableStructure::new(
        Carrier::Ring(n),
        spec.group.clone(),
        sets,
        Provenance::Subgroup(spec.group.clone()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_classes_of_15_and_12() {
        let c = gcd_classes(15);
        assert_eq!(
            c,
            vec![
                GcdClass {
                    d: 1,
                    members: vec![1, 2, 4, 7, 8, 11, 13, 14]
                },
                GcdClass {
                    d: 3,
                    members: vec![3, 6, 9, 12]
                },
                GcdClass {
                    d: 5,
                    members: vec![5, 10]
                },
            ]
        );
        let c12: Vec<_> = gcd_classes(12)
            .into_iter()
            .map(|c| (c.d, c.members))
            .collect();
        assert_eq!(
            c12,
            vec![
                (1, vec![1, 5, 7, 11]),
                (2, vec![2, 10]),
                (3, vec![3, 9]),
                (4, vec![4, 8]),
                (6, vec![6]),
            ]
        );
        assert_eq!(
            gcd_classes(7),
            vec![GcdClass {
                d: 1,
                members: (1..7).collect()
            }]
        );
    }

    #[test]
    fn subgroups_of_small_moduli() {
        assert_eq!(enumerate_subgroups(3).unwrap(), vec![vec![1], vec![1, 2]]);
        let s15 = enumerate_subgroups(15).unwrap();
        assert_eq!(s15.len(), 8);
        assert!(s15.contains(&vec![1, 11]));
        assert!(s15.contains(&vec![1, 4, 11, 14]));
        assert_eq!(s15.last().unwrap(), &units(15));
        assert_eq!(enumerate_subgroups(16).unwrap().len(), 8);
        assert!(matches!(
            enumerate_subgroups(1000),
            Err(Error::SizeBoundExceeded { size: 1000, .. })
        ));
    }

    #[test]
    fn projections_of_z15_subgroups() {
        let cases = [
            (vec![1, 11], 5, vec![1], 2),
            (vec![1, 11], 3, vec![1, 2], 1),
            (vec![1, 4, 11, 14], 3, vec![1, 2], 2),
            (vec![1, 4, 11, 14], 5, vec![1, 4], 2),
            (units(15), 3, vec![1, 2], 4),
            (units(15), 5, vec![1, 2, 3, 4], 2),
        ];
        for (g, d, base, k) in cases {
            let spec = RingSpec::new(15, g).unwrap();
            let r = project_subgroup(&spec, d).unwrap();
            assert_eq!((r.base_subgroup, r.multiplicity), (base, k));
        }
        let spec = RingSpec::full(15).unwrap();
        assert!(project_subgroup(&spec, 1).is_err());
        assert!(project_subgroup(&spec, 4).is_err());
    }

    #[test]
    fn ring_spec_validation() {
        assert!(RingSpec::new(15, vec![1, 11]).is_ok());
        assert!(RingSpec::new(15, vec![1, 2]).is_err());
        assert!(RingSpec::new(15, vec![1, 3]).is_err());
        assert!(RingSpec::new(15, vec![11]).is_err());
        let json = serde_json::to_string(&RingSpec::new(15, vec![11, 1]).unwrap()).unwrap();
        assert_eq!(json, r#"{"n":15,"G":[1,11]}"#);
    }

    #[test]
    fn confusable_sets_worked_examples() {
        let s = ring_confusable_sets(&RingSpec::new(15, vec![1, 11]).unwrap()).unwrap();
        assert_eq!(
            s.sets(),
            &[
                vec![0],
                vec![1, 11],
                vec![2, 7],
                vec![3],
                vec![4, 14],
                vec![5, 10],
                vec![6],
                vec![8, 13],
                vec![9],
                vec![12]
            ]
        );
        let s = ring_confusable_sets(&RingSpec::new(15, vec![1, 4, 11, 14]).unwrap()).unwrap();
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
        let s = ring_confusable_sets(&RingSpec::new(6, vec![1, 5]).unwrap()).unwrap();
        assert_eq!(s.sets(), &[vec![0], vec![1, 5], vec![2, 4], vec![3]]);
        assert_eq!(s.randomizer(), &[1, 5]);
    }
}
