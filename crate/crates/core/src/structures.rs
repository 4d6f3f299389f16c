//! Carriers, confusable structures and the reference catalogs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::limits::Limits;
use crate::numbers::{is_prime, prime_power};
use crate::ring::{enumerate_subgroups_bounded, mul_mod, ring_confusable_sets, RingSpec};
use crate::Elem;

/// The algebraic object hosting an expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Carrier {
    Field(Arc<FieldSpec>),
    Ring(u32),
}

/// Serializable description of a carrier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CarrierDescriptor {
    Field {
        p: u32,
        n: u32,
        h: Vec<u32>,
        g: Elem,
    },
    Ring {
        n: u32,
    },
}

impl Carrier {
    pub fn field(spec: FieldSpec) -> Self {
        Carrier::Field(Arc::new(spec))
    }

    pub fn size(&self) -> u32 {
        match self {
            Carrier::Field(f) => f.order(),
            Carrier::Ring(n) => *n,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Carrier::Field(_))
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Carrier::Field(f) => f.add(a, b),
            Carrier::Ring(n) => ((a as u64 + b as u64) % *n as u64) as Elem,
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        match self {
            Carrier::Field(f) => f.neg(a),
            Carrier::Ring(n) => (*n - a % *n) % *n,
        }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Carrier::Field(f) => f.mul(a, b),
            Carrier::Ring(n) => mul_mod(a, b, *n),
        }
    }

    pub fn format(&self, a: Elem) -> String {
        match self {
            Carrier::Field(f) => f.format(a),
            Carrier::Ring(_) => a.to_string(),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Elem> {
        match self {
            Carrier::Field(f) => f.parse(s),
            Carrier::Ring(n) => s
                .trim()
                .parse::<Elem>()
                .ok()
                .filter(|a| a < n)
                .ok_or_else(|| Error::InvalidRing(format!("cannot parse element {s:?}"))),
        }
    }

    /// `F_7`, `F_3^2`, `Z_15`.
    pub fn label(&self) -> String {
        match self {
            Carrier::Field(f) if f.degree() == 1 => format!("F_{}", f.order()),
            Carrier::Field(f) => format!("F_{}^{}", f.characteristic(), f.degree()),
            Carrier::Ring(n) => format!("Z_{n}"),
        }
    }

    pub fn descriptor(&self) -> CarrierDescriptor {
        match self {
            Carrier::Field(f) => CarrierDescriptor::Field {
                p: f.characteristic(),
                n: f.degree(),
                h: f.modulus().to_vec(),
                g: f.generator(),
            },
            Carrier::Ring(n) => CarrierDescriptor::Ring { n: *n },
        }
    }

    pub fn from_descriptor(d: &CarrierDescriptor) -> Result<Self> {
        match d {
            CarrierDescriptor::Field { p, n, h, g } => {
                if h.len() != *n as usize + 1 {
                    return Err(Error::InvalidField("modulus degree mismatch".into()));
                }
                Ok(Carrier::field(FieldSpec::new(*p, h.clone(), *g)?))
            }
            CarrierDescriptor::Ring { n } if *n >= 2 => Ok(Carrier::Ring(*n)),
            CarrierDescriptor::Ring { n } => Err(Error::InvalidRing(format!("modulus {n} < 2"))),
        }
    }
}

/// Where a structure came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Field structure for a divisor `d` of `q - 1`.
    Divisor(u32),
    /// Ring structure for the randomizer subgroup `G_n`.
    Subgroup(Vec<Elem>),
    /// Supplied directly.
    Custom,
}

/// A partition of the carrier into confusable sets together with the
/// randomizer support `S*`. Construction verifies the partition and the
/// randomization property, so every value of this type is valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StructureRepr", into = "StructureRepr")]
pub struct ConfusableStructure {
    carrier: Carrier,
    randomizer: Vec<Elem>,
    sets: Vec<Vec<Elem>>,
    zero_index: usize,
    provenance: Provenance,
    index: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct StructureRepr {
    carrier: CarrierDescriptor,
    randomizer: Vec<Elem>,
    sets: Vec<Vec<Elem>>,
    zero_index: usize,
    provenance: Provenance,
}

impl TryFrom<StructureRepr> for ConfusableStructure {
    type Error = Error;
    fn try_from(r: StructureRepr) -> Result<Self> {
        let s = ConfusableStructure::new(
            Carrier::from_descriptor(&r.carrier)?,
            r.randomizer,
            r.sets,
            r.provenance,
        )?;
        if s.zero_index != r.zero_index {
            return Err(Error::InvalidStructure(
                "zero_index does not point at {0}".into(),
            ));
        }
        Ok(s)
    }
}

impl From<ConfusableStructure> for StructureRepr {
    fn from(s: ConfusableStructure) -> Self {
        StructureRepr {
            carrier: s.carrier.descriptor(),
            randomizer: s.randomizer,
            sets: s.sets,
            zero_index: s.zero_index,
            provenance: s.provenance,
        }
    }
}

impl ConfusableStructure {
    pub fn new(
        carrier: Carrier,
        mut randomizer: Vec<Elem>,
        mut sets: Vec<Vec<Elem>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let size = carrier.size() as usize;
        randomizer.sort_unstable();
        randomizer.dedup();
        if randomizer.is_empty() || randomizer.iter().any(|&g| g as usize >= size) {
            return Err(Error::InvalidStructure(
                "randomizer support out of range".into(),
            ));
        }
        let mut index = vec![usize::MAX; size];
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            if set.is_empty() {
                return Err(Error::InvalidStructure(format!("set {i} is empty")));
            }
            for &a in set.iter() {
                if a as usize >= size {
                    return Err(Error::InvalidStructure(format!(
                        "{a} is outside the carrier"
                    )));
                }
                if index[a as usize] != usize::MAX {
                    return Err(Error::InvalidStructure(format!("{a} appears in two sets")));
                }
                index[a as usize] = i;
            }
        }
        if let Some(missing) = index.iter().position(|&i| i == usize::MAX) {
            return Err(Error::InvalidStructure(format!("{missing} is not covered")));
        }
        let zero_index = index[0];
        if sets[zero_index].len() != 1 {
            return Err(Error::InvalidStructure("zero must form its own set".into()));
        }
        check_randomization(&carrier, &randomizer, &sets).map_err(Error::InvalidStructure)?;
        Ok(ConfusableStructure {
            carrier,
            randomizer,
            sets,
            zero_index,
            provenance,
            index,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn randomizer(&self) -> &[Elem] {
        &self.randomizer
    }

    pub fn sets(&self) -> &[Vec<Elem>] {
        &self.sets
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Index of the set containing `a`.
    pub fn index_of(&self, a: Elem) -> usize {
        self.index[a as usize]
    }

    /// The partition as an order-independent value, for comparisons.
    pub fn unordered_sets(&self) -> BTreeSet<Vec<Elem>> {
        self.sets.iter().cloned().collect()
    }

    pub fn describe(&self) -> String {
        let fmt = |s: &[Elem]| {
            let items: Vec<String> = s.iter().map(|&a| self.carrier.format(a)).collect();
            format!("{{{}}}", items.join(", "))
        };
        let sets: Vec<String> = self.sets.iter().map(|s| fmt(s)).collect();
        format!(
            "{} γ∈{} : {}",
            self.carrier.label(),
            fmt(&self.randomizer),
            sets.join(" ")
        )
    }
}

/// For every set `S` and every `s ∈ S`, the multiset `{γ·s : γ ∈ S*}` must be
/// `|S*|/|S|` copies of `S`.
pub fn check_randomization(
    carrier: &Carrier,
    randomizer: &[Elem],
    sets: &[Vec<Elem>],
) -> std::result::Result<(), String> {
    for set in sets {
        if !randomizer.len().is_multiple_of(set.len()) {
            return Err(format!(
                "|S*| = {} is not a multiple of |S| = {}",
                randomizer.len(),
                set.len()
            ));
        }
        let copies = randomizer.len() / set.len();
        for &s in set {
            let mut orbit: BTreeMap<Elem, usize> = BTreeMap::new();
            for &g in randomizer {
                *orbit.entry(carrier.mul(g, s)).or_insert(0) += 1;
            }
            let ok = orbit.len() == set.len() && set.iter().all(|a| orbit.get(a) == Some(&copies));
            if !ok {
                return Err(format!(
                    "orbit of {} under the randomizer is not uniform over its set",
                    carrier.format(s)
                ));
            }
        }
    }
    Ok(())
}

/// Every field structure (one per divisor of `q-1`) for prime powers
/// `q ≤ max_q`, then every ring structure (one per subgroup of `Z_n^×`) for
/// composite `n ≤ max_n`.
pub fn catalog_fields(max_q: u32) -> Result<Vec<CatalogEntry>> {
    catalog_fields_bounded(max_q, Limits::from_env())
}

pub fn catalog_fields_bounded(max_q: u32, limits: Limits) -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for q in 2..=max_q {
        let Some((p, n)) = prime_power(q as u64) else {
            continue;
        };
        let field = FieldSpec::make_bounded(p as u32, n, limits.max_field)?;
        for d in field.admissible_divisors() {
            let structure = field.confusable_sets(d)?;
            let trivial = d == 1 || d == q - 1;
            out.push(CatalogEntry { structure, trivial });
        }
    }
    Ok(out)
}

pub fn catalog_rings(max_n: u32) -> Result<Vec<CatalogEntry>> {
    catalog_rings_bounded(max_n, Limits::from_env())
}

pub fn catalog_rings_bounded(max_n: u32, limits: Limits) -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        if is_prime(n as u64) {
            continue;
        }
        for group in enumerate_subgroups_bounded(n, limits.max_ring)? {
            let trivial = group.len() == 1;
            let structure = ring_confusable_sets(&RingSpec::new(n, group)?)?;
            out.push(CatalogEntry { structure, trivial });
        }
    }
    Ok(out)
}

/// Every structure over one carrier size: field structures first (if `size`
/// is a prime power), then ring structures (if `size` is composite).
pub fn structures_of_size(size: u32, limits: Limits) -> Result<Vec<ConfusableStructure>> {
    let mut out = Vec::new();
    if let Some((p, n)) = prime_power(size as u64) {
        let field = FieldSpec::make_bounded(p as u32, n, limits.max_field)?;
        for d in field.admissible_divisors() {
            out.push(field.confusable_sets(d)?);
        }
    }
    if size >= 4 && !is_prime(size as u64) {
        for group in enumerate_subgroups_bounded(size, limits.max_ring)? {
            out.push(ring_confusable_sets(&RingSpec::new(size, group)?)?);
        }
    }
    Ok(out)
}

/// One catalog row. `trivial` marks the rows reference tables leave out:
/// fields with `d = 1` or `d = q - 1`, rings with `G = {1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub structure: ConfusableStructure,
    pub trivial: bool,
}

/// A catalog row rendered for output: elements as integers for prime fields
/// and rings, polynomial strings for extension fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedEntry {
    pub carrier: String,
    pub descriptor: CarrierDescriptor,
    pub provenance: Provenance,
    pub trivial: bool,
    pub randomizer: Vec<RenderedElem>,
    pub sets: Vec<Vec<RenderedElem>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RenderedElem {
    Int(Elem),
    Poly(String),
}

impl std::fmt::Display for RenderedElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenderedElem::Int(a) => write!(f, "{a}"),
            RenderedElem::Poly(s) => f.write_str(s),
        }
    }
}

impl CatalogEntry {
    pub fn render(&self) -> RenderedEntry {
        let c = self.structure.carrier();
        let poly = matches!(c, Carrier::Field(f) if f.degree() > 1);
        let r = |a: &Elem| {
            if poly {
                RenderedElem::Poly(c.format(*a))
            } else {
                RenderedElem::Int(*a)
            }
        };
        RenderedEntry {
            carrier: c.label(),
            descriptor: c.descriptor(),
            provenance: self.structure.provenance().clone(),
            trivial: self.trivial,
            randomizer: self.structure.randomizer().iter().map(r).collect(),
            sets: self
                .structure
                .sets()
                .iter()
                .map(|s| s.iter().map(r).collect())
                .collect(),
        }
    }
}

/// Transcribed reference table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceTable {
    /// `"field"` or `"ring"`.
    pub kind: String,
    /// Carriers of size strictly below this bound are covered.
    pub covers_below: u32,
    pub rows: Vec<ReferenceRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceRow {
    /// Carrier size `q` or `n`.
    pub size: u32,
    /// Generator listed for the field, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// Modulus listed for an extension field, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    pub gamma: Vec<String>,
    pub sets: Vec<Vec<String>>,
}

pub const REFERENCE_FIELDS: &str = include_str!("../data/reference/fields.json");
pub const REFERENCE_RINGS: &str = include_str!("../data/reference/rings.json");

impl ReferenceTable {
    pub fn bundled_fields() -> Self {
        serde_json::from_str(REFERENCE_FIELDS).expect("bundled field reference parses")
    }

    pub fn bundled_rings() -> Self {
        serde_json::from_str(REFERENCE_RINGS).expect("bundled ring reference parses")
    }
}

/// Outcome of comparing a catalog against a reference table as unordered
/// partitions. Trivial catalog rows are ignored; only carriers covered by
/// both sides are compared.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceDiff {
    pub compared_rows: usize,
    /// Rows in the catalog but not the reference.
    pub extra: Vec<String>,
    /// Rows in the reference but not the catalog.
    pub missing: Vec<String>,
    /// Modulus or generator disagreements.
    pub metadata: Vec<String>,
}

impl ReferenceDiff {
    pub fn is_clean(&self) -> bool {
        self.extra.is_empty() && self.missing.is_empty() && self.metadata.is_empty()
    }
}

type Partition = (Vec<Elem>, BTreeSet<Vec<Elem>>);

pub fn diff_against_reference(
    catalog: &[CatalogEntry],
    reference: &ReferenceTable,
    max_size: u32,
) -> Result<ReferenceDiff> {
    let limit = max_size.min(reference.covers_below.saturating_sub(1));
    let mut diff = ReferenceDiff::default();
    let mut ours: BTreeMap<u32, (Carrier, BTreeSet<Partition>)> = BTreeMap::new();
    for entry in catalog.iter().filter(|e| !e.trivial) {
        let c = entry.structure.carrier();
        if c.size() > limit {
            continue;
        }
        let slot = ours
            .entry(c.size())
            .or_insert_with(|| (c.clone(), BTreeSet::new()));
        slot.1.insert((
            entry.structure.randomizer().to_vec(),
            entry.structure.unordered_sets(),
        ));
    }
    let mut theirs: BTreeMap<u32, BTreeSet<Partition>> = BTreeMap::new();
    for row in reference.rows.iter().filter(|r| r.size <= limit) {
        diff.compared_rows += 1;
        let Some((carrier, _)) = ours.get(&row.size) else {
            diff.missing
                .push(format!("size {}: no catalog rows", row.size));
            continue;
        };
        if let (Some(h), Carrier::Field(f)) = (&row.h, carrier) {
            let ours_h = render_modulus(f.modulus());
            if normalize_poly(h) != ours_h {
                diff.metadata
                    .push(format!("{}: modulus {h} vs {ours_h}", carrier.label()));
            }
        }
        if let Some(g) = &row.g {
            if carrier.parse(g)? != generator_of(carrier) {
                diff.metadata
                    .push(format!("{}: generator {g} differs", carrier.label()));
            }
        }
        let parse_all = |items: &[String]| -> Result<Vec<Elem>> {
            let mut v = items
                .iter()
                .map(|s| carrier.parse(s))
                .collect::<Result<Vec<_>>>()?;
            v.sort_unstable();
            Ok(v)
        };
        let gamma = parse_all(&row.gamma)?;
        let sets = row
            .sets
            .iter()
            .map(|s| parse_all(s))
            .collect::<Result<BTreeSet<_>>>()?;
        theirs.entry(row.size).or_default().insert((gamma, sets));
    }
    for (size, (carrier, rows)) in &ours {
        let empty = BTreeSet::new();
        let other = theirs.get(size).unwrap_or(&empty);
        for row in rows.difference(other) {
            diff.extra.push(render_partition(carrier, row));
        }
        for row in other.difference(rows) {
            diff.missing.push(render_partition(carrier, row));
        }
    }
    Ok(diff)
}

fn generator_of(c: &Carrier) -> Elem {
    match c {
        Carrier::Field(f) => f.generator(),
        Carrier::Ring(_) => 0,
    }
}

fn render_modulus(h: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in h.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => var,
            _ => format!("{c}{var}"),
        });
    }
    terms.join("+")
}

fn normalize_poly(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
        .collect()
}

fn render_partition(carrier: &Carrier, (gamma, sets): &Partition) -> String {
    let fmt = |s: &[Elem]| {
        let v: Vec<String> = s.iter().map(|&a| carrier.format(a)).collect();
        format!("{{{}}}", v.join(","))
    };
    let sets: Vec<String> = sets.iter().map(|s| fmt(s)).collect();
    format!("{} γ∈{} : {}", carrier.label(), fmt(gamma), sets.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lookup() {
        let s = ring_confusable_sets(&RingSpec::new(6, vec![1, 5]).unwrap()).unwrap();
        assert_eq!(s.sets()[s.index_of(4)], vec![2, 4]);
        assert_eq!(s.index_of(0), s.zero_index());
        let f7 = FieldSpec::make(7, 1).unwrap().confusable_sets(2).unwrap();
        assert_eq!(f7.sets()[f7.index_of(5)], vec![3, 5, 6]);
    }

    #[test]
    fn rejects_non_partitions_and_bad_randomizers() {
        let c = Carrier::Ring(6);
        let bad = ConfusableStructure::new(
            c.clone(),
            vec![1, 5],
            vec![vec![0], vec![1, 5], vec![2, 4]],
            Provenance::Custom,
        );
        assert!(bad.is_err());
        // {1,2} is not fixed by multiplication with 5
        let bad = ConfusableStructure::new(
            c.clone(),
            vec![1, 5],
            vec![vec![0], vec![1, 2], vec![4, 5], vec![3]],
            Provenance::Custom,
        );
        assert!(bad.is_err());
        let ok = ConfusableStructure::new(
            c,
            vec![1],
            (0..6).map(|a| vec![a]).collect(),
            Provenance::Custom,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn small_catalog_rows() {
        let fields = catalog_fields(5).unwrap();
        let f5: Vec<_> = fields
            .iter()
            .filter(|e| e.structure.carrier().size() == 5)
            .collect();
        let d2 = f5
            .iter()
            .find(|e| e.structure.provenance() == &Provenance::Divisor(2))
            .unwrap();
        assert_eq!(d2.structure.sets(), &[vec![0], vec![1, 4], vec![2, 3]]);
        assert_eq!(d2.structure.randomizer(), &[1, 4]);
        assert!(!d2.trivial);
        let d1 = f5
            .iter()
            .find(|e| e.structure.provenance() == &Provenance::Divisor(1))
            .unwrap();
        assert_eq!(d1.structure.sets().len(), 2);
        assert!(d1.trivial);
        let two = catalog_fields(2).unwrap();
        assert_eq!(two.len(), 1);
        assert!(two[0].trivial);
    }

    #[test]
    fn f13_d4_row() {
        let f = FieldSpec::make(13, 1).unwrap();
        let s = f.confusable_sets(3).unwrap();
        assert_eq!(s.randomizer(), &[1, 5, 8, 12]);
        assert_eq!(
            s.sets(),
            &[
                vec![0],
                vec![1, 5, 8, 12],
                vec![2, 3, 10, 11],
                vec![4, 6, 7, 9]
            ]
        );
    }

    #[test]
    fn ring_catalog_rows() {
        let rings = catalog_rings(9).unwrap();
        let find = |n: u32, g: &[Elem]| {
            rings
                .iter()
                .find(|e| e.structure.carrier().size() == n && e.structure.randomizer() == g)
                .unwrap()
                .structure
                .sets()
                .to_vec()
        };
        assert_eq!(
            find(8, &[1, 5]),
            vec![vec![0], vec![1, 5], vec![2], vec![3, 7], vec![4], vec![6]]
        );
        assert_eq!(find(4, &[1, 3]), vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(
            find(9, &[1, 4, 7]),
            vec![vec![0], vec![1, 4, 7], vec![2, 5, 8], vec![3], vec![6]]
        );
        assert!(rings
            .iter()
            .all(|e| !is_prime(e.structure.carrier().size() as u64)));
    }

    #[test]
    fn structure_json_round_trip() {
        let f = FieldSpec::make(2, 4).unwrap();
        let s = f.confusable_sets(3).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: ConfusableStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
