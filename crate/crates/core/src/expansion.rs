//! Function tables and the search for feasible expanded functions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::rate::Rate;
use crate::structures::{structures_of_size, ConfusableStructure};
use crate::Elem;

/// `f(W1, W2)` as an `m1 × m2` matrix of labels `0..output_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct FunctionTable {
    m1: u32,
    m2: u32,
    outputs: Vec<Vec<u32>>,
    output_count: u32,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    m1: u32,
    m2: u32,
    outputs: Vec<Vec<u32>>,
}

impl TryFrom<TableRepr> for FunctionTable {
    type Error = Error;
    fn try_from(r: TableRepr) -> Result<Self> {
        let t = FunctionTable::new(r.outputs)?;
        if t.m1 != r.m1 || t.m2 != r.m2 {
            return Err(Error::InvalidTable(format!(
                "declared {}x{} but outputs are {}x{}",
                r.m1, r.m2, t.m1, t.m2
            )));
        }
        Ok(t)
    }
}

impl From<FunctionTable> for TableRepr {
    fn from(t: FunctionTable) -> Self {
        TableRepr {
            m1: t.m1,
            m2: t.m2,
            outputs: t.outputs,
        }
    }
}

impl FunctionTable {
    /// Labels must be exactly `0..k` for some `k`, each used at least once.
    pub fn new(outputs: Vec<Vec<u32>>) -> Result<Self> {
        let m1 = outputs.len();
        let m2 = outputs.first().map_or(0, Vec::len);
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if outputs.iter().any(|r| r.len() != m2) {
            return Err(Error::InvalidTable("ragged rows".into()));
        }
        let max = outputs.iter().flatten().copied().max().unwrap_or(0);
        let mut used = vec![false; max as usize + 1];
        for &v in outputs.iter().flatten() {
            used[v as usize] = true;
        }
        if let Some(gap) = used.iter().position(|u| !u) {
            return Err(Error::InvalidTable(format!("label {gap} is never used")));
        }
        Ok(FunctionTable {
            m1: m1 as u32,
            m2: m2 as u32,
            outputs,
            output_count: max + 1,
        })
    }

    /// Relabel arbitrary values by order of first appearance (row-major).
    pub fn from_values<T: Ord + Clone>(values: &[Vec<T>]) -> Result<Self> {
        let mut seen: BTreeMap<T, u32> = BTreeMap::new();
        let outputs = values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        let next = seen.len() as u32;
                        *seen.entry(v.clone()).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        FunctionTable::new(outputs)
    }

    /// `Yes` (label 0) on the diagonal, `No` (label 1) elsewhere.
    pub fn equal(m: u32) -> Self {
        let outputs = (0..m)
            .map(|i| (0..m).map(|j| u32::from(i != j)).collect())
            .collect();
        FunctionTable::new(outputs).expect("equal table is valid")
    }

    pub fn and() -> Self {
        FunctionTable::new(vec![vec![0, 0], vec![0, 1]]).expect("valid")
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn m2(&self) -> u32 {
        self.m2
    }

    pub fn output_count(&self) -> u32 {
        self.output_count
    }

    pub fn outputs(&self) -> &[Vec<u32>] {
        &self.outputs
    }

    pub fn get(&self, w1: u32, w2: u32) -> u32 {
        self.outputs[w1 as usize][w2 as usize]
    }

    /// Same table up to a renaming of output labels.
    pub fn normalized(&self) -> Self {
        FunctionTable::from_values(&self.outputs).expect("already valid")
    }

    pub fn has_identical_rows(&self) -> bool {
        let rows = &self.outputs;
        (0..rows.len()).any(|i| (i + 1..rows.len()).any(|j| rows[i] == rows[j]))
    }

    pub fn has_identical_cols(&self) -> bool {
        let m2 = self.m2 as usize;
        let col = |j: usize| self.outputs.iter().map(move |r| r[j]);
        (0..m2).any(|i| (i + 1..m2).any(|j| col(i).eq(col(j))))
    }
}

/// Invertible relabelings `W1 → W̃1`, `W2 → W̃2` and the correspondence
/// between confusable sets and output labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleExpansion {
    pub structure: ConfusableStructure,
    pub map1: Vec<Elem>,
    pub map2: Vec<Elem>,
    /// `out_map[i]` is the label of set `i`, `None` for sets never hit.
    pub out_map: Vec<Option<u32>>,
}

impl FeasibleExpansion {
    /// Re-check every cell of `f` against the expansion, independently of
    /// the search that produced it.
    pub fn validate(&self, f: &FunctionTable) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidExpansion(m));
        let c = self.structure.carrier();
        let size = c.size();
        if self.map1.len() != f.m1() as usize || self.map2.len() != f.m2() as usize {
            return bad("map lengths do not match the table".into());
        }
        if self.out_map.len() != self.structure.sets().len() {
            return bad("out_map length differs from the number of sets".into());
        }
        for (name, map) in [("map1", &self.map1), ("map2", &self.map2)] {
            let mut seen = vec![false; size as usize];
            for &a in map {
                if a >= size || std::mem::replace(&mut seen[a as usize], true) {
                    return bad(format!("{name} is not injective into the carrier"));
                }
            }
        }
        let mut label_set: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, l) in self.out_map.iter().enumerate() {
            if let Some(l) = l {
                if label_set.insert(*l, i).is_some() {
                    return bad(format!("label {l} is assigned to two sets"));
                }
            }
        }
        let mut hit = vec![false; self.out_map.len()];
        for (w1, &a) in self.map1.iter().enumerate() {
            for (w2, &b) in self.map2.iter().enumerate() {
                let idx = self.structure.index_of(c.add(a, b));
                hit[idx] = true;
                let want = f.get(w1 as u32, w2 as u32);
                if self.out_map[idx] != Some(want) {
                    return bad(format!(
                        "cell ({w1},{w2}) lands in set {idx}, not label {want}"
                    ));
                }
            }
        }
        if hit
            .iter()
            .zip(&self.out_map)
            .any(|(h, l)| !h && l.is_some())
        {
            return bad("out_map labels a set that no cell reaches".into());
        }
        Ok(())
    }

    /// The `W̃1 + W̃2` table.
    pub fn expanded_table(&self) -> Vec<Vec<Elem>> {
        let c = self.structure.carrier();
        self.map1
            .iter()
            .map(|&a| self.map2.iter().map(|&b| c.add(a, b)).collect())
            .collect()
    }
}

struct Search<'a> {
    f: &'a FunctionTable,
    s: &'a ConfusableStructure,
    size: u32,
    map1: Vec<Elem>,
    map2: Vec<Elem>,
    used1: Vec<bool>,
    used2: Vec<bool>,
    set_label: Vec<Option<u32>>,
    label_set: Vec<Option<usize>>,
    /// Stop after this many solutions.
    limit: usize,
    /// Restrict `map1[0]` to zero.
    anchor: bool,
    found: Vec<FeasibleExpansion>,
}

impl Search<'_> {
    fn run(&mut self) {
        if self.found.len() >= self.limit {
            return;
        }
        let m1 = self.f.m1() as usize;
        let depth = self.map1.len() + self.map2.len();
        if depth == m1 + self.f.m2() as usize {
            self.found.push(FeasibleExpansion {
                structure: self.s.clone(),
                map1: self.map1.clone(),
                map2: self.map2.clone(),
                out_map: self.set_label.clone(),
            });
            return;
        }
        if self.map1.len() < m1 {
            let top = if self.anchor && self.map1.is_empty() {
                1
            } else {
                self.size
            };
            for a in 0..top {
                if self.used1[a as usize] {
                    continue;
                }
                self.used1[a as usize] = true;
                self.map1.push(a);
                self.run();
                self.map1.pop();
                self.used1[a as usize] = false;
                if self.found.len() >= self.limit {
                    return;
                }
            }
            return;
        }
        let w2 = self.map2.len();
        let c = self.s.carrier();
        for b in 0..self.size {
            if self.used2[b as usize] {
                continue;
            }
            let mut assigned = Vec::new();
            let mut ok = true;
            for (w1, &a) in self.map1.iter().enumerate() {
                let idx = self.s.index_of(c.add(a, b));
                let label = self.f.get(w1 as u32, w2 as u32);
                match (self.set_label[idx], self.label_set[label as usize]) {
                    (Some(l), _) if l == label => {}
                    (None, None) => {
                        self.set_label[idx] = Some(label);
                        self.label_set[label as usize] = Some(idx);
                        assigned.push((idx, label));
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.used2[b as usize] = true;
                self.map2.push(b);
                self.run();
                self.map2.pop();
                self.used2[b as usize] = false;
            }
            for (idx, label) in assigned {
                self.set_label[idx] = None;
                self.label_set[label as usize] = None;
            }
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

fn search(
    f: &FunctionTable,
    s: &ConfusableStructure,
    limit: usize,
    anchor: bool,
) -> Result<Vec<FeasibleExpansion>> {
    let size = s.carrier().size();
    if f.m1() > size || f.m2() > size {
        return Err(Error::AlphabetTooLarge {
            alphabet: f.m1().max(f.m2()) as usize,
            carrier: size as usize,
        });
    }
    if f.output_count() as usize > s.sets().len() {
        return Ok(Vec::new());
    }
    let mut st = Search {
        f,
        s,
        size,
        map1: Vec::with_capacity(f.m1() as usize),
        map2: Vec::with_capacity(f.m2() as usize),
        used1: vec![false; size as usize],
        used2: vec![false; size as usize],
        set_label: vec![None; s.sets().len()],
        label_set: vec![None; f.output_count() as usize],
        limit,
        anchor,
        found: Vec::new(),
    };
    st.run();
    Ok(st.found)
}

/// Lexicographically first feasible expansion of `f` over `s` (map1 in row
/// order, then map2 in column order, elements ascending), if one exists.
pub fn find_expansion(
    f: &FunctionTable,
    s: &ConfusableStructure,
) -> Result<Option<FeasibleExpansion>> {
    // Translating map1 by -map1[0] and map2 by +map1[0] preserves every sum,
    // so the first solution always has map1[0] = 0.
    Ok(search(f, s, 1, true)?.into_iter().next())
}

/// Up to `limit` feasible expansions of `f` over `s`, in search order.
pub fn all_expansions(
    f: &FunctionTable,
    s: &ConfusableStructure,
    limit: usize,
) -> Result<Vec<FeasibleExpansion>> {
    search(f, s, limit, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CarrierKind {
    #[default]
    Any,
    Field,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    /// Largest carrier size tried, inclusive.
    pub max_carrier: u32,
    pub kind: CarrierKind,
    /// Stop after this many hits.
    pub limit: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_carrier: 16,
            kind: CarrierKind::Any,
            limit: 1,
        }
    }
}

/// Expansions of `f` over every structure of every carrier up to the bound:
/// carriers by ascending size, fields before rings of equal size, one
/// (lexicographically first) expansion per structure.
pub fn search_expansions(
    f: &FunctionTable,
    bounds: SearchBounds,
) -> Result<Vec<FeasibleExpansion>> {
    search_expansions_with(f, bounds, Limits::from_env())
}

pub fn search_expansions_with(
    f: &FunctionTable,
    bounds: SearchBounds,
    limits: Limits,
) -> Result<Vec<FeasibleExpansion>> {
    let mut out = Vec::new();
    let start = f.m1().max(f.m2()).max(2);
    for size in start..=bounds.max_carrier {
        if out.len() >= bounds.limit {
            break;
        }
        let structures: Vec<_> = structures_of_size(size, limits)?
            .into_iter()
            .filter(|s| match bounds.kind {
                CarrierKind::Any => true,
                CarrierKind::Field => s.carrier().is_field(),
                CarrierKind::Ring => !s.carrier().is_field(),
            })
            .collect();
        let hits: Vec<Option<FeasibleExpansion>> = structures
            .par_iter()
            .map(|s| find_expansion(f, s))
            .collect::<Result<_>>()?;
        out.extend(hits.into_iter().flatten());
    }
    out.truncate(bounds.limit);
    Ok(out)
}

/// Lower bounds on communication that hold even without security, and
/// whether an expansion meets them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub identical_rows: bool,
    pub identical_cols: bool,
    /// `(log2 m1, log2 m2)`; absent when rows or columns repeat.
    pub converse: Option<(Rate, Rate)>,
    /// Rates of the expansion scheme, one carrier symbol per party.
    pub achieved: Option<(Rate, Rate)>,
    /// The expansion's carrier has exactly `m1 = m2` elements.
    pub optimal: Option<bool>,
}

pub fn converse_report(f: &FunctionTable, expansion: Option<&FeasibleExpansion>) -> ConverseReport {
    let identical_rows = f.has_identical_rows();
    let identical_cols = f.has_identical_cols();
    let converse = (!identical_rows && !identical_cols).then(|| {
        (
            Rate::of_alphabet(f.m1() as u128),
            Rate::of_alphabet(f.m2() as u128),
        )
    });
    let achieved = expansion.map(|e| {
        let r = Rate::of_alphabet(e.structure.carrier().size() as u128);
        (r, r)
    });
    let optimal = match (converse, expansion) {
        (Some(_), Some(e)) => {
            let n = e.structure.carrier().size();
            Some(f.m1() == n && f.m2() == n)
        }
        _ => None,
    };
    ConverseReport {
        identical_rows,
        identical_cols,
        converse,
        achieved,
        optimal,
    }
}
