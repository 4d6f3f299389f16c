//! Exact correctness and perfect-security verification by enumeration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::FunctionTable;
use crate::protocol::{Codeword, Scheme};
use crate::rate::Rate;

/// A distribution held as integer counts over a common total.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExactDistribution<K: Ord> {
    pub counts: BTreeMap<K, u128>,
    pub total: u128,
}

impl<K: Ord> ExactDistribution<K> {
    pub fn new() -> Self {
        ExactDistribution {
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn add(&mut self, k: K, w: u128) {
        if w == 0 {
            return;
        }
        *self.counts.entry(k).or_insert(0) += w;
        self.total += w;
    }

    pub fn probability(&self, k: &K) -> BigRational {
        let c = self.counts.get(k).copied().unwrap_or(0);
        BigRational::new(BigInt::from(c), BigInt::from(self.total.max(1)))
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Every outcome equally likely.
    pub fn is_uniform(&self) -> bool {
        let mut it = self.counts.values();
        match it.next() {
            Some(first) => it.all(|c| c == first),
            None => true,
        }
    }

    /// First outcome (in key order) whose normalized probability differs.
    pub fn first_difference<'a>(&'a self, other: &'a Self) -> Option<&'a K> {
        let mut keys = self
            .counts
            .keys()
            .chain(other.counts.keys())
            .collect::<Vec<_>>();
        keys.sort();
        keys.into_iter().find(|k| {
            let a = self.counts.get(k).copied().unwrap_or(0);
            let b = other.counts.get(k).copied().unwrap_or(0);
            BigInt::from(a) * BigInt::from(other.total)
                != BigInt::from(b) * BigInt::from(self.total)
        })
    }
}

impl<K: Ord> PartialEq for ExactDistribution<K> {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

pub type Outcome = (Codeword, Codeword);

/// Distribution of `(X1, X2)` for fixed inputs, over all weighted atoms.
pub fn joint_distribution(s: &dyn Scheme, w1: u32, w2: u32) -> ExactDistribution<Outcome> {
    let mut d = ExactDistribution::new();
    for atom in 0..s.atom_count() {
        d.add(
            (s.encode1(w1, atom), s.encode2(w2, atom)),
            s.weight(atom) as u128,
        );
    }
    d
}

fn check_dims(s: &dyn Scheme, f: &FunctionTable) -> Result<()> {
    let (m1, m2) = s.input_sizes();
    if (m1, m2) != (f.m1(), f.m2()) {
        return Err(Error::LengthMismatch {
            expected: (f.m1() * f.m2()) as usize,
            actual: (m1 * m2) as usize,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessWitness {
    pub w1: u32,
    pub w2: u32,
    pub atom: u64,
    pub atom_label: String,
    pub expected: u32,
    pub decoded: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessReport {
    pub pass: bool,
    pub witness: Option<CorrectnessWitness>,
}

/// `dec(enc1, enc2) = f` on every input pair and atom. The witness is the
/// lexicographically smallest failing `(w1, w2, atom)`.
pub fn verify_correct(s: &dyn Scheme, f: &FunctionTable) -> Result<CorrectnessReport> {
    check_dims(s, f)?;
    let pairs: Vec<(u32, u32)> = (0..f.m1())
        .flat_map(|a| (0..f.m2()).map(move |b| (a, b)))
        .collect();
    let witness = pairs
        .par_iter()
        .filter_map(|&(w1, w2)| {
            let want = f.get(w1, w2);
            (0..s.atom_count()).find_map(|atom| {
                let got = s.decode(&s.encode1(w1, atom), &s.encode2(w2, atom));
                (got != Some(want)).then(|| CorrectnessWitness {
                    w1,
                    w2,
                    atom,
                    atom_label: s.describe_atom(atom),
                    expected: want,
                    decoded: got,
                })
            })
        })
        .min_by_key(|w| (w.w1, w.w2, w.atom));
    Ok(CorrectnessReport {
        pass: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityWitness {
    pub label: u32,
    pub first: (u32, u32),
    pub second: (u32, u32),
    /// An outcome with different probability under the two input pairs.
    pub outcome: (Vec<u32>, Vec<u32>),
    pub p_first: String,
    pub p_second: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub pass: bool,
    pub witness: Option<SecurityWitness>,
}

/// Input pairs with equal `f` value must induce identical `(X1, X2)`
/// distributions. Each group is compared against its smallest member; the
/// witness is the lexicographically smallest offending pair.
pub fn verify_secure(s: &dyn Scheme, f: &FunctionTable) -> Result<SecurityReport> {
    check_dims(s, f)?;
    let mut groups: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for w1 in 0..f.m1() {
        for w2 in 0..f.m2() {
            groups.entry(f.get(w1, w2)).or_default().push((w1, w2));
        }
    }
    let dists: BTreeMap<(u32, u32), ExactDistribution<Outcome>> = groups
        .values()
        .filter(|g| g.len() > 1)
        .flatten()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(w1, w2)| ((w1, w2), joint_distribution(s, w1, w2)))
        .collect();
    let mut witness: Option<SecurityWitness> = None;
    for (&label, members) in &groups {
        let Some((&head, rest)) = members.split_first() else {
            continue;
        };
        for &other in rest {
            let (a, b) = (&dists[&head], &dists[&other]);
            if let Some(k) = a.first_difference(b) {
                let cand = SecurityWitness {
                    label,
                    first: head,
                    second: other,
                    outcome: (k.0.to_vec(), k.1.to_vec()),
                    p_first: a.probability(k).to_string(),
                    p_second: b.probability(k).to_string(),
                };
                if witness.as_ref().is_none_or(|w| other < w.second) {
                    witness = Some(cand);
                }
                break;
            }
        }
    }
    Ok(SecurityReport {
        pass: witness.is_none(),
        witness,
    })
}

/// A distribution on input pairs as integer weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDistribution {
    pub weights: Vec<Vec<u64>>,
}

impl InputDistribution {
    pub fn uniform(m1: u32, m2: u32) -> Self {
        InputDistribution {
            weights: vec![vec![1; m2 as usize]; m1 as usize],
        }
    }

    /// Independent marginals.
    pub fn product(p1: &[u64], p2: &[u64]) -> Self {
        InputDistribution {
            weights: p1
                .iter()
                .map(|&a| p2.iter().map(|&b| a * b).collect())
                .collect(),
        }
    }

    pub fn validate(&self, m1: u32, m2: u32) -> Result<()> {
        if self.weights.len() != m1 as usize || self.weights.iter().any(|r| r.len() != m2 as usize)
        {
            return Err(Error::InvalidDistribution(format!(
                "expected a {m1}x{m2} weight table"
            )));
        }
        if self.weights.iter().flatten().all(|&w| w == 0) {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> u128 {
        self.weights.iter().flatten().map(|&w| w as u128).sum()
    }

    pub fn weight(&self, w1: u32, w2: u32) -> u64 {
        self.weights[w1 as usize][w2 as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    /// `I(X1,X2; W1,W2 | f) = 0` exactly.
    pub exact_zero: bool,
    pub bits: f64,
}

/// `I(X1, X2; W1, W2 | f(W1, W2))` under `dist`. Probabilities are exact
/// rationals; logarithms are taken in floating point only when summing.
pub fn leakage(
    s: &dyn Scheme,
    f: &FunctionTable,
    dist: &InputDistribution,
) -> Result<LeakageReport> {
    check_dims(s, f)?;
    dist.validate(f.m1(), f.m2())?;
    let total = BigInt::from(dist.total());
    let pairs: Vec<(u32, u32)> = (0..f.m1())
        .flat_map(|a| (0..f.m2()).map(move |b| (a, b)))
        .filter(|&(a, b)| dist.weight(a, b) > 0)
        .collect();
    let conds: Vec<ExactDistribution<Outcome>> = pairs
        .par_iter()
        .map(|&(a, b)| joint_distribution(s, a, b))
        .collect();
    // P(x | f = l) as Σ P(w) P(x|w) / P(f = l)
    let mut mix: BTreeMap<u32, (BigRational, BTreeMap<&Outcome, BigRational>)> = BTreeMap::new();
    for (&(a, b), d) in pairs.iter().zip(&conds) {
        let pw = BigRational::new(BigInt::from(dist.weight(a, b)), total.clone());
        let entry = mix
            .entry(f.get(a, b))
            .or_insert_with(|| (BigRational::zero(), BTreeMap::new()));
        entry.0 += &pw;
        for k in d.counts.keys() {
            let p = &pw * d.probability(k);
            *entry.1.entry(k).or_insert_with(BigRational::zero) += p;
        }
    }
    let mut exact_zero = true;
    let mut bits = 0.0f64;
    for (&(a, b), d) in pairs.iter().zip(&conds) {
        let pw = BigRational::new(BigInt::from(dist.weight(a, b)), total.clone());
        let (pf, px_f) = &mix[&f.get(a, b)];
        for k in d.counts.keys() {
            let p = d.probability(k);
            let q = &px_f[k] / pf;
            let ratio = &p / &q;
            if !ratio.is_one() {
                exact_zero = false;
                let term =
                    (&pw * &p).to_f64().unwrap_or(0.0) * ratio.to_f64().unwrap_or(1.0).log2();
                bits += term;
            }
        }
    }
    if exact_zero {
        bits = 0.0;
    }
    Ok(LeakageReport { exact_zero, bits })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scheme: String,
    pub correct: CorrectnessReport,
    pub secure: SecurityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leakage: Option<LeakageReport>,
    pub rate1: Rate,
    pub rate2: Rate,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.correct.pass && self.secure.pass
    }
}

/// Correctness, security and, if a distribution is given, leakage.
pub fn verify(
    s: &dyn Scheme,
    f: &FunctionTable,
    dist: Option<&InputDistribution>,
) -> Result<VerificationReport> {
    let correct = verify_correct(s, f)?;
    let secure = verify_secure(s, f)?;
    let leakage = dist.map(|d| leakage(s, f, d)).transpose()?;
    let (rate1, rate2) = s.rates();
    Ok(VerificationReport {
        scheme: s.name(),
        correct,
        secure,
        leakage,
        rate1,
        rate2,
    })
}

/// Leakage rendered for display: magnitudes below `1e-12` print as zero.
pub fn display_bits(bits: f64) -> String {
    if bits.abs() < 1e-12 {
        "0".into()
    } else {
        format!("{bits:.6}")
    }
}
