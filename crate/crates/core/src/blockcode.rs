//! Linear block compression of the decoder statistic `U = γ·(W̃1 + W̃2)`.
//!
//! Both parties multiply their length-`L` codeword vectors by the same
//! matrix `A` over `F_q`; Carol receives `A·X1 + A·X2 = A·U` and recovers
//! `U` as the most likely vector in the solution coset.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::expansion::FunctionTable;
use crate::protocol::{Codeword, LinearScheme, Scheme};
use crate::structures::Carrier;
use crate::verify::{verify_secure, ExactDistribution, InputDistribution, SecurityReport};
use crate::Elem;

pub const RNG_NAME: &str = "ChaCha8Rng";

/// Largest coset searched exhaustively by the decoder.
pub const COSET_BUDGET: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UProbability {
    pub value: String,
    pub element: Elem,
    /// Exact probability as `"num/den"`.
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub dist_u: Vec<UProbability>,
    pub h_bits: f64,
    pub h_qary: f64,
    #[serde(skip)]
    pub exact: ExactDistribution<Elem>,
}

fn field_order(s: &LinearScheme) -> Result<u32> {
    match s.carrier() {
        Carrier::Field(f) => Ok(f.order()),
        Carrier::Ring(_) => Err(Error::NotAFieldScheme),
    }
}

/// Exact distribution of `U` over inputs and the randomizer, with its
/// entropy in bits and in `q`-ary units.
pub fn entropy_of_u(s: &LinearScheme, dist: &InputDistribution) -> Result<EntropyReport> {
    let q = field_order(s)?;
    let (m1, m2) = s.input_sizes();
    dist.validate(m1, m2)?;
    let mut d = ExactDistribution::new();
    for w1 in 0..m1 {
        for w2 in 0..m2 {
            let w = dist.weight(w1, w2) as u128;
            for &g in s.gamma_support() {
                d.add(s.statistic(w1, w2, g), w);
            }
        }
    }
    let h_bits = d
        .counts
        .values()
        .map(|&c| {
            let p = c as f64 / d.total as f64;
            -p * p.log2()
        })
        .sum::<f64>();
    let dist_u = d
        .counts
        .keys()
        .map(|&u| UProbability {
            value: s.carrier().format(u),
            element: u,
            p: d.probability(&u).to_string(),
        })
        .collect();
    Ok(EntropyReport {
        dist_u,
        h_bits,
        h_qary: h_bits / (q as f64).log2(),
        exact: d,
    })
}

/// Addition and multiplication tables for a small field.
#[derive(Debug, Clone)]
struct Tables {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Tables {
    fn new(c: &Carrier) -> Result<Self> {
        let q = c.size() as usize;
        if q > 256 {
            return Err(Error::SizeBoundExceeded {
                size: q as u64,
                bound: 256,
            });
        }
        let mut t = Tables {
            q,
            add: vec![0; q * q],
            mul: vec![0; q * q],
            neg: vec![0; q],
            inv: vec![0; q],
        };
        for a in 0..q {
            t.neg[a] = c.neg(a as Elem) as u8;
            for b in 0..q {
                t.add[a * q + b] = c.add(a as Elem, b as Elem) as u8;
                let m = c.mul(a as Elem, b as Elem);
                t.mul[a * q + b] = m as u8;
                if m == 1 {
                    t.inv[a] = b as u8;
                }
            }
        }
        Ok(t)
    }

    fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    /// `dst += f · src`.
    fn axpy(&self, dst: &mut [u8], f: u8, src: &[u8]) {
        if f == 0 {
            return;
        }
        let row = &self.mul[f as usize * self.q..(f as usize + 1) * self.q];
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = self.add[*d as usize * self.q + row[s as usize] as usize];
        }
    }

    fn mat_vec(&self, m: &[Vec<u8>], v: &[u8]) -> Vec<u8> {
        m.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0u8, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
            })
            .collect()
    }
}

/// A block extension of a field scheme with compression matrix `A`.
#[derive(Debug, Clone)]
pub struct BlockCodeSpec {
    base: LinearScheme,
    l: usize,
    matrix: Vec<Vec<Elem>>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCodeSummary {
    pub l: usize,
    pub rows: usize,
    pub seed: Option<u64>,
    pub rng: String,
    /// Bits sent per input symbol by each party: `rows/L · log2 q`.
    pub rate_bits_per_input: f64,
}

impl BlockCodeSpec {
    /// `rows = ceil((H_q(U) + ε)·L)`, capped at `L`; entries of `A` iid
    /// uniform over `F_q` from a seeded [`RNG_NAME`].
    pub fn random(
        base: LinearScheme,
        l: usize,
        epsilon: f64,
        dist: &InputDistribution,
        seed: u64,
    ) -> Result<Self> {
        let h = entropy_of_u(&base, dist)?.h_qary;
        let rows = (((h + epsilon) * l as f64).ceil() as usize).clamp(1, l);
        Self::random_with_rows(base, l, rows, seed)
    }

    pub fn random_with_rows(base: LinearScheme, l: usize, rows: usize, seed: u64) -> Result<Self> {
        let q = field_order(&base)?;
        if l == 0 || rows == 0 || rows > l {
            return Err(Error::LengthMismatch {
                expected: l,
                actual: rows,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matrix = (0..rows)
            .map(|_| (0..l).map(|_| rng.random_range(0..q)).collect())
            .collect();
        Ok(BlockCodeSpec {
            base,
            l,
            matrix,
            seed: Some(seed),
        })
    }

    pub fn identity(base: LinearScheme, l: usize) -> Result<Self> {
        let matrix = (0..l)
            .map(|i| (0..l).map(|j| Elem::from(i == j)).collect())
            .collect();
        Self::with_matrix(base, matrix)
    }

    pub fn with_matrix(base: LinearScheme, matrix: Vec<Vec<Elem>>) -> Result<Self> {
        let q = field_order(&base)?;
        let l = matrix.first().map_or(0, Vec::len);
        if l == 0 || matrix.len() > l || matrix.iter().any(|r| r.len() != l) {
            return Err(Error::LengthMismatch {
                expected: l,
                actual: matrix.len(),
            });
        }
        if matrix.iter().flatten().any(|&a| a >= q) {
            return Err(Error::InvalidField("matrix entry outside the field".into()));
        }
        Ok(BlockCodeSpec {
            base,
            l,
            matrix,
            seed: None,
        })
    }

    pub fn base(&self) -> &LinearScheme {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<Elem>] {
        &self.matrix
    }

    pub fn summary(&self) -> BlockCodeSummary {
        let q = self.base.carrier().size() as f64;
        BlockCodeSummary {
            l: self.l,
            rows: self.rows(),
            seed: self.seed,
            rng: RNG_NAME.into(),
            rate_bits_per_input: self.rows() as f64 / self.l as f64 * q.log2(),
        }
    }

    fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        let c = self.base.carrier();
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| c.add(acc, c.mul(a, b)))
            })
            .collect()
    }
}

/// Per-position `X1 = γ·W̃1 + z`, `X2 = γ·W̃2 − z`, then `A·X1`, `A·X2`.
/// `randomness[i]` is the `(γ, z)` used at position `i`.
pub fn block_encode(
    spec: &BlockCodeSpec,
    w1: &[u32],
    w2: &[u32],
    randomness: &[(Elem, Elem)],
) -> Result<(Vec<Elem>, Vec<Elem>)> {
    for len in [w1.len(), w2.len(), randomness.len()] {
        if len != spec.l {
            return Err(Error::LengthMismatch {
                expected: spec.l,
                actual: len,
            });
        }
    }
    let c = spec.base.carrier();
    let e = spec.base.expansion();
    let x1: Vec<Elem> = w1
        .iter()
        .zip(randomness)
        .map(|(&w, &(g, z))| c.add(c.mul(g, e.map1[w as usize]), z))
        .collect();
    let x2: Vec<Elem> = w2
        .iter()
        .zip(randomness)
        .map(|(&w, &(g, z))| c.sub(c.mul(g, e.map2[w as usize]), z))
        .collect();
    Ok((spec.apply(&x1), spec.apply(&x2)))
}

/// Precomputed syndrome decoder for one matrix and one prior on `U`.
#[derive(Debug, Clone)]
pub struct BlockDecoder {
    t: Tables,
    l: usize,
    rank: usize,
    /// `T` with `T·A` in reduced row echelon form.
    transform: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    /// Nullspace basis of `A`, one vector per free column.
    basis: Vec<Vec<u8>>,
    log_prior: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMethod {
    /// Every vector of the coset was scored.
    Exhaustive,
    /// Coordinate ascent along nullspace directions.
    Greedy,
}

impl BlockDecoder {
    pub fn new(spec: &BlockCodeSpec, prior: &ExactDistribution<Elem>) -> Result<Self> {
        let t = Tables::new(spec.base.carrier())?;
        let rows = spec.rows();
        let l = spec.l;
        let mut m: Vec<Vec<u8>> = spec
            .matrix
            .iter()
            .map(|r| r.iter().map(|&a| a as u8).collect())
            .collect();
        let mut tr: Vec<Vec<u8>> = (0..rows)
            .map(|i| (0..rows).map(|j| u8::from(i == j)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..l {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, p);
            tr.swap(rank, p);
            let inv = t.inv[m[rank][col] as usize];
            for v in m[rank].iter_mut().chain(tr[rank].iter_mut()) {
                *v = t.mul(*v, inv);
            }
            let (prow, ptr) = (m[rank].clone(), tr[rank].clone());
            m.par_iter_mut()
                .zip(tr.par_iter_mut())
                .enumerate()
                .filter(|(i, _)| *i != rank)
                .for_each(|(_, (row, trow))| {
                    let f = t.neg[row[col] as usize];
                    t.axpy(row, f, &prow);
                    t.axpy(trow, f, &ptr);
                });
            pivots.push(col);
            rank += 1;
        }
        let mut is_pivot = vec![false; l];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let basis = (0..l)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut b = vec![0u8; l];
                b[j] = 1;
                for (r, &p) in pivots.iter().enumerate() {
                    b[p] = t.neg[m[r][j] as usize];
                }
                b
            })
            .collect();
        let q = t.q;
        let log_prior = (0..q as Elem)
            .map(|u| match prior.counts.get(&u) {
                Some(&c) if c > 0 => (c as f64 / prior.total as f64).ln(),
                _ => f64::NEG_INFINITY,
            })
            .collect();
        Ok(BlockDecoder {
            t,
            l,
            rank,
            transform: tr,
            pivots,
            basis,
            log_prior,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nullity(&self) -> usize {
        self.basis.len()
    }

    fn score(&self, u: &[u8]) -> f64 {
        u.iter().map(|&x| self.log_prior[x as usize]).sum()
    }

    /// Most likely `U` with `A·U = syndrome`.
    pub fn decode_syndrome(&self, syndrome: &[Elem]) -> Result<(Vec<Elem>, DecodeMethod)> {
        if syndrome.len() != self.transform.len() {
            return Err(Error::LengthMismatch {
                expected: self.transform.len(),
                actual: syndrome.len(),
            });
        }
        let s: Vec<u8> = syndrome.iter().map(|&a| a as u8).collect();
        let reduced = self.t.mat_vec(&self.transform, &s);
        if reduced[self.rank..].iter().any(|&v| v != 0) {
            return Err(Error::Undecodable);
        }
        let mut u0 = vec![0u8; self.l];
        for (r, &p) in self.pivots.iter().enumerate() {
            u0[p] = reduced[r];
        }
        let k = self.basis.len() as u32;
        let q = self.t.q as u64;
        let exhaustive = q.checked_pow(k).is_some_and(|n| n <= COSET_BUDGET);
        let best = if exhaustive {
            self.exhaustive(u0)
        } else {
            self.greedy(u0)
        };
        let method = if exhaustive {
            DecodeMethod::Exhaustive
        } else {
            DecodeMethod::Greedy
        };
        Ok((best.into_iter().map(Elem::from).collect(), method))
    }

    fn exhaustive(&self, u0: Vec<u8>) -> Vec<u8> {
        let k = self.basis.len();
        let mut digits = vec![0u8; k];
        let mut u = u0;
        let mut best = u.clone();
        let mut best_score = self.score(&u);
        loop {
            // odometer step: digit j goes c → c+1 (as field elements 0..q)
            let mut j = 0;
            loop {
                if j == k {
                    return best;
                }
                let old = digits[j];
                let new = if (old as usize) + 1 == self.t.q {
                    0
                } else {
                    old + 1
                };
                let delta = self.t.add(new, self.t.neg[old as usize]);
                self.t.axpy(&mut u, delta, &self.basis[j]);
                digits[j] = new;
                if new != 0 {
                    break;
                }
                j += 1;
            }
            let sc = self.score(&u);
            if sc > best_score {
                best_score = sc;
                best.clone_from(&u);
            }
        }
    }

    fn greedy(&self, mut u: Vec<u8>) -> Vec<u8> {
        let mut current = self.score(&u);
        let mut scratch = u.clone();
        for _ in 0..64 {
            let mut improved = false;
            for b in &self.basis {
                let mut best: Option<(u8, f64)> = None;
                for c in 1..self.t.q as u8 {
                    scratch.copy_from_slice(&u);
                    self.t.axpy(&mut scratch, c, b);
                    let sc = self.score(&scratch);
                    if sc > current && best.is_none_or(|(_, s)| sc > s) {
                        best = Some((c, sc));
                    }
                }
                if let Some((c, sc)) = best {
                    self.t.axpy(&mut u, c, b);
                    current = sc;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        u
    }
}

/// `s = A·X1 + A·X2`, decoded to `U` and then to output labels.
pub fn block_decode(
    spec: &BlockCodeSpec,
    decoder: &BlockDecoder,
    x1: &[Elem],
    x2: &[Elem],
) -> Result<(Vec<Elem>, Vec<u32>)> {
    if x1.len() != spec.rows() || x2.len() != spec.rows() {
        return Err(Error::LengthMismatch {
            expected: spec.rows(),
            actual: x1.len().min(x2.len()),
        });
    }
    let c = spec.base.carrier();
    let s: Vec<Elem> = x1.iter().zip(x2).map(|(&a, &b)| c.add(a, b)).collect();
    let (u, _) = decoder.decode_syndrome(&s)?;
    let labels = u
        .iter()
        .map(|&v| spec.base.label_of(v).unwrap_or(u32::MAX))
        .collect();
    Ok((u, labels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub block_errors: usize,
    pub empirical_error: f64,
    pub greedy_trials: usize,
    pub seed: u64,
    pub rng: String,
}

fn sample_weighted<R: Rng>(rng: &mut R, weights: &[u64], total: u64) -> usize {
    let mut x = rng.random_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

/// Independent trials; trial `t` draws from `RNG_NAME` seeded with `seed`
/// on stream `t`. A trial fails if any output in the block is wrong.
pub fn monte_carlo(
    spec: &BlockCodeSpec,
    decoder: &BlockDecoder,
    dist: &InputDistribution,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    let (m1, m2) = spec.base.input_sizes();
    dist.validate(m1, m2)?;
    let flat: Vec<u64> = dist.weights.iter().flatten().copied().collect();
    let total: u64 = flat.iter().sum();
    let gammas = spec.base.gamma_support();
    let zs = spec.base.z_support();
    let outcomes: Vec<(bool, DecodeMethod)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut w1 = Vec::with_capacity(spec.l);
            let mut w2 = Vec::with_capacity(spec.l);
            let mut rand = Vec::with_capacity(spec.l);
            for _ in 0..spec.l {
                let i = sample_weighted(&mut rng, &flat, total) as u32;
                w1.push(i / m2);
                w2.push(i % m2);
                let g = gammas[rng.random_range(0..gammas.len())];
                let z = zs[rng.random_range(0..zs.len())];
                rand.push((g, z));
            }
            let truth: Vec<u32> = w1
                .iter()
                .zip(&w2)
                .zip(&rand)
                .map(|((&a, &b), &(g, _))| {
                    spec.base
                        .label_of(spec.base.statistic(a, b, g))
                        .expect("valid expansion")
                })
                .collect();
            let (x1, x2) = block_encode(spec, &w1, &w2, &rand)?;
            let c = spec.base.carrier();
            let s: Vec<Elem> = x1.iter().zip(&x2).map(|(&a, &b)| c.add(a, b)).collect();
            let (u, method) = decoder.decode_syndrome(&s)?;
            let ok = u
                .iter()
                .zip(&truth)
                .all(|(&v, &t)| spec.base.label_of(v) == Some(t));
            Ok((!ok, method))
        })
        .collect::<Result<_>>()?;
    let block_errors = outcomes.iter().filter(|(e, _)| *e).count();
    Ok(MonteCarloReport {
        trials,
        block_errors,
        empirical_error: block_errors as f64 / trials.max(1) as f64,
        greedy_trials: outcomes
            .iter()
            .filter(|(_, m)| *m == DecodeMethod::Greedy)
            .count(),
        seed,
        rng: RNG_NAME.into(),
    })
}

/// The `L`-block scheme as an ordinary scheme over vector inputs, for exact
/// verification. Inputs and atoms are mixed-radix with position 0 most
/// significant.
pub struct BlockScheme {
    spec: BlockCodeSpec,
    decoder: BlockDecoder,
    labels: BTreeMap<Vec<u32>, u32>,
    table: FunctionTable,
}

impl BlockScheme {
    pub fn new(spec: BlockCodeSpec, f: &FunctionTable) -> Result<Self> {
        let (m1, m2) = spec.base.input_sizes();
        if (m1, m2) != (f.m1(), f.m2()) {
            return Err(Error::LengthMismatch {
                expected: (f.m1() * f.m2()) as usize,
                actual: (m1 * m2) as usize,
            });
        }
        let l = spec.l as u32;
        let n1 = m1.checked_pow(l).filter(|&n| n <= 1 << 12);
        let n2 = m2.checked_pow(l).filter(|&n| n <= 1 << 12);
        let (Some(n1), Some(n2)) = (n1, n2) else {
            return Err(Error::BudgetExceeded {
                needed: (m1 as u128)
                    .saturating_pow(l)
                    .saturating_mul((m2 as u128).saturating_pow(l)),
                budget: 1 << 24,
            });
        };
        let values: Vec<Vec<Vec<u32>>> = (0..n1)
            .map(|v1| {
                let a = digits(v1, m1, spec.l);
                (0..n2)
                    .map(|v2| {
                        let b = digits(v2, m2, spec.l);
                        a.iter().zip(&b).map(|(&x, &y)| f.get(x, y)).collect()
                    })
                    .collect()
            })
            .collect();
        let table = FunctionTable::from_values(&values)?;
        let mut labels = BTreeMap::new();
        for (row, trow) in values.iter().zip(table.outputs()) {
            for (v, &t) in row.iter().zip(trow) {
                labels.insert(v.clone(), t);
            }
        }
        let prior = entropy_of_u(&spec.base, &InputDistribution::uniform(m1, m2))?.exact;
        let decoder = BlockDecoder::new(&spec, &prior)?;
        Ok(BlockScheme {
            spec,
            decoder,
            labels,
            table,
        })
    }

    /// The vector function: `f` applied position by position.
    pub fn table(&self) -> &FunctionTable {
        &self.table
    }

    fn base_atoms(&self) -> u64 {
        self.spec.base.atom_count()
    }

    fn encode(&self, w: u32, m: u32, atom: u64, second: bool) -> Codeword {
        let ws = digits(w, m, self.spec.l);
        let mut rest = atom;
        let mut per = vec![0u64; self.spec.l];
        for slot in per.iter_mut().rev() {
            *slot = rest % self.base_atoms();
            rest /= self.base_atoms();
        }
        let c = self.spec.base.carrier();
        let e = self.spec.base.expansion();
        let x: Vec<Elem> = ws
            .iter()
            .zip(&per)
            .map(|(&w, &a)| {
                let (g, z) = self.spec.base.atom(a);
                if second {
                    c.sub(c.mul(g, e.map2[w as usize]), z)
                } else {
                    c.add(c.mul(g, e.map1[w as usize]), z)
                }
            })
            .collect();
        self.spec.apply(&x).into_iter().collect()
    }
}

fn digits(mut v: u32, base: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = v % base;
        v /= base;
    }
    out
}

impl Scheme for BlockScheme {
    fn name(&self) -> String {
        format!(
            "block L={} rows={} over {}",
            self.spec.l,
            self.spec.rows(),
            self.spec.base.carrier().label()
        )
    }

    fn input_sizes(&self) -> (u32, u32) {
        (self.table.m1(), self.table.m2())
    }

    fn atom_count(&self) -> u64 {
        self.base_atoms().pow(self.spec.l as u32)
    }

    fn encode1(&self, w1: u32, atom: u64) -> Codeword {
        self.encode(w1, self.spec.base.input_sizes().0, atom, false)
    }

    fn encode2(&self, w2: u32, atom: u64) -> Codeword {
        self.encode(w2, self.spec.base.input_sizes().1, atom, true)
    }

    fn decode(&self, x1: &Codeword, x2: &Codeword) -> Option<u32> {
        let (_, labels) = block_decode(&self.spec, &self.decoder, x1, x2).ok()?;
        self.labels.get(&labels).copied()
    }

    fn alphabets(&self) -> (Vec<u32>, Vec<u32>) {
        let q = self.spec.base.carrier().size();
        (vec![q; self.spec.rows()], vec![q; self.spec.rows()])
    }

    fn describe_atom(&self, atom: u64) -> String {
        let mut rest = atom;
        let mut parts: SmallVec<[String; 4]> = SmallVec::new();
        for _ in 0..self.spec.l {
            parts.push(self.spec.base.describe_atom(rest % self.base_atoms()));
            rest /= self.base_atoms();
        }
        parts.reverse();
        parts.join(" | ")
    }
}

/// Work allowed for an exact block security check, in
/// `input pairs × atoms` encodings.
pub const SECURITY_BUDGET: u128 = 1 << 26;

/// Exact security of the `L`-block scheme with its matrix.
pub fn block_security_check(spec: &BlockCodeSpec, f: &FunctionTable) -> Result<SecurityReport> {
    let (m1, m2) = spec.base.input_sizes();
    let l = spec.l as u32;
    let pairs = ((m1 * m2) as u128).checked_pow(l);
    let atoms = (spec.base.atom_count() as u128).checked_pow(l);
    let needed = match (pairs, atoms) {
        (Some(p), Some(a)) => p.saturating_mul(a),
        _ => u128::MAX,
    };
    if needed > SECURITY_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: SECURITY_BUDGET,
        });
    }
    let scheme = BlockScheme::new(spec.clone(), f)?;
    verify_secure(&scheme, scheme.table())
}
