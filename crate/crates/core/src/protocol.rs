//! Concrete secure computation schemes.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::expansion::{FeasibleExpansion, FunctionTable};
use crate::field::FieldSpec;
use crate::numbers::{factorial, factorize, nth_permutation};
use crate::rate::Rate;
use crate::structures::Carrier;
use crate::verify::{verify_correct, verify_secure, ExactDistribution};
use crate::Elem;

/// A codeword: a short string of symbols, symbol `k` drawn from
/// `0..alphabet[k]`.
pub type Codeword = SmallVec<[u32; 4]>;

/// Randomized encoders and a deterministic decoder over a finite weighted
/// randomness space. Atoms are indexed `0..atom_count()`.
pub trait Scheme: Sync {
    fn name(&self) -> String;
    /// `(m1, m2)`.
    fn input_sizes(&self) -> (u32, u32);
    fn atom_count(&self) -> u64;
    /// Positive integer weight of an atom.
    fn weight(&self, _atom: u64) -> u64 {
        1
    }
    fn encode1(&self, w1: u32, atom: u64) -> Codeword;
    fn encode2(&self, w2: u32, atom: u64) -> Codeword;
    fn decode(&self, x1: &Codeword, x2: &Codeword) -> Option<u32>;
    /// Per-symbol alphabet sizes of Alice's and Bob's codewords.
    fn alphabets(&self) -> (Vec<u32>, Vec<u32>);
    fn rates(&self) -> (Rate, Rate) {
        let (a, b) = self.alphabets();
        let prod = |v: &[u32]| v.iter().map(|&x| x as u128).product::<u128>();
        (Rate::of_alphabet(prod(&a)), Rate::of_alphabet(prod(&b)))
    }
    fn describe_atom(&self, atom: u64) -> String {
        format!("#{atom}")
    }
}

/// Expand-and-randomize: `X1 = γ·W̃1 + z`, `X2 = γ·W̃2 − z`, and Carol
/// decodes from the confusable set containing `X1 + X2`.
#[derive(Debug, Clone)]
pub struct LinearScheme {
    expansion: FeasibleExpansion,
    gammas: Vec<Elem>,
    zs: Vec<Elem>,
    /// Sorted ranges of the two encoders; codewords are indices into them.
    book1: Vec<Elem>,
    book2: Vec<Elem>,
}

impl LinearScheme {
    /// `γ` uniform over `S*`, `z` uniform over the whole carrier.
    pub fn new(expansion: FeasibleExpansion) -> Self {
        let gammas = expansion.structure.randomizer().to_vec();
        let zs = (0..expansion.structure.carrier().size()).collect();
        Self::with_supports(expansion, gammas, zs).expect("full supports are valid")
    }

    /// Arbitrary uniform supports for `γ` and `z`; no security is implied.
    pub fn with_supports(
        expansion: FeasibleExpansion,
        mut gammas: Vec<Elem>,
        mut zs: Vec<Elem>,
    ) -> Result<Self> {
        let size = expansion.structure.carrier().size();
        gammas.sort_unstable();
        gammas.dedup();
        zs.sort_unstable();
        zs.dedup();
        if gammas.is_empty() || zs.is_empty() {
            return Err(Error::InvalidStructure("empty randomness support".into()));
        }
        if gammas.iter().chain(&zs).any(|&a| a >= size) {
            return Err(Error::InvalidStructure(
                "randomness outside the carrier".into(),
            ));
        }
        let mut s = LinearScheme {
            expansion,
            gammas,
            zs,
            book1: Vec::new(),
            book2: Vec::new(),
        };
        let c = s.carrier().clone();
        let (mut r1, mut r2) = (BTreeSet::new(), BTreeSet::new());
        for &g in &s.gammas {
            for &z in &s.zs {
                for &a in &s.expansion.map1 {
                    r1.insert(c.add(c.mul(g, a), z));
                }
                for &b in &s.expansion.map2 {
                    r2.insert(c.sub(c.mul(g, b), z));
                }
            }
        }
        s.book1 = r1.into_iter().collect();
        s.book2 = r2.into_iter().collect();
        Ok(s)
    }

    pub fn expansion(&self) -> &FeasibleExpansion {
        &self.expansion
    }

    pub fn carrier(&self) -> &Carrier {
        self.expansion.structure.carrier()
    }

    pub fn gamma_support(&self) -> &[Elem] {
        &self.gammas
    }

    pub fn z_support(&self) -> &[Elem] {
        &self.zs
    }

    /// `(γ, z)` of an atom.
    pub fn atom(&self, atom: u64) -> (Elem, Elem) {
        let nz = self.zs.len() as u64;
        (
            self.gammas[(atom / nz) as usize],
            self.zs[(atom % nz) as usize],
        )
    }

    /// Carrier values behind codeword symbols.
    pub fn value1(&self, x: &Codeword) -> Elem {
        self.book1[x[0] as usize]
    }

    pub fn value2(&self, x: &Codeword) -> Elem {
        self.book2[x[0] as usize]
    }

    /// The decoder statistic `U = γ·(W̃1 + W̃2)`.
    pub fn statistic(&self, w1: u32, w2: u32, gamma: Elem) -> Elem {
        let c = self.carrier();
        let e = &self.expansion;
        c.mul(gamma, c.add(e.map1[w1 as usize], e.map2[w2 as usize]))
    }

    /// Output label of a statistic value.
    pub fn label_of(&self, u: Elem) -> Option<u32> {
        self.expansion.out_map[self.expansion.structure.index_of(u)]
    }

    fn code(book: &[Elem], v: Elem) -> u32 {
        book.binary_search(&v).expect("value in encoder range") as u32
    }
}

impl Scheme for LinearScheme {
    fn name(&self) -> String {
        format!("linear over {}", self.carrier().label())
    }

    fn input_sizes(&self) -> (u32, u32) {
        (
            self.expansion.map1.len() as u32,
            self.expansion.map2.len() as u32,
        )
    }

    fn atom_count(&self) -> u64 {
        (self.gammas.len() * self.zs.len()) as u64
    }

    fn encode1(&self, w1: u32, atom: u64) -> Codeword {
        let (g, z) = self.atom(atom);
        let c = self.carrier();
        let v = c.add(c.mul(g, self.expansion.map1[w1 as usize]), z);
        smallvec![Self::code(&self.book1, v)]
    }

    fn encode2(&self, w2: u32, atom: u64) -> Codeword {
        let (g, z) = self.atom(atom);
        let c = self.carrier();
        let v = c.sub(c.mul(g, self.expansion.map2[w2 as usize]), z);
        smallvec![Self::code(&self.book2, v)]
    }

    fn decode(&self, x1: &Codeword, x2: &Codeword) -> Option<u32> {
        let a = *self.book1.get(*x1.first()? as usize)?;
        let b = *self.book2.get(*x2.first()? as usize)?;
        self.label_of(self.carrier().add(a, b))
    }

    fn alphabets(&self) -> (Vec<u32>, Vec<u32>) {
        (vec![self.book1.len() as u32], vec![self.book2.len() as u32])
    }

    fn describe_atom(&self, atom: u64) -> String {
        let (g, z) = self.atom(atom);
        let c = self.carrier();
        format!("γ={} z={}", c.format(g), c.format(z))
    }
}

/// Additive subgroups of the carrier, smallest first.
pub fn additive_subgroups(c: &Carrier) -> Vec<Vec<Elem>> {
    let size = c.size();
    let close = |gens: &BTreeSet<Elem>| -> BTreeSet<Elem> {
        let mut h: BTreeSet<Elem> = [0].into();
        let mut frontier: Vec<Elem> = vec![0];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = c.add(a, g);
                if h.insert(b) {
                    frontier.push(b);
                }
            }
        }
        h
    };
    let mut found: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let mut queue = vec![BTreeSet::from([0])];
    found.insert(vec![0]);
    while let Some(h) = queue.pop() {
        for a in 0..size {
            if h.contains(&a) {
                continue;
            }
            let mut gens = h.clone();
            gens.insert(a);
            let k: Vec<Elem> = close(&gens).into_iter().collect();
            if found.insert(k.clone()) {
                queue.push(k.into_iter().collect());
            }
        }
    }
    let mut out: Vec<_> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Candidate `z` supports in the order tried: additive subgroups and their
/// cosets by size, then (optionally) every other subset by size.
fn z_candidates(c: &Carrier, subsets: bool) -> Vec<Vec<Elem>> {
    let size = c.size();
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let mut out = Vec::new();
    for h in additive_subgroups(c) {
        let mut cosets: BTreeSet<Vec<Elem>> = BTreeSet::new();
        for a in 0..size {
            let mut coset: Vec<Elem> = h.iter().map(|&x| c.add(a, x)).collect();
            coset.sort_unstable();
            cosets.insert(coset);
        }
        let mut cosets: Vec<_> = cosets.into_iter().collect();
        cosets.sort_by_key(|s| (*s != h, s.clone()));
        for s in cosets {
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    if subsets && size <= 16 {
        let mut rest: Vec<Vec<Elem>> = (1u32..(1 << size))
            .map(|mask| (0..size).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| !seen.contains(s))
            .collect();
        rest.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out.extend(rest);
    }
    out.sort_by_key(Vec::len);
    out
}

/// Shrink the support of `z` while keeping `γ` uniform over `S*`. Each
/// candidate support, smallest first, is kept only if the resulting scheme
/// passes exact verification against `f`; the full support is the fallback.
pub fn optimize_additive_randomness(
    expansion: &FeasibleExpansion,
    f: &FunctionTable,
    subsets: bool,
) -> LinearScheme {
    let full = LinearScheme::new(expansion.clone());
    let size = expansion.structure.carrier().size() as usize;
    let gammas = expansion.structure.randomizer().to_vec();
    for zs in z_candidates(expansion.structure.carrier(), subsets) {
        if zs.len() >= size {
            break;
        }
        let Ok(s) = LinearScheme::with_supports(expansion.clone(), gammas.clone(), zs) else {
            continue;
        };
        let ok = matches!(verify_correct(&s, f), Ok(r) if r.pass)
            && matches!(verify_secure(&s, f), Ok(r) if r.pass);
        if ok {
            let (a, b) = (s.rates(), full.rates());
            if a.0.bits() <= b.0.bits() && a.1.bits() <= b.1.bits() && a != b {
                return s;
            }
        }
    }
    full
}

/// Per-field `(γ_i, z_i)` pairs.
pub type ResidueMasks = SmallVec<[(Elem, Elem); 4]>;

/// Equality of `m`-ary inputs through a shared random permutation and one
/// expand-and-randomize code per prime-power factor of `m`.
#[derive(Debug, Clone)]
pub struct CrtEqualScheme {
    m: u32,
    fields: Vec<FieldSpec>,
    perms: Vec<Vec<u32>>,
    exhaustive: bool,
    /// Atoms per permutation: `Π (q_i − 1)·q_i`.
    inner: u64,
}

pub const CRT_EXHAUSTIVE_MAX: u32 = 8;

impl CrtEqualScheme {
    /// All `m!` permutations for `m ≤ 8`; a seeded sample of 5040 beyond.
    pub fn new(m: u32) -> Result<Self> {
        if m <= CRT_EXHAUSTIVE_MAX {
            let count = factorial(m as usize).expect("small factorial");
            let perms = (0..count).map(|r| nth_permutation(m as usize, r)).collect();
            Self::build(m, perms, true)
        } else {
            Self::sampled(m, 5040, 0)
        }
    }

    /// `count` permutations drawn from `ChaCha8Rng` seeded with `seed`.
    /// Security then holds only approximately.
    pub fn sampled(m: u32, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms = (0..count.max(1))
            .map(|_| {
                let mut p: Vec<u32> = (0..m).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        Self::build(m, perms, false)
    }

    fn build(m: u32, perms: Vec<Vec<u32>>, exhaustive: bool) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidTable(format!(
                "equality needs m ≥ 2, got {m}"
            )));
        }
        let fields = factorize(m as u64)
            .into_iter()
            .map(|(p, k)| FieldSpec::make(p as u32, k))
            .collect::<Result<Vec<_>>>()?;
        let inner = fields
            .iter()
            .map(|f| (f.order() as u64 - 1) * f.order() as u64)
            .product();
        Ok(CrtEqualScheme {
            m,
            fields,
            perms,
            exhaustive,
            inner,
        })
    }

    pub fn table(&self) -> FunctionTable {
        FunctionTable::equal(self.m)
    }

    pub fn fields(&self) -> &[FieldSpec] {
        &self.fields
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn permutation_count(&self) -> usize {
        self.perms.len()
    }

    /// `(permutation, [(γ_i, z_i)])` of an atom.
    pub fn atom(&self, atom: u64) -> (&[u32], ResidueMasks) {
        let perm = &self.perms[(atom / self.inner) as usize];
        let mut rest = atom % self.inner;
        let mut parts = SmallVec::new();
        for f in self.fields.iter().rev() {
            let q = f.order() as u64;
            let z = (rest % q) as Elem;
            rest /= q;
            let g = (rest % (q - 1)) as Elem + 1;
            rest /= q - 1;
            parts.push((g, z));
        }
        parts.reverse();
        (perm, parts)
    }

    fn encode(&self, w: u32, atom: u64) -> Codeword {
        let (perm, parts) = self.atom(atom);
        let v = perm[w as usize];
        self.fields
            .iter()
            .zip(parts)
            .map(|(f, (g, z))| f.add(f.mul(g, v % f.order()), z))
            .collect()
    }

    /// Distribution of the per-factor difference tuple `X2 − X1`.
    pub fn difference_distribution(&self, w1: u32, w2: u32) -> ExactDistribution<Codeword> {
        let mut d = ExactDistribution::new();
        for atom in 0..self.atom_count() {
            let (a, b) = (self.encode(w1, atom), self.encode(w2, atom));
            let diff = self
                .fields
                .iter()
                .zip(a.iter().zip(&b))
                .map(|(f, (&x, &y))| f.sub(y, x))
                .collect();
            d.add(diff, 1);
        }
        d
    }

    /// Distribution over permutations of which residues of `π(W1)` and
    /// `π(W2)` agree, one flag per prime-power factor.
    pub fn residue_collisions(&self, w1: u32, w2: u32) -> ExactDistribution<Vec<bool>> {
        let mut d = ExactDistribution::new();
        for p in &self.perms {
            let (a, b) = (p[w1 as usize], p[w2 as usize]);
            d.add(
                self.fields
                    .iter()
                    .map(|f| a % f.order() == b % f.order())
                    .collect(),
                1,
            );
        }
        d
    }
}

impl Scheme for CrtEqualScheme {
    fn name(&self) -> String {
        let parts: Vec<String> = self
            .fields
            .iter()
            .map(|f| Carrier::field(f.clone()).label())
            .collect();
        format!("crt equality m={} over {}", self.m, parts.join(" x "))
    }

    fn input_sizes(&self) -> (u32, u32) {
        (self.m, self.m)
    }

    fn atom_count(&self) -> u64 {
        self.perms.len() as u64 * self.inner
    }

    fn encode1(&self, w1: u32, atom: u64) -> Codeword {
        self.encode(w1, atom)
    }

    fn encode2(&self, w2: u32, atom: u64) -> Codeword {
        self.encode(w2, atom)
    }

    fn decode(&self, x1: &Codeword, x2: &Codeword) -> Option<u32> {
        Some(u32::from(x1 != x2))
    }

    fn alphabets(&self) -> (Vec<u32>, Vec<u32>) {
        let a: Vec<u32> = self.fields.iter().map(|f| f.order()).collect();
        (a.clone(), a)
    }

    fn describe_atom(&self, atom: u64) -> String {
        let (perm, parts) = self.atom(atom);
        let parts: Vec<String> = parts.iter().map(|(g, z)| format!("γ={g} z={z}")).collect();
        format!("π={perm:?} {}", parts.join(" "))
    }
}

/// Table masking: a random row permutation `π` and one uniform mask per row.
/// `X1 = (π(W1), z_{W1})`, `X2[π(i)] = f(i, W2) + z_i`, and Carol reads
/// `X2[X1[0]] − X1[1]`, all modulo the number of outputs.
#[derive(Debug, Clone)]
pub struct FknScheme {
    f: FunctionTable,
    perms: Vec<Vec<u32>>,
}

impl FknScheme {
    pub fn new(f: FunctionTable) -> Result<Self> {
        let m1 = f.m1() as usize;
        let count = factorial(m1)
            .filter(|&c| c <= 40320)
            .ok_or(Error::BudgetExceeded {
                needed: m1 as u128,
                budget: 8,
            })?;
        let perms = (0..count).map(|r| nth_permutation(m1, r)).collect();
        Ok(FknScheme { f, perms })
    }

    fn k(&self) -> u64 {
        self.f.output_count() as u64
    }

    fn atom(&self, atom: u64) -> (&[u32], Vec<u32>) {
        let k = self.k();
        let m1 = self.f.m1() as usize;
        let masks_count = k.pow(m1 as u32);
        let perm = &self.perms[(atom / masks_count) as usize];
        let mut rest = atom % masks_count;
        let mut masks = vec![0; m1];
        for slot in masks.iter_mut().rev() {
            *slot = (rest % k) as u32;
            rest /= k;
        }
        (perm, masks)
    }
}

impl Scheme for FknScheme {
    fn name(&self) -> String {
        format!("table masking {}x{}", self.f.m1(), self.f.m2())
    }

    fn input_sizes(&self) -> (u32, u32) {
        (self.f.m1(), self.f.m2())
    }

    fn atom_count(&self) -> u64 {
        self.perms.len() as u64 * self.k().pow(self.f.m1())
    }

    fn encode1(&self, w1: u32, atom: u64) -> Codeword {
        let (perm, masks) = self.atom(atom);
        smallvec![perm[w1 as usize], masks[w1 as usize]]
    }

    fn encode2(&self, w2: u32, atom: u64) -> Codeword {
        let (perm, masks) = self.atom(atom);
        let k = self.k() as u32;
        let mut x: Codeword = smallvec![0; self.f.m1() as usize];
        for i in 0..self.f.m1() {
            x[perm[i as usize] as usize] = (self.f.get(i, w2) + masks[i as usize]) % k;
        }
        x
    }

    fn decode(&self, x1: &Codeword, x2: &Codeword) -> Option<u32> {
        let k = self.k() as u32;
        let v = *x2.get(*x1.first()? as usize)?;
        Some((v + k - x1.get(1)? % k) % k)
    }

    fn alphabets(&self) -> (Vec<u32>, Vec<u32>) {
        let k = self.k() as u32;
        (vec![self.f.m1(), k], vec![k; self.f.m1() as usize])
    }

    fn describe_atom(&self, atom: u64) -> String {
        let (perm, masks) = self.atom(atom);
        format!("π={perm:?} masks={masks:?}")
    }
}

/// One randomness atom of a tabulated scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub label: String,
    pub weight: u64,
}

/// File form of a fully tabulated scheme. `enc1[w1][atom]` and
/// `enc2[w2][atom]` are codewords; `dec[i1][i2]` is the label for the
/// codewords with mixed-radix indices `i1`, `i2` (first symbol most
/// significant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub m1: u32,
    pub m2: u32,
    pub atoms: Vec<AtomEntry>,
    pub alphabet1: Vec<u32>,
    pub alphabet2: Vec<u32>,
    pub enc1: Vec<Vec<Vec<u32>>>,
    pub enc2: Vec<Vec<Vec<u32>>>,
    pub dec: Vec<Vec<u32>>,
}

/// A scheme given entirely by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedScheme {
    file: SchemeFile,
}

fn codeword_index(alphabet: &[u32], x: &[u32]) -> Option<usize> {
    if x.len() != alphabet.len() {
        return None;
    }
    let mut idx = 0usize;
    for (&s, &a) in x.iter().zip(alphabet) {
        if s >= a {
            return None;
        }
        idx = idx * a as usize + s as usize;
    }
    Some(idx)
}

fn codeword_of(alphabet: &[u32], mut idx: usize) -> Codeword {
    let mut x: Codeword = smallvec![0; alphabet.len()];
    for (slot, &a) in x.iter_mut().zip(alphabet).rev() {
        *slot = (idx % a as usize) as u32;
        idx /= a as usize;
    }
    x
}

fn alphabet_size(alphabet: &[u32]) -> Option<usize> {
    alphabet
        .iter()
        .try_fold(1usize, |acc, &a| acc.checked_mul(a as usize))
}

const MAX_DEC_ENTRIES: usize = 1 << 24;

impl TabulatedScheme {
    pub fn from_json(json: &str) -> Result<Self> {
        let file: SchemeFile =
            serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: SchemeFile) -> Result<Self> {
        let schema = |m: &str| Err(Error::Schema(m.to_string()));
        let total = |m: String| Err(Error::Totality(m));
        if file.m1 == 0 || file.m2 == 0 {
            return schema("input alphabets must be nonempty");
        }
        if file.atoms.is_empty() || file.atoms.iter().any(|a| a.weight == 0) {
            return schema("randomness atoms must be nonempty with positive weights");
        }
        if file
            .alphabet1
            .iter()
            .chain(&file.alphabet2)
            .any(|&a| a == 0)
        {
            return schema("codeword alphabets must be positive");
        }
        let (Some(n1), Some(n2)) = (
            alphabet_size(&file.alphabet1),
            alphabet_size(&file.alphabet2),
        ) else {
            return schema("codeword alphabet too large");
        };
        if n1.saturating_mul(n2) > MAX_DEC_ENTRIES {
            return schema("decoder table too large");
        }
        for (name, enc, m, alphabet) in [
            ("enc1", &file.enc1, file.m1, &file.alphabet1),
            ("enc2", &file.enc2, file.m2, &file.alphabet2),
        ] {
            if enc.len() != m as usize {
                return total(format!("{name} has {} rows, expected {m}", enc.len()));
            }
            for (w, row) in enc.iter().enumerate() {
                if row.len() != file.atoms.len() {
                    return total(format!(
                        "{name}[{w}] covers {} of {} atoms",
                        row.len(),
                        file.atoms.len()
                    ));
                }
                for (atom, x) in row.iter().enumerate() {
                    if codeword_index(alphabet, x).is_none() {
                        return total(format!(
                            "{name}[{w}][{atom}] = {x:?} is outside the alphabet"
                        ));
                    }
                }
            }
        }
        if file.dec.len() != n1 || file.dec.iter().any(|r| r.len() != n2) {
            return total(format!("dec must be a {n1}x{n2} table"));
        }
        Ok(TabulatedScheme { file })
    }

    pub fn file(&self) -> &SchemeFile {
        &self.file
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("serializable")
    }

    /// Mutable access for building negative controls.
    pub fn set_decoder_entry(&mut self, x1: &[u32], x2: &[u32], label: u32) -> Result<()> {
        let i1 = codeword_index(&self.file.alphabet1, x1)
            .ok_or_else(|| Error::Totality("x1 outside alphabet".into()))?;
        let i2 = codeword_index(&self.file.alphabet2, x2)
            .ok_or_else(|| Error::Totality("x2 outside alphabet".into()))?;
        self.file.dec[i1][i2] = label;
        Ok(())
    }
}

impl Scheme for TabulatedScheme {
    fn name(&self) -> String {
        self.file.name.clone()
    }

    fn input_sizes(&self) -> (u32, u32) {
        (self.file.m1, self.file.m2)
    }

    fn atom_count(&self) -> u64 {
        self.file.atoms.len() as u64
    }

    fn weight(&self, atom: u64) -> u64 {
        self.file.atoms[atom as usize].weight
    }

    fn encode1(&self, w1: u32, atom: u64) -> Codeword {
        self.file.enc1[w1 as usize][atom as usize]
            .iter()
            .copied()
            .collect()
    }

    fn encode2(&self, w2: u32, atom: u64) -> Codeword {
        self.file.enc2[w2 as usize][atom as usize]
            .iter()
            .copied()
            .collect()
    }

    fn decode(&self, x1: &Codeword, x2: &Codeword) -> Option<u32> {
        let i1 = codeword_index(&self.file.alphabet1, x1)?;
        let i2 = codeword_index(&self.file.alphabet2, x2)?;
        Some(self.file.dec[i1][i2])
    }

    fn alphabets(&self) -> (Vec<u32>, Vec<u32>) {
        (self.file.alphabet1.clone(), self.file.alphabet2.clone())
    }

    fn describe_atom(&self, atom: u64) -> String {
        self.file.atoms[atom as usize].label.clone()
    }
}

/// Tabulate any scheme. Decoder entries the scheme leaves undefined become 0.
pub fn tabulate(s: &dyn Scheme) -> Result<TabulatedScheme> {
    let (m1, m2) = s.input_sizes();
    let (a1, a2) = s.alphabets();
    let atoms = s.atom_count();
    if atoms > 1 << 20 {
        return Err(Error::BudgetExceeded {
            needed: atoms as u128,
            budget: 1 << 20,
        });
    }
    let (n1, n2) = match (alphabet_size(&a1), alphabet_size(&a2)) {
        (Some(a), Some(b)) if a.saturating_mul(b) <= MAX_DEC_ENTRIES => (a, b),
        _ => {
            return Err(Error::BudgetExceeded {
                needed: u128::MAX,
                budget: MAX_DEC_ENTRIES as u128,
            })
        }
    };
    let enc = |m: u32, e: &dyn Fn(u32, u64) -> Codeword| -> Vec<Vec<Vec<u32>>> {
        (0..m)
            .map(|w| (0..atoms).map(|a| e(w, a).to_vec()).collect())
            .collect()
    };
    let dec = (0..n1)
        .map(|i1| {
            let x1 = codeword_of(&a1, i1);
            (0..n2)
                .map(|i2| s.decode(&x1, &codeword_of(&a2, i2)).unwrap_or(0))
                .collect()
        })
        .collect();
    let file = SchemeFile {
        name: s.name(),
        description: String::new(),
        m1,
        m2,
        atoms: (0..atoms)
            .map(|a| AtomEntry {
                label: s.describe_atom(a),
                weight: s.weight(a),
            })
            .collect(),
        alphabet1: a1,
        alphabet2: a2,
        enc1: enc(m1, &|w, a| s.encode1(w, a)),
        enc2: enc(m2, &|w, a| s.encode2(w, a)),
        dec,
    };
    TabulatedScheme::from_file(file)
}

/// Bundled scheme files.
pub mod bundled {
    pub const TABLE_MASKING_2X3: &str = include_str!("../data/schemes/table_masking_2x3.json");
    pub const REVEAL_KEY: &str = include_str!("../data/schemes/reveal_key.json");
}

/// Bundled function tables, keyed by name.
pub fn bundled_tables() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("equal3", include_str!("../data/tables/equal3.json")),
        ("and", include_str!("../data/tables/and.json")),
        (
            "selected_switch",
            include_str!("../data/tables/selected_switch.json"),
        ),
        (
            "four_output",
            include_str!("../data/tables/four_output.json"),
        ),
        ("z4_example", include_str!("../data/tables/z4_example.json")),
        (
            "threshold_2x3",
            include_str!("../data/tables/threshold_2x3.json"),
        ),
        ("reveal_key", include_str!("../data/tables/reveal_key.json")),
    ])
}

pub fn bundled_table(name: &str) -> Option<FunctionTable> {
    bundled_tables()
        .get(name)
        .map(|s| serde_json::from_str(s).expect("bundled table parses"))
}
