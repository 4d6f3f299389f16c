//! Arithmetic in `F_{p^n}`.
//!
//! Elements are polynomials of degree `< n` over `F_p`, encoded as
//! `Σ a_i p^i`. Multiplication reduces modulo a monic irreducible `h(x)`;
//! once a primitive element `g` is fixed, a discrete-log table turns
//! multiplication and inversion into table lookups.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numbers::{checked_pow, divisors, is_prime};
use crate::structures::{Carrier, ConfusableStructure, Provenance};
use crate::Elem;

/// Exponent/logarithm tables for `F_q^×` with respect to a fixed generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlogTable {
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl DlogTable {
    /// `g^k` for `k` taken modulo `q - 1`.
    pub fn exp(&self, k: u64) -> Elem {
        self.exp[(k % self.exp.len() as u64) as usize]
    }

    /// `k ∈ [0, q-1)` with `g^k = a`, or `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a == 0 {
            None
        } else {
            self.log.get(a as usize).copied()
        }
    }

    pub fn order(&self) -> usize {
        self.exp.len()
    }
}

/// A concrete finite field `F_{p^n}` together with its modulus and generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRepr", into = "FieldSpecRepr")]
pub struct FieldSpec {
    p: u32,
    n: u32,
    q: u32,
    h: Vec<u32>,
    g: Elem,
    dlog: DlogTable,
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u32,
    n: u32,
    h: Vec<u32>,
    g: Elem,
}

impl TryFrom<FieldSpecRepr> for FieldSpec {
    type Error = Error;

    fn try_from(r: FieldSpecRepr) -> Result<Self> {
        if r.h.len() != r.n as usize + 1 {
            return Err(Error::InvalidField(format!(
                "h has {} coefficients, expected {}",
                r.h.len(),
                r.n + 1
            )));
        }
        FieldSpec::new(r.p, r.h, r.g)
    }
}

impl From<FieldSpec> for FieldSpecRepr {
    fn from(f: FieldSpec) -> Self {
        FieldSpecRepr {
            p: f.p,
            n: f.n,
            h: f.h,
            g: f.g,
        }
    }
}

impl FieldSpec {
    /// Canonical `F_{p^n}` under the default size bound.
    pub fn make(p: u32, n: u32) -> Result<Self> {
        Self::make_bounded(p, n, Limits::default().max_field)
    }

    /// Canonical `F_{p^n}`: `h` is the smallest-encoding monic irreducible of
    /// degree `n` whose root `x` generates `F_q^×`, and `g` is the
    /// smallest-encoding primitive element. For `n = 1` the modulus is the
    /// unused placeholder `x`.
    pub fn make_bounded(p: u32, n: u32, bound: u64) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::InvalidField("degree must be positive".into()));
        }
        let q = field_order(p, n, bound)?;
        if n == 1 {
            let g = (1..q)
                .find(|&a| order_mod_prime(a, p) == q - 1)
                .expect("every prime field has a primitive root");
            return Self::new(p, vec![0, 1], g);
        }
        let pn = q;
        for low in 0..pn {
            let h = monic_from_low(low, p, n);
            if !is_irreducible(&h, p) {
                continue;
            }
            let x = p; // encoding of the polynomial `x`
            if poly_element_order(x, &h, p, q) == q - 1 {
                return Self::new(p, h, x);
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    /// Build a field from an explicit modulus and generator, validating both.
    pub fn new(p: u32, h: Vec<u32>, g: Elem) -> Result<Self> {
        check_prime(p)?;
        if h.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree ≥ 1".into()));
        }
        let n = (h.len() - 1) as u32;
        if *h.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if h.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(
                "modulus coefficient out of range".into(),
            ));
        }
        if n > 1 && !is_irreducible(&h, p) {
            return Err(Error::InvalidField(format!(
                "{} is reducible over F_{p}",
                format_poly(&h)
            )));
        }
        let q = field_order(p, n, u64::MAX)?;
        if g == 0 || g >= q {
            return Err(Error::InvalidField(format!("generator {g} out of range")));
        }
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![u32::MAX; q as usize];
        let mut acc: Elem = 1;
        for k in 0..q - 1 {
            if log[acc as usize] != u32::MAX {
                return Err(Error::InvalidField(format!(
                    "{g} is not a primitive element (order {k})"
                )));
            }
            log[acc as usize] = k;
            exp.push(acc);
            acc = poly_mul_mod(acc, g, &h, p);
        }
        debug_assert_eq!(acc, 1);
        Ok(FieldSpec {
            p,
            n,
            q,
            h,
            g,
            dlog: DlogTable { exp, log },
        })
    }

    /// Same field and modulus, different primitive element.
    pub fn with_generator(&self, g: Elem) -> Result<Self> {
        Self::new(self.p, self.h.clone(), g)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients of `h`, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.h
    }

    pub fn generator(&self) -> Elem {
        self.g
    }

    pub fn dlog(&self) -> &DlogTable {
        &self.dlog
    }

    /// Every primitive element, ascending.
    pub fn primitive_elements(&self) -> Vec<Elem> {
        let m = (self.q - 1) as u64;
        (1..self.q)
            .filter(|&a| crate::numbers::gcd(self.dlog.log[a as usize] as u64, m) == 1)
            .collect()
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.n == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.n == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = self.dlog.log[a as usize] as u64 + self.dlog.log[b as usize] as u64;
        self.dlog.exp(k)
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let k = self.dlog.log[a as usize] as u64;
        Ok(self.dlog.exp((self.q as u64 - 1 - k) % (self.q as u64 - 1)))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        self.dlog.exp(self.dlog.log[a as usize] as u64 * e)
    }

    /// Product computed by polynomial multiplication modulo `h`, independent of
    /// the log tables.
    pub fn mul_poly(&self, a: Elem, b: Elem) -> Elem {
        poly_mul_mod(a, b, &self.h, self.p)
    }

    /// Integer for prime fields, `x^2+2x+1` style for extensions.
    pub fn format(&self, a: Elem) -> String {
        if self.n == 1 {
            return a.to_string();
        }
        format_poly(&digits(a, self.p, self.n as usize))
    }

    /// Inverse of [`FieldSpec::format`]; also accepts `x^{2}` braces.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        let cleaned: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
            .collect();
        let bad = || Error::InvalidField(format!("cannot parse element {s:?}"));
        if cleaned.is_empty() {
            return Err(bad());
        }
        let mut coeffs = vec![0u32; self.n as usize];
        for term in cleaned.split('+') {
            let (coef, degree) = match term.find('x') {
                None => (term.parse::<u32>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let coef = if pos == 0 {
                        1
                    } else {
                        term[..pos].parse::<u32>().map_err(|_| bad())?
                    };
                    let rest = &term[pos + 1..];
                    let degree = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(bad)?
                            .parse::<usize>()
                            .map_err(|_| bad())?
                    };
                    (coef, degree)
                }
            };
            if degree >= self.n as usize && !(self.n == 1 && degree == 0) {
                return Err(bad());
            }
            coeffs[degree] = (coeffs[degree] + coef) % self.p;
        }
        Ok(encode(&coeffs, self.p))
    }

    /// Confusable sets for a divisor `d` of `q - 1`: the randomizer is the
    /// order-`(q-1)/d` subgroup `{g^0, g^d, ...}` and each nonzero set gathers
    /// the elements whose discrete logs agree modulo `d`.
    pub fn confusable_sets(&self, d: u32) -> Result<ConfusableStructure> {
        let m = self.q - 1;
        if d == 0 || !m.is_multiple_of(d) {
            return Err(Error::NotADivisor {
                divisor: d as u64,
                value: m as u64,
            });
        }
        let b = m / d;
        let mut randomizer: Vec<Elem> = (0..b).map(|j| self.dlog.exp((j * d) as u64)).collect();
        randomizer.sort_unstable();
        let mut sets = vec![vec![0]];
        for i in 1..=d {
            let mut set: Vec<Elem> = (0..b)
                .map(|j| self.dlog.exp((j * d + i - 1) as u64))
                .collect();
            set.sort_unstable();
            sets.push(set);
        }
        sets.sort_by_key(|s| s[0]);
        ConfusableStructure::new(
            Carrier::field(self.clone()),
            randomizer,
            sets,
            Provenance::Divisor(d),
        )
    }

    /// Divisors of `q - 1`, each of which yields one family of confusable sets.
    pub fn admissible_divisors(&self) -> Vec<u32> {
        divisors((self.q - 1) as u64)
            .into_iter()
            .map(|d| d as u32)
            .collect()
    }
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(Error::NotPrime(p as u64))
    }
}

fn field_order(p: u32, n: u32, bound: u64) -> Result<u32> {
    let q = checked_pow(p as u64, n).unwrap_or(u64::MAX);
    let limit = bound.min(u32::MAX as u64);
    if q > limit {
        return Err(Error::SizeBoundExceeded {
            size: q,
            bound: limit,
        });
    }
    Ok(q as u32)
}

fn order_mod_prime(a: u32, p: u32) -> u32 {
    let mut acc = a as u64 % p as u64;
    let mut k = 1;
    while acc != 1 {
        acc = acc * a as u64 % p as u64;
        k += 1;
        if k > p {
            return 0;
        }
    }
    k
}

fn poly_element_order(a: Elem, h: &[u32], p: u32, q: u32) -> u32 {
    let mut acc = a;
    let mut k = 1;
    while acc != 1 {
        acc = poly_mul_mod(acc, a, h, p);
        k += 1;
        if k > q {
            return 0;
        }
    }
    k
}

fn digits(mut a: Elem, p: u32, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(a % p);
        a /= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> Elem {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn monic_from_low(low: u32, p: u32, n: u32) -> Vec<u32> {
    let mut h = digits(low, p, n as usize);
    h.push(1);
    h
}

fn poly_mul_mod(a: Elem, b: Elem, h: &[u32], p: u32) -> Elem {
    let n = h.len() - 1;
    let da = digits(a, p, n);
    let db = digits(b, p, n);
    let mut prod = vec![0u64; 2 * n - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for top in (n..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        // subtract c·x^{top-n}·h
        for (k, &hk) in h.iter().enumerate() {
            let idx = top - n + k;
            prod[idx] = (prod[idx] + (p as u64 - c) * hk as u64) % p as u64;
        }
    }
    let coeffs: Vec<u32> = prod[..n].iter().map(|&c| c as u32).collect();
    encode(&coeffs, p)
}

/// Remainder of `a` modulo the monic `m`, both low-order first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (k, &mk) in m.iter().enumerate() {
                r[shift + k] = (r[shift + k] + (p as u64 - c) * mk as u64) % p as u64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(h: &[u32], p: u32) -> bool {
    let n = h.len() - 1;
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let divisor = monic_from_low(low, p, d as u32);
            if poly_rem(h, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn format_poly(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => var,
            _ => format!("{c}{var}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}
