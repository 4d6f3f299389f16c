//! Exact communication rates of the form `(num/den) · log2(base)`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A rate in bits, held exactly as a rational multiple of `log2(base)` with
/// `base` not a perfect power. Two rates are equal iff they are equal as
/// real numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RateRepr", into = "RateRepr")]
pub struct Rate {
    base: u128,
    num: u64,
    den: u64,
}

#[derive(Serialize, Deserialize)]
struct RateRepr {
    base: u128,
    num: u64,
    den: u64,
    bits: f64,
    #[serde(default)]
    exact: String,
}

impl TryFrom<RateRepr> for Rate {
    type Error = String;
    fn try_from(r: RateRepr) -> Result<Self, String> {
        if r.den == 0 || r.base == 0 {
            return Err("rate with zero base or denominator".into());
        }
        Ok(Rate::scaled(r.base, r.num, r.den))
    }
}

impl From<Rate> for RateRepr {
    fn from(r: Rate) -> Self {
        RateRepr {
            base: r.base,
            num: r.num,
            den: r.den,
            bits: r.bits(),
            exact: r.symbolic(),
        }
    }
}

fn root_exact(a: u128, k: u32) -> Option<u128> {
    let guess = (a as f64).powf(1.0 / k as f64).round() as u128;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r >= 2 && r.checked_pow(k) == Some(a))
}

impl Rate {
    /// `log2(alphabet)` bits: one symbol from an alphabet of that size.
    pub fn of_alphabet(alphabet: u128) -> Self {
        Rate::scaled(alphabet, 1, 1)
    }

    /// `(num/den) · log2(alphabet)` bits.
    pub fn scaled(alphabet: u128, num: u64, den: u64) -> Self {
        assert!(alphabet >= 1 && den >= 1);
        if alphabet == 1 || num == 0 {
            return Rate {
                base: 1,
                num: 0,
                den: 1,
            };
        }
        let mut base = alphabet;
        let mut power = 1u64;
        for k in (2..=127u32).rev() {
            if let Some(r) = root_exact(alphabet, k) {
                base = r;
                power = k as u64;
                break;
            }
        }
        let n = num * power;
        let g = n.gcd(&den);
        Rate {
            base,
            num: n / g,
            den: den / g,
        }
    }

    pub fn zero() -> Self {
        Rate {
            base: 1,
            num: 0,
            den: 1,
        }
    }

    pub fn bits(&self) -> f64 {
        if self.num == 0 {
            return 0.0;
        }
        self.num as f64 / self.den as f64 * (self.base as f64).log2()
    }

    pub fn base(&self) -> u128 {
        self.base
    }

    pub fn coefficient(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    /// Exact form such as `2`, `1/2`, `log2 3` or `3/2·log2 5`.
    pub fn symbolic(&self) -> String {
        let coef = match (self.num, self.den) {
            (n, 1) => n.to_string(),
            (n, d) => format!("{n}/{d}"),
        };
        match (self.num, self.base) {
            (0, _) => "0".into(),
            (_, 2) => coef,
            (n, b) if n == self.den => format!("log2 {b}"),
            (_, b) => format!("{coef}·log2 {b}"),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.bits())
    }
}
