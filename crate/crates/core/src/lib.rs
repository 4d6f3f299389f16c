//! Expand-and-randomize secure computation over finite fields `F_q` and
//! modular rings `Z_n`.
//!
//! Alice holds `W1`, Bob holds `W2`, and Carol must learn `f(W1, W2)` and
//! nothing else. A scheme relabels the inputs into a carrier (a field or
//! `Z_n`) so that `f` is read off from which *confusable set* the sum
//! `W̃1 + W̃2` lands in, then multiplies by a random *randomizer* that keeps
//! every confusable set fixed while scrambling the elements inside it.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] and [`ring`] provide the carriers and their confusable sets,
//! * [`structures`] unifies them and produces the reference catalogs,
//! * [`expansion`] searches for feasible expanded functions,
//! * [`protocol`] turns expansions (and a few other constructions) into schemes,
//! * [`verify`] checks correctness and perfect security by exact enumeration,
//! * [`blockcode`] adds linear block compression of the decoder statistic.

pub mod blockcode;
pub mod error;
pub mod expansion;
pub mod field;
pub mod limits;
pub mod numbers;
pub mod protocol;
pub mod rate;
pub mod ring;
pub mod structures;
pub mod verify;

pub use error::{Error, Result};
pub use expansion::{FeasibleExpansion, FunctionTable};
pub use field::FieldSpec;
pub use limits::Limits;
pub use protocol::{Codeword, Scheme};
pub use rate::Rate;
pub use ring::RingSpec;
pub use structures::{Carrier, ConfusableStructure};

/// Carrier element, canonically encoded as an integer in `[0, size)`.
///
/// For `F_{p^n}` the encoding of `a_0 + a_1 x + ... + a_{n-1} x^{n-1}` is
/// `Σ a_i p^i`; for `Z_n` it is the residue itself.
pub type Elem = u32;
