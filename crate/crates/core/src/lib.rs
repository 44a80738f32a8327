//! Exact evaluation of Katalan functions, K-k-Schur functions and their
//! weighted interpolants, together with two independent routes for expanding
//! closed k-Schur Katalan functions in the K-k-Schur basis.

pub mod bases;
pub mod error;
pub mod katalan;
pub mod modular;
pub mod partitions;
pub mod recursion;
pub mod rootideal;
pub mod selftest;
pub mod symfunc;

mod det;

pub use bases::{BasisCache, Expansion, Family};
pub use error::{Error, Result};
pub use katalan::{evaluate, GammaCombo, KatalanSpec, MirrorOutcome, Rewrite, Truncation};
pub use partitions::{enumerate_kbounded, in_hat_class, EpsilonStep, IntVec, Partition};
pub use recursion::{expand_recursive, verify_theorem, weight_step, Report, WeightedTerm};
pub use rootideal::{delta_k, second_components, RootIdeal, RootMultiset};
pub use symfunc::{g_of_vector, is_row_dead, k_hom, HMonomial, SymFunc};
