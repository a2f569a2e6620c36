//! Block-counting sequences `a_{m;w}(n)`: the number of occurrences of a
//! word `w` in the base-m expansion of `n`, reduced mod m.
//!
//! * [`words`]: digit arithmetic and the brute-force oracle.
//! * [`window`]: the fast doubling generators built on the window transform.
//! * [`morphism`]: kernel inference and uniform-morphism presentations.
//! * [`structure`]: block classification and power-prefix scans.
//! * [`algebra`]: truncated series over F_p and the functional equation.

pub mod algebra;
pub mod error;
pub mod morphism;
pub mod structure;
pub mod window;
pub mod words;

pub use error::{AlgebraError, MorphismError, StructureError, WindowError, WordError};
pub use words::{PatternSpec, Word};
