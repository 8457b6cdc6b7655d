//! Euler calculus on finite complexes and exact checkers for Euler-characteristic
//! identities of stable maps.
//!
//! - [`cellcx`]: complexes, definable sets, `χ_c`, constructible functions, mod-2 homology.
//! - [`pushfwd`]: simplicial maps, fiberwise integration and pushforward.
//! - [`localfib`]: local generic fiber arithmetic for quadratic suspensions.
//! - [`formulas`]: singular-stratum ledgers and the identity checkers.
//! - [`random`]: seeded generators used by the property harnesses.
//! - [`io`]: JSON loaders resolving file references.

pub mod cellcx;
pub mod formulas;
pub mod io;
pub mod localfib;
pub mod pushfwd;
pub mod random;

pub use cellcx::{Cell, CellError, Complex, ConstructibleFunction, DefinableSet};
pub use formulas::{CheckReport, FormulaError, LocalLedger, SingularLedger};
pub use localfib::{LocalFibError, Sign, StratumType};
pub use pushfwd::{PushError, SimplicialMap};
