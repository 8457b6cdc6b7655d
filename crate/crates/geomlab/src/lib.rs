//! Numeric ground truth for the formula checkers: level curves of plane
//! polynomials, local degrees, fold and cusp loci, PL Morse ledgers and the
//! curated example zoo.

pub mod degree;
pub mod morin;
pub mod plmorse;
pub mod poly;
pub mod riemann;
pub mod svg;
pub mod trace;
pub mod zoo;

pub use poly::{Poly, PolyMap, Rat};
pub use trace::{curve_chi_c, fiber_chi_c, stable_fiber, trace_plane_fiber, GridSpec, PlaneBox, TraceError, TracedCurve};
