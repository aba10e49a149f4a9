//! Exact arithmetic for group topologies on the integers.
//!
//! Four families of identity neighborhoods are supported, each with a
//! three-valued membership oracle (`In`/`Out` certified, `Unknown` with the
//! exhausted cap):
//!
//! * [`dseq`] — subgroup bases `b_n * Z` from divisibility chains, with
//!   mixed-radix digits, valuation levels, and finite-prefix convergence
//!   certificates;
//! * [`weak`] — weak-topology bands from finite character sets, separation
//!   witnesses, and the torsion dual of a chain topology;
//! * [`uniform`] — the uniform-convergence pseudometric `d_S` and its
//!   neighborhood base, exact for rational point sets, grids, and
//!   reciprocal-term families;
//! * [`zelenyuk`] — the finest-topology neighborhoods in which a chain
//!   converges to zero, decided by bounded search plus sound closure
//!   arguments and cross-checked against a brute-force oracle.
//!
//! [`topology`] wraps all four behind one neighborhood abstraction with
//! finite-window axiom checks, refinement comparisons, and covering
//! witnesses; [`torus`] and [`interval`] supply the exact circle-group and
//! certified-enclosure arithmetic underneath.

pub mod dseq;
pub mod interval;
pub mod topology;
pub mod torus;
pub mod uniform;
pub mod verdict;
pub mod weak;
pub mod zelenyuk;

pub use dseq::DSequence;
pub use torus::TorusPoint;
pub use verdict::{Verdict, VerdictKind};
