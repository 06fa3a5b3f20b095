//! Exact computational measure theory on the unit interval.
//!
//! Everything here runs on exact rational arithmetic: regions (finite
//! interval unions with endpoint flags), probability measures (atoms plus
//! piecewise-constant densities), test functions (piecewise linear and
//! simple), the total-variation and Prohorov metrics, neighborhood gauges,
//! certified quantization and discrete approximation, convergence-mode
//! classification with exact witnesses, setwise-compactness diagnostics, and
//! σ-algebra atom analysis on finite ground sets.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so the whole API is safe for unrestricted parallel use.

pub mod approx;
pub mod base;
pub mod func;
pub mod gen;
pub mod measure;
pub mod metrics;
pub mod rational;
pub mod region;
pub mod sequences;
pub mod sigma;

pub use func::{hat, hat_family, level_partition, FuncKind, LevelPartition, PiecewiseFunc};
pub use measure::{convex_combine, Measure, MeasureError};
pub use rational::Rat;
pub use region::{Interval, Region, RegionError};
