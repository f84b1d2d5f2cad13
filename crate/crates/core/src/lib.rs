//! Solvers for maximizing a linear objective over the Pareto-optimal
//! solutions of a bounded polyhedron with a linear payoff map.

pub mod bench;
pub mod lp;
pub mod matching;
pub mod model;
pub mod numeric;
pub mod pareto;
pub mod solver;

pub use model::{MaxParetoInstance, NumericMode, PayoffVector};
pub use numeric::Rational;
