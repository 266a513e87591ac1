//! Complex polynomials and rational maps of the Riemann sphere.

mod ext;
mod fractions;
mod mobius;
mod poly;
mod rational;
mod roots;

pub use ext::ExtComplex;
pub use fractions::{partial_fractions, to_rational, Basis, FractionSum, FractionTerm, CENTER_TOL};
pub(crate) use fractions::same_center;
pub use mobius::{mobius_apply_data, MobiusTransform};
pub use poly::Poly;
pub use rational::{Divisor, Laurent, RationalMap, DEFAULT_TOL};
pub use roots::{roots, roots_with, RootCluster, RootConfig};

/// Topological degree of a rational map.
pub fn rat_degree(f: &RationalMap) -> usize {
    f.degree()
}

pub fn rat_eval(f: &RationalMap, z: ExtComplex) -> ExtComplex {
    f.eval(z)
}
