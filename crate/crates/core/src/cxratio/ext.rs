use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the Riemann sphere: a finite complex number or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex::Finite(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        ExtComplex::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            ExtComplex::Infinity => ExtComplex::Infinity,
        }
    }

    /// `1/z` on the sphere.
    pub fn recip(&self) -> Self {
        match *self {
            ExtComplex::Infinity => ExtComplex::ZERO,
            ExtComplex::Finite(z) if z == Complex64::new(0.0, 0.0) => ExtComplex::Infinity,
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
        }
    }

    /// The antipodal involution `z ↦ -1/z̄`.
    pub fn antipode(&self) -> Self {
        match *self {
            ExtComplex::Infinity => ExtComplex::ZERO,
            ExtComplex::Finite(z) if z == Complex64::new(0.0, 0.0) => ExtComplex::Infinity,
            ExtComplex::Finite(z) => ExtComplex::Finite(-z.conj().inv()),
        }
    }

    /// Chordal distance on the unit sphere (bounded by 1, `∞`-safe).
    pub fn chordal_distance(&self, other: &ExtComplex) -> f64 {
        match (*self, *other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(a), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(a)) => 1.0 / (1.0 + a.norm_sqr()).sqrt(),
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }

    /// Whether two points agree on the sphere to within `tol`, measured as
    /// `|a - b| ≤ tol·max(1, |a|)` for finite points and by the reciprocal
    /// when either is large.
    pub fn approx_eq(&self, other: &ExtComplex, tol: f64) -> bool {
        match (*self, *other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => true,
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                if a.norm() <= 1.0 || b.norm() <= 1.0 {
                    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
                } else {
                    (a.inv() - b.inv()).norm() <= tol
                }
            }
            (ExtComplex::Finite(a), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(a)) => a.norm() >= 1.0 / tol,
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Infinity => write!(f, "inf"),
            ExtComplex::Finite(z) => fmt_complex(f, *z),
        }
    }
}

pub(crate) fn fmt_complex(f: &mut fmt::Formatter<'_>, z: Complex64) -> fmt::Result {
    if z.im >= 0.0 {
        write!(f, "{:.10}+{:.10}i", z.re, z.im)
    } else {
        write!(f, "{:.10}-{:.10}i", z.re, -z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipode_is_fixed_point_free_involution() {
        let pts = [
            ExtComplex::ZERO,
            ExtComplex::Infinity,
            ExtComplex::new(0.3, -2.0),
            ExtComplex::new(1.0, 0.0),
        ];
        for p in pts {
            let q = p.antipode();
            assert!(p.chordal_distance(&q) > 0.5);
            assert!(q.antipode().approx_eq(&p, 1e-14));
        }
    }

    #[test]
    fn chordal_distance_handles_infinity() {
        assert_eq!(ExtComplex::Infinity.chordal_distance(&ExtComplex::Infinity), 0.0);
        let d = ExtComplex::ZERO.chordal_distance(&ExtComplex::Infinity);
        assert!((d - 1.0).abs() < 1e-15);
    }
}
