//! Weierstrass data: validation, ends, indices and total curvature.

mod callable;
mod catalog;
mod curvature;
mod data;
mod ends;
mod periods;

use num_complex::Complex64;

pub use callable::{CallableData, CallableKind};
pub use catalog::{
    catalog, default_m2_denominator, epsilon_family, essential, meeks, rejected_m2, section4_candidate,
    CatalogParams, CATALOG_NAMES,
};
pub use curvature::{total_curvature, CurvatureReport};
pub use data::{GaussSample, Surface, WeierstrassData, POINT_TOL};
pub use ends::{
    classify_all, classify_end, common_value_multiplicities, end_multiplicity, index_from_multiplicities, EndKind,
    EndReport, COMMON_VALUE_TOL,
};
pub use periods::{
    check_periods, check_periods_with, check_regularity, EndPeriods, OrderMismatch, PeriodReport, RegularityReport,
    PERIOD_TOL,
};

use crate::cxratio::ExtComplex;

/// Rational data or a named non-rational family.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceData {
    Rational(WeierstrassData),
    Callable(CallableData),
}

impl SurfaceData {
    pub fn as_rational(&self) -> Option<&WeierstrassData> {
        match self {
            SurfaceData::Rational(d) => Some(d),
            SurfaceData::Callable(_) => None,
        }
    }

    fn inner(&self) -> &dyn Surface {
        match self {
            SurfaceData::Rational(d) => d,
            SurfaceData::Callable(d) => d,
        }
    }
}

impl Surface for SurfaceData {
    fn gauss(&self, z: Complex64) -> GaussSample {
        self.inner().gauss(z)
    }

    fn h(&self, z: Complex64) -> Complex64 {
        self.inner().h(z)
    }

    fn punctures(&self) -> &[ExtComplex] {
        self.inner().punctures()
    }

    fn involution_antipodal(&self) -> bool {
        self.inner().involution_antipodal()
    }

    fn mismatch(&self, z: Complex64) -> f64 {
        self.inner().mismatch(z)
    }

    fn rational(&self) -> Option<&WeierstrassData> {
        self.as_rational()
    }

    fn xz(&self, z: Complex64) -> [Complex64; 4] {
        self.inner().xz(z)
    }
}
