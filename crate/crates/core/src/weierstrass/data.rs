use num_complex::Complex64;
use serde::Serialize;

use crate::cxratio::{ExtComplex, RationalMap};
use crate::error::{Error, Result};

/// Rational Weierstrass data `(φ, ψ, dh = h dz)` on the punctured sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeierstrassData {
    pub phi: RationalMap,
    pub psi: RationalMap,
    pub h: RationalMap,
    pub punctures: Vec<ExtComplex>,
    pub involution_antipodal: bool,
    #[serde(skip)]
    derivs: Option<(RationalMap, RationalMap)>,
}

/// Tolerance for identifying points of the sphere given as input.
pub const POINT_TOL: f64 = 1e-9;

impl WeierstrassData {
    pub fn new(
        phi: RationalMap,
        psi: RationalMap,
        h: RationalMap,
        punctures: Vec<ExtComplex>,
        involution_antipodal: bool,
    ) -> Result<Self> {
        if phi.is_constant() {
            return Err(Error::ConstantGaussMap { which: "φ" });
        }
        if psi.is_constant() {
            return Err(Error::ConstantGaussMap { which: "ψ" });
        }
        if h.is_zero() {
            return Err(Error::InvalidParameter("dh vanishes identically".into()));
        }
        for (i, p) in punctures.iter().enumerate() {
            if punctures[..i].iter().any(|q| q.approx_eq(p, POINT_TOL)) {
                return Err(Error::DuplicatePuncture(*p));
            }
        }
        let derivs = Some((phi.derivative()?, psi.derivative()?));
        Ok(WeierstrassData {
            phi,
            psi,
            h,
            punctures,
            involution_antipodal,
            derivs,
        })
    }

    pub fn genus(&self) -> u32 {
        0
    }

    pub fn dphi(&self) -> &RationalMap {
        &self.derivs.as_ref().expect("constructed through new").0
    }

    pub fn dpsi(&self) -> &RationalMap {
        &self.derivs.as_ref().expect("constructed through new").1
    }

    pub fn is_puncture(&self, p: &ExtComplex) -> bool {
        self.punctures.iter().any(|q| q.approx_eq(p, POINT_TOL))
    }

    /// The four components `((φ+ψ)h, -i(φ-ψ)h, (1-φψ)h, (1+φψ)h)` of `x_z`.
    pub fn xz_components(&self) -> Result<[RationalMap; 4]> {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let sum = self.phi.add(&self.psi)?;
        let diff = self.phi.sub(&self.psi)?;
        let prod = self.phi.mul(&self.psi)?;
        Ok([
            sum.mul(&self.h)?,
            diff.mul(&self.h)?.scale(-i),
            prod.scale(-one).add_constant(one).mul(&self.h)?,
            prod.add_constant(one).mul(&self.h)?,
        ])
    }

    /// `x_z` evaluated directly from the Gauss maps at a finite point.
    pub fn xz(&self, z: Complex64) -> [Complex64; 4] {
        let (p, q, h) = (self.phi.value(z), self.psi.value(z), self.h.value(z));
        xz_from_values(p, q, h)
    }
}

pub(crate) fn xz_from_values(p: Complex64, q: Complex64, h: Complex64) -> [Complex64; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        (p + q) * h,
        -i * (p - q) * h,
        (1.0 - p * q) * h,
        (1.0 + p * q) * h,
    ]
}

/// Gauss-map values and derivatives at a point, each stored as
/// `a·e^{log}` so families with exponential factors stay representable.
#[derive(Clone, Copy, Debug)]
pub struct GaussSample {
    pub phi: Complex64,
    pub dphi: Complex64,
    pub log_phi: Complex64,
    pub psi: Complex64,
    pub dpsi: Complex64,
    pub log_psi: Complex64,
}

impl GaussSample {
    /// Pointwise curvature density `4φ'·conj(ψ')/(φ - conj ψ)²` per unit
    /// `du dv`; its real part integrates to `-∫K` and its imaginary part to
    /// `∫K⊥`.
    pub fn curvature_density(&self) -> Complex64 {
        let delta = self.log_psi.conj() - self.log_phi;
        let num = 4.0 * self.dphi * self.dpsi.conj();
        if delta.re <= 0.0 {
            let x = delta.exp();
            let d = self.phi - self.psi.conj() * x;
            num * x / (d * d)
        } else {
            let y = (-delta).exp();
            let d = self.phi * y - self.psi.conj();
            num * y / (d * d)
        }
    }

    /// Unscaled values `(φ, ψ)`.
    pub fn values(&self) -> (Complex64, Complex64) {
        (
            self.phi * self.log_phi.exp(),
            self.psi * self.log_psi.exp(),
        )
    }
}

/// Numerical access to Weierstrass data, rational or not.
pub trait Surface: Sync {
    fn gauss(&self, z: Complex64) -> GaussSample;
    /// Coefficient of `dh = h(z) dz`.
    fn h(&self, z: Complex64) -> Complex64;
    fn punctures(&self) -> &[ExtComplex];
    fn involution_antipodal(&self) -> bool;
    /// Chordal distance between `φ(z)` and `conj ψ(z)`; zero exactly at
    /// singular points.
    fn mismatch(&self, z: Complex64) -> f64;
    fn rational(&self) -> Option<&WeierstrassData> {
        None
    }

    fn xz(&self, z: Complex64) -> [Complex64; 4] {
        let (p, q) = self.gauss(z).values();
        xz_from_values(p, q, self.h(z))
    }
}

impl Surface for WeierstrassData {
    fn gauss(&self, z: Complex64) -> GaussSample {
        let zero = Complex64::new(0.0, 0.0);
        GaussSample {
            phi: self.phi.value(z),
            dphi: self.dphi().value(z),
            log_phi: zero,
            psi: self.psi.value(z),
            dpsi: self.dpsi().value(z),
            log_psi: zero,
        }
    }

    fn h(&self, z: Complex64) -> Complex64 {
        self.h.value(z)
    }

    fn punctures(&self) -> &[ExtComplex] {
        &self.punctures
    }

    fn involution_antipodal(&self) -> bool {
        self.involution_antipodal
    }

    fn mismatch(&self, z: Complex64) -> f64 {
        let a = self.phi.eval_finite(z);
        let b = self.psi.eval_finite(z).conj();
        a.chordal_distance(&b)
    }

    fn rational(&self) -> Option<&WeierstrassData> {
        Some(self)
    }

    fn xz(&self, z: Complex64) -> [Complex64; 4] {
        WeierstrassData::xz(self, z)
    }
}
