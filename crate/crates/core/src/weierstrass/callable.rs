use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::data::{GaussSample, Surface};
use crate::cxratio::ExtComplex;
use crate::error::{Error, Result};

/// Non-rational data known by name. Values are produced in the scaled form
/// `a·e^{L}` used by [`GaussSample`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "callable", content = "params", rename_all = "snake_case")]
pub enum CallableKind {
    /// `φ = z^{2p-1}E`, `ψ = -z^{-(2p-1)}E`, `dh = d(1/E)` with
    /// `E = exp((z - 1/z)/2)`.
    Essential { p: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallableData {
    pub kind: CallableKind,
    pub punctures: Vec<ExtComplex>,
    pub involution_antipodal: bool,
}

impl CallableData {
    /// Builds the data and spot-checks the derivatives against central
    /// differences at ten points.
    pub fn new(kind: CallableKind) -> Result<Self> {
        match kind {
            CallableKind::Essential { p } if p < 2 => {
                return Err(Error::InvalidParameter(format!(
                    "essential family needs p ≥ 2, got {p}"
                )))
            }
            _ => {}
        }
        let d = CallableData {
            kind,
            punctures: vec![ExtComplex::ZERO, ExtComplex::Infinity],
            involution_antipodal: true,
        };
        d.check_derivatives()?;
        Ok(d)
    }

    pub fn description(&self) -> String {
        match self.kind {
            CallableKind::Essential { p } => format!(
                "phi = z^{k} exp((z-1/z)/2), psi = -z^-{k} exp((z-1/z)/2), dh = d exp(-(z-1/z)/2)",
                k = 2 * p - 1
            ),
        }
    }

    fn check_derivatives(&self) -> Result<()> {
        let step = 1e-6;
        for j in 0..10 {
            let z = Complex64::from_polar(0.5 + 0.15 * j as f64, 0.7 * j as f64 + 0.3);
            let g = self.gauss(z);
            let (p0, q0) = g.values();
            let (pp, qp) = self.gauss(z + step).values();
            let (pm, qm) = self.gauss(z - step).values();
            let fd_phi = (pp - pm) / (2.0 * step);
            let fd_psi = (qp - qm) / (2.0 * step);
            let an_phi = g.dphi * g.log_phi.exp();
            let an_psi = g.dpsi * g.log_psi.exp();
            let scale = 1.0 + p0.norm().max(q0.norm());
            let err = (fd_phi - an_phi).norm().max((fd_psi - an_psi).norm())
                / (an_phi.norm().max(an_psi.norm()) + scale);
            if err > 1e-5 {
                return Err(Error::Verification(format!(
                    "callable derivative disagrees with finite differences at {z} (relative {err:e})"
                )));
            }
        }
        Ok(())
    }
}

impl Surface for CallableData {
    fn gauss(&self, z: Complex64) -> GaussSample {
        match self.kind {
            CallableKind::Essential { p } => {
                let k = (2 * p - 1) as i32;
                let l = 0.5 * (z - z.inv());
                let dl = 0.5 * (1.0 + z.powi(-2));
                let zk = z.powi(k);
                let zmk = z.powi(-k);
                GaussSample {
                    phi: zk,
                    dphi: k as f64 * z.powi(k - 1) + zk * dl,
                    log_phi: l,
                    psi: -zmk,
                    dpsi: k as f64 * z.powi(-k - 1) - zmk * dl,
                    log_psi: l,
                }
            }
        }
    }

    fn h(&self, z: Complex64) -> Complex64 {
        match self.kind {
            CallableKind::Essential { .. } => {
                let l = 0.5 * (z - z.inv());
                let dl = 0.5 * (1.0 + z.powi(-2));
                -dl * (-l).exp()
            }
        }
    }

    fn punctures(&self) -> &[ExtComplex] {
        &self.punctures
    }

    fn involution_antipodal(&self) -> bool {
        self.involution_antipodal
    }

    fn mismatch(&self, z: Complex64) -> f64 {
        // chordal distance with the common exponential factor folded in;
        // falls back to a scale-free comparison when the values overflow
        let g = self.gauss(z);
        let (a, b) = g.values();
        let b = b.conj();
        if a.is_finite() && b.is_finite() {
            return ExtComplex::Finite(a).chordal_distance(&ExtComplex::Finite(b));
        }
        let x = (g.log_psi.conj() - g.log_phi).exp();
        let d = g.phi - g.psi.conj() * x;
        d.norm() / (g.phi.norm() + (g.psi * x).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn essential_derivatives_pass_spot_check() {
        assert!(CallableData::new(CallableKind::Essential { p: 2 }).is_ok());
        assert!(CallableData::new(CallableKind::Essential { p: 1 }).is_err());
    }

    #[test]
    fn density_is_finite_at_one() {
        let d = CallableData::new(CallableKind::Essential { p: 2 }).unwrap();
        let v = d.gauss(Complex64::new(1.0, 0.0)).curvature_density();
        assert!(v.is_finite());
    }
}
