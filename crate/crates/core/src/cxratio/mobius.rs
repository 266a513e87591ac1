use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ext::ExtComplex;
use super::poly::Poly;
use super::rational::RationalMap;
use crate::error::{Error, Result};

/// `z ↦ (az + b)/(cz + d)` normalized to `ad - bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MobiusTransform {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if scale == 0.0 || det.norm() <= 1e-14 * scale * scale {
            return Err(Error::DegenerateMobius);
        }
        let s = det.sqrt().inv();
        Ok(MobiusTransform {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        MobiusTransform {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }
}

/// Lorentz normalization of Weierstrass data:
/// `φ ↦ (aφ+b)/(cφ+d)`, `ψ ↦ (āψ+b̄)/(c̄ψ+d̄)`, `dh ↦ (cφ+d)(c̄ψ+d̄)dh`.
pub fn mobius_apply_data(
    m: &MobiusTransform,
    phi: &RationalMap,
    psi: &RationalMap,
    h: &RationalMap,
) -> Result<(RationalMap, RationalMap, RationalMap)> {
    let [a, b, c, d] = m.coefficients();
    let lin = |f: &RationalMap, p: Complex64, q: Complex64| -> Poly {
        &f.num().scale(p) + &f.den().scale(q)
    };
    let phi_num = lin(phi, a, b);
    let phi_den = lin(phi, c, d);
    let psi_num = lin(psi, a.conj(), b.conj());
    let psi_den = lin(psi, c.conj(), d.conj());
    let new_phi = RationalMap::new(phi_num, phi_den.clone())?;
    let new_psi = RationalMap::new(psi_num, psi_den.clone())?;
    let factor = RationalMap::new(&phi_den * &psi_den, phi.den() * psi.den())?;
    let new_h = factor.mul(h)?;
    Ok((new_phi, new_psi, new_h))
}
