//! Antipodal symmetry of Weierstrass data and the resulting quotient.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cxratio::ExtComplex;
use crate::error::{Error, Result};
use crate::weierstrass::{WeierstrassData, POINT_TOL};

/// Residual below which the sampled symmetry counts as exact.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Tolerance on residue vectors at ends.
pub const FLUX_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvolutionReport {
    pub phi_symmetry_residual: f64,
    pub psi_symmetry_residual: f64,
    pub dh_symmetry_residual: f64,
    pub fixed_point_free: bool,
    pub puncture_pairing: Vec<(usize, usize)>,
    pub symmetric: bool,
}

/// Sample points: 25 on `|z| = 1/2` and their images on `|z| = 2`.
fn sample_points(data: &WeierstrassData) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(50);
    for j in 0..25 {
        let mut theta = 2.0 * PI * (j as f64 + 0.37) / 25.0;
        let near = |z: Complex64| {
            data.punctures.iter().any(|p| match p.finite() {
                Some(q) => (q - z).norm() < 1e-3,
                None => false,
            })
        };
        while near(Complex64::from_polar(0.5, theta)) || near(Complex64::from_polar(2.0, theta + PI)) {
            theta += 1e-2;
        }
        let z = Complex64::from_polar(0.5, theta);
        out.push(z);
        out.push(-z.conj().inv());
    }
    out
}

pub fn antipode(z: Complex64) -> Complex64 {
    -z.conj().inv()
}

pub fn check_involution(data: &WeierstrassData) -> Result<InvolutionReport> {
    let n = data.punctures.len();
    let mut pairing = Vec::new();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let image = data.punctures[i].antipode();
        let j = data
            .punctures
            .iter()
            .position(|q| q.approx_eq(&image, POINT_TOL))
            .ok_or_else(|| {
                Error::Involution(format!(
                    "puncture set is not closed under z ↦ -1/z̄: image {image} of {} missing",
                    data.punctures[i]
                ))
            })?;
        seen[i] = true;
        seen[j] = true;
        pairing.push((i, j));
    }
    let fixed_point_free = pairing.iter().all(|&(i, j)| i != j);
    let mut rp: f64 = 0.0;
    let mut rq: f64 = 0.0;
    let mut rh: f64 = 0.0;
    for z in sample_points(data) {
        let iz = ExtComplex::Finite(antipode(z));
        let zz = ExtComplex::Finite(z);
        rp = rp.max(data.phi.eval(iz).chordal_distance(&data.psi.eval(zz).conj()));
        rq = rq.max(data.psi.eval(iz).chordal_distance(&data.phi.eval(zz).conj()));
        // I*(h dz) = h(-1/z̄) d(-1/z̄) = h(-1/z̄) z̄^{-2} dz̄
        let lhs = data.h.value(antipode(z)) * z.conj().powi(-2);
        let rhs = data.h.value(z).conj();
        rh = rh.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    Ok(InvolutionReport {
        phi_symmetry_residual: rp,
        psi_symmetry_residual: rq,
        dh_symmetry_residual: rh,
        fixed_point_free,
        puncture_pairing: pairing,
        symmetric: fixed_point_free && rp.max(rq).max(rh) <= SYMMETRY_TOL,
    })
}

/// Componentwise residues of `x_z dz` at `p`.
pub fn residue_vector(data: &WeierstrassData, p: ExtComplex) -> Result<[Complex64; 4]> {
    let comps = data.xz_components()?;
    Ok([
        comps[0].residue(p),
        comps[1].residue(p),
        comps[2].residue(p),
        comps[3].residue(p),
    ])
}

fn vec_norm(v: &[Complex64; 4]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndFlux {
    pub point: ExtComplex,
    pub residue: [Complex64; 4],
    /// Real period `2 Re(2πi·residue)`.
    pub flux: [f64; 4],
    /// `max |Re(2πi·residue)|`: zero when the period conditions force the
    /// residue to be real.
    pub reality_defect: f64,
    /// `max |v_p - conj(v_{I(p)})|`: zero under the antipodal symmetry.
    pub symmetry_defect: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxReport {
    pub ends: Vec<EndFlux>,
    pub pass: bool,
}

pub fn flux_vanishing_check(data: &WeierstrassData) -> Result<FluxReport> {
    let inv = check_involution(data)?;
    if !inv.symmetric {
        return Err(Error::Involution(format!(
            "data is not antipodally symmetric (residuals {:e}, {:e}, {:e})",
            inv.phi_symmetry_residual, inv.psi_symmetry_residual, inv.dh_symmetry_residual
        )));
    }
    let residues: Vec<[Complex64; 4]> = data
        .punctures
        .iter()
        .map(|&p| residue_vector(data, p))
        .collect::<Result<_>>()?;
    let partner = |i: usize| {
        inv.puncture_pairing
            .iter()
            .find_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .unwrap_or(i)
    };
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut ends = Vec::new();
    for (i, &p) in data.punctures.iter().enumerate() {
        let v = residues[i];
        let w = residues[partner(i)];
        let period = v.map(|c| two_pi_i * c);
        let flux = period.map(|c| 2.0 * c.re);
        let reality_defect = period.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        let symmetry_defect = (0..4).map(|k| (v[k] - w[k].conj()).norm()).fold(0.0, f64::max);
        let pass = vec_norm(&v) <= FLUX_TOL;
        ends.push(EndFlux {
            point: p,
            residue: v,
            flux,
            reality_defect,
            symmetry_defect,
            pass,
        });
    }
    let pass = ends.iter().all(|e| e.pass);
    Ok(FluxReport { ends, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientReport {
    pub cover_genus: u32,
    pub cover_punctures: usize,
    pub quotient_ends: usize,
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub description: String,
}

pub fn quotient_report(data: &WeierstrassData) -> Result<QuotientReport> {
    let inv = check_involution(data)?;
    if !inv.symmetric {
        return Err(Error::Involution("antipodal symmetry not verified".into()));
    }
    let r = data.punctures.len();
    if r % 2 == 1 {
        return Err(Error::Involution(format!("odd number of punctures ({r})")));
    }
    let k = r / 2;
    let description = match k {
        1 => "projective plane minus 1 point (Möbius strip)".to_string(),
        _ => format!("projective plane minus {k} points"),
    };
    Ok(QuotientReport {
        cover_genus: 0,
        cover_punctures: r,
        quotient_ends: k,
        euler_characteristic: 1 - k as i64,
        orientable: false,
        description,
    })
}
