use serde::Serialize;

use super::data::WeierstrassData;
use super::ends::{classify_all, EndKind, EndReport};
use crate::error::{Error, Result};
use crate::nonorientable::check_involution;

/// Total curvature `-∫K dM` from the index formulas, in units of π.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    /// `4(deg φ - Σ ind^{1,0})`
    pub by_deg_phi: i64,
    /// `4(deg ψ - Σ ind^{0,1})`
    pub by_deg_psi: i64,
    /// `2(2g - 2 + r + Σ d̃)`
    pub by_jorge_meeks: i64,
    /// Half the cover value, present only when the antipodal symmetry has
    /// been verified.
    pub quotient_value: Option<f64>,
    pub agreement: bool,
    pub ends: Vec<EndReport>,
}

impl CurvatureReport {
    pub fn cover_value(&self) -> i64 {
        self.by_deg_phi
    }
}

pub fn total_curvature(data: &WeierstrassData) -> Result<CurvatureReport> {
    let ends = classify_all(data)?;
    if let Some(bad) = ends.iter().find(|e| e.kind == EndKind::BadSingular) {
        return Err(Error::BadSingularEnd(bad.point));
    }
    if let Some(e) = ends.iter().find(|e| !e.complete) {
        return Err(Error::IncompleteEnd(e.point));
    }
    let sum10: i64 = ends.iter().map(|e| e.ind10).sum();
    let sum01: i64 = ends.iter().map(|e| e.ind01).sum();
    let sum_dt: i64 = ends.iter().map(|e| e.d_tilde).sum();
    let r = ends.len() as i64;
    let g = data.genus() as i64;
    let by_deg_phi = 4 * (data.phi.degree() as i64 - sum10);
    let by_deg_psi = 4 * (data.psi.degree() as i64 - sum01);
    let by_jorge_meeks = 2 * (2 * g - 2 + r + sum_dt);
    let agreement = by_deg_phi == by_deg_psi && by_deg_psi == by_jorge_meeks;
    let quotient_value = if data.involution_antipodal && check_involution(data)?.symmetric {
        Some(by_deg_phi as f64 / 2.0)
    } else {
        None
    };
    Ok(CurvatureReport {
        by_deg_phi,
        by_deg_psi,
        by_jorge_meeks,
        quotient_value,
        agreement,
        ends,
    })
}
