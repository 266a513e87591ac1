use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::data::WeierstrassData;
use crate::cxratio::{ExtComplex, RationalMap};
use crate::error::Result;

/// Default absolute tolerance on period residuals.
pub const PERIOD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndPeriods {
    pub point: ExtComplex,
    pub res_h: Complex64,
    pub res_phi_h: Complex64,
    pub res_psi_h: Complex64,
    pub res_phipsi_h: Complex64,
    /// `|2πi Res(φh) + conj(2πi Res(ψh))|`
    pub horizontal: f64,
    /// `Re(2πi Res h)`
    pub re_period_h: f64,
    /// `Re(2πi Res φψh)`
    pub re_period_phipsi_h: f64,
    pub horizontal_ok: bool,
    pub vertical_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodReport {
    pub ends: Vec<EndPeriods>,
    pub tol: f64,
    pub pass: bool,
}

impl PeriodReport {
    pub fn failing(&self) -> impl Iterator<Item = &EndPeriods> {
        self.ends.iter().filter(|e| !(e.horizontal_ok && e.vertical_ok))
    }
}

pub fn check_periods(data: &WeierstrassData) -> Result<PeriodReport> {
    check_periods_with(data, PERIOD_TOL)
}

pub fn check_periods_with(data: &WeierstrassData, tol: f64) -> Result<PeriodReport> {
    let phi_h = data.phi.mul(&data.h)?;
    let psi_h = data.psi.mul(&data.h)?;
    let phipsi_h = phi_h.mul(&data.psi)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut ends = Vec::new();
    for &p in &data.punctures {
        let res_h = data.h.residue(p);
        let res_phi_h = phi_h.residue(p);
        let res_psi_h = psi_h.residue(p);
        let res_phipsi_h = phipsi_h.residue(p);
        let horizontal = (two_pi_i * res_phi_h + (two_pi_i * res_psi_h).conj()).norm();
        let re_period_h = (two_pi_i * res_h).re;
        let re_period_phipsi_h = (two_pi_i * res_phipsi_h).re;
        ends.push(EndPeriods {
            point: p,
            res_h,
            res_phi_h,
            res_psi_h,
            res_phipsi_h,
            horizontal,
            re_period_h,
            re_period_phipsi_h,
            horizontal_ok: horizontal <= tol,
            vertical_ok: re_period_h.abs() <= tol && re_period_phipsi_h.abs() <= tol,
        });
    }
    let pass = ends.iter().all(|e| e.horizontal_ok && e.vertical_ok);
    Ok(PeriodReport { ends, tol, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderMismatch {
    pub point: ExtComplex,
    /// Zero order of `dh` required by the poles of φ, ψ.
    pub expected: i64,
    /// Actual order of `dh` (negative for a pole).
    pub found: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    /// Common poles of φ and ψ off the puncture set.
    pub coincident_poles: Vec<ExtComplex>,
    /// Points off the puncture set where the zeros of dh do not match the
    /// poles of φ or ψ.
    pub dh_mismatches: Vec<OrderMismatch>,
    /// Poles of `x_z dz` off the puncture set.
    pub stray_poles: Vec<ExtComplex>,
    pub pass: bool,
    pub note: &'static str,
}

/// Order of `f` (as a function) at `p`.
fn fn_order(f: &RationalMap, p: ExtComplex) -> i64 {
    f.order_at(p).unwrap_or(i64::MAX)
}

/// Order of the form `f dz` at `p`.
fn form_order(f: &RationalMap, p: ExtComplex) -> i64 {
    f.local_form(p).order_at_origin().unwrap_or(i64::MAX)
}

/// Conditions on poles of φ, ψ and zeros of dh away from the ends. The
/// global `φ ≠ conj ψ` condition is left to the singular-point scan.
pub fn check_regularity(data: &WeierstrassData) -> Result<RegularityReport> {
    let mut points: Vec<ExtComplex> = vec![ExtComplex::Infinity];
    for f in [&data.phi, &data.psi, &data.h] {
        for dv in f.zeros_poles()? {
            points.push(dv.point);
        }
    }
    let mut uniq: Vec<ExtComplex> = Vec::new();
    for p in points {
        if !uniq.iter().any(|q| q.approx_eq(&p, 1e-7)) && !data.is_puncture(&p) {
            uniq.push(p);
        }
    }
    let comps = data.xz_components()?;
    let mut coincident_poles = Vec::new();
    let mut dh_mismatches = Vec::new();
    let mut stray_poles = Vec::new();
    for p in uniq {
        let op = fn_order(&data.phi, p);
        let oq = fn_order(&data.psi, p);
        if op < 0 && oq < 0 {
            coincident_poles.push(p);
        }
        let expected = (-op).max(-oq).max(0);
        let found = form_order(&data.h, p);
        if found != expected {
            dh_mismatches.push(OrderMismatch { point: p, expected, found });
        }
        if comps.iter().any(|c| c.form_pole_order(p) > 0) {
            stray_poles.push(p);
        }
    }
    let pass = coincident_poles.is_empty() && dh_mismatches.is_empty() && stray_poles.is_empty();
    Ok(RegularityReport {
        coincident_poles,
        dh_mismatches,
        stray_poles,
        pass,
        note: "φ ≠ conj ψ away from the ends is checked by the singular-point scan",
    })
}
