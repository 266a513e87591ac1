use serde::Serialize;

use super::data::WeierstrassData;
use crate::cxratio::{ExtComplex, RationalMap};
use crate::error::{Error, Result};

/// Values of φ and conj ψ closer than this (on the sphere) are a common value.
pub const COMMON_VALUE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    Regular,
    GoodSingular,
    BadSingular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndReport {
    pub point: ExtComplex,
    pub kind: EndKind,
    pub m: u32,
    pub n: u32,
    pub ind: i64,
    pub ind_plus: i64,
    pub ind10: i64,
    pub ind01: i64,
    pub d: i64,
    pub d_tilde: i64,
    pub complete: bool,
}

/// Multiplicities `(m, n)` of `φ` and `ψ` at a point where
/// `φ(p) = conj ψ(p)`, or `None` when the point is regular.
pub fn common_value_multiplicities(
    phi: &RationalMap,
    psi: &RationalMap,
    p: ExtComplex,
) -> Result<Option<(u32, u32)>> {
    let a = phi.eval(p);
    let b = psi.eval(p).conj();
    if !a.approx_eq(&b, COMMON_VALUE_TOL) {
        return Ok(None);
    }
    let f = phi.local_function(p);
    let g = psi.local_function(p);
    // move the common value to 0; at ∞ invert both maps
    let (f, g) = match a {
        ExtComplex::Infinity => (f.recip()?, g.recip()?),
        ExtComplex::Finite(t) if t.norm() > 1.0 && !b.is_infinite() => {
            // large finite common values are better conditioned inverted
            let fi = f.recip()?;
            let gi = g.recip()?;
            (fi.add_constant(-t.inv()), gi.add_constant(-t.inv().conj()))
        }
        ExtComplex::Finite(t) => (f.add_constant(-t), g.add_constant(-t.conj())),
    };
    let order = |r: &RationalMap| -> Result<u32> {
        match r.order_at_origin() {
            Some(o) if o > 0 => Ok(o as u32),
            _ => Err(Error::Verification(format!(
                "common value at {p} has no positive multiplicity"
            ))),
        }
    };
    Ok(Some((order(&f)?, order(&g)?)))
}

/// Index data `(kind, ind, ind⁺, ind^{1,0}, ind^{0,1})` from multiplicities.
pub fn index_from_multiplicities(mn: Option<(u32, u32)>) -> (EndKind, i64, i64, i64, i64) {
    match mn {
        None => (EndKind::Regular, 0, 0, 0, 0),
        Some((m, n)) if m == n => (EndKind::BadSingular, 0, 0, 0, 0),
        Some((m, n)) => {
            let ind = if m < n { m as i64 } else { -(n as i64) };
            let plus = ind.abs();
            (
                EndKind::GoodSingular,
                ind,
                plus,
                (plus + ind) / 2,
                (plus - ind) / 2,
            )
        }
    }
}

pub fn classify_end(data: &WeierstrassData, p: ExtComplex) -> Result<EndReport> {
    if !data.is_puncture(&p) {
        return Err(Error::NotAPuncture(p));
    }
    let mn = common_value_multiplicities(&data.phi, &data.psi, p)?;
    let (kind, ind, ind_plus, ind10, ind01) = index_from_multiplicities(mn);
    let (m, n) = mn.unwrap_or((0, 0));
    let (d, d_tilde, complete) = multiplicity_from(data, p, ind_plus)?;
    Ok(EndReport {
        point: p,
        kind,
        m,
        n,
        ind,
        ind_plus,
        ind10,
        ind01,
        d,
        d_tilde,
        complete,
    })
}

/// `(d, d̃, complete)` where `d + 1` is the pole order of `x_z dz` at `p`.
pub fn end_multiplicity(data: &WeierstrassData, p: ExtComplex) -> Result<(i64, i64, bool)> {
    let r = classify_end(data, p)?;
    Ok((r.d, r.d_tilde, r.complete))
}

fn multiplicity_from(data: &WeierstrassData, p: ExtComplex, ind_plus: i64) -> Result<(i64, i64, bool)> {
    let comps = data.xz_components()?;
    let pole = comps
        .iter()
        .map(|c| c.form_pole_order(p))
        .max()
        .unwrap_or(0) as i64;
    let d = pole - 1;
    let d_tilde = d - ind_plus;
    Ok((d, d_tilde, d_tilde >= 1))
}

/// Reports for every puncture, in puncture order.
pub fn classify_all(data: &WeierstrassData) -> Result<Vec<EndReport>> {
    data.punctures.iter().map(|&p| classify_end(data, p)).collect()
}
