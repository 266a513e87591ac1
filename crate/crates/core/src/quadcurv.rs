//! Quadrature of the curvature density over the punctured sphere.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cxratio::ExtComplex;
use crate::error::{Error, Result};
use crate::nonorientable::check_involution;
use crate::weierstrass::{classify_all, EndKind, Surface};

/// Gauss–Legendre order of each radial panel.
const PANEL_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Radius of the disk left out around `0` in each chart.
    pub inner_radius: f64,
    /// Chart boundary; the charts `z` and `1/z` meet at `|z| = 1`.
    pub outer_radius: f64,
    /// Radial nodes per chart at level 0.
    pub radial_nodes: usize,
    /// Angular nodes at level 0.
    pub angular_nodes: usize,
    pub refinement_levels: usize,
    pub target_rel_error: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            inner_radius: 1e-3,
            outer_radius: 1.0,
            radial_nodes: 64,
            angular_nodes: 64,
            refinement_levels: 4,
            target_rel_error: 1e-3,
        }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < inner_radius < outer_radius, got {} and {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if self.outer_radius != 1.0 {
            return Err(Error::InvalidParameter(
                "the two charts meet at |z| = 1; outer_radius must be 1".into(),
            ));
        }
        if self.radial_nodes < 16 || self.angular_nodes < 16 {
            return Err(Error::InvalidParameter("at least 16 radial and angular nodes are needed".into()));
        }
        Ok(())
    }
}

/// `4φ'·conj(ψ')/(φ - conj ψ)²` per unit area `du dv`: the real part is the
/// density of `-K dM`, the imaginary part that of `K⊥ dM`.
pub fn curvature_density<S: Surface + ?Sized>(s: &S, z: Complex64) -> Result<Complex64> {
    let d = s.gauss(z).curvature_density();
    if !d.is_finite() {
        return Err(Error::SingularPoint(z));
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    Inner,
    Outer,
}

/// `∫∫ D du dv` and `∫∫ |D| du dv` over `lo ≤ |ζ| ≤ hi` in one chart,
/// on a log-polar grid.
fn annulus<S: Surface + ?Sized>(
    s: &S,
    chart: Chart,
    lo: f64,
    hi: f64,
    panels: usize,
    n_theta: usize,
    rule: &GaussLegendre,
) -> Result<(Complex64, f64)> {
    let (a, b) = (lo.ln(), hi.ln());
    let width = (b - a) / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let p0 = a + width * p as f64;
            rule.as_node_weight_pairs()
                .iter()
                .map(move |&(x, w)| (p0 + 0.5 * width * (x + 1.0), 0.5 * width * w))
        })
        .collect();
    let dtheta = TAU / n_theta as f64;
    let rows: Vec<Result<(Complex64, f64)>> = nodes
        .par_iter()
        .map(|&(sv, ws)| {
            let r = sv.exp();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut acc_abs = 0.0;
            for j in 0..n_theta {
                let zeta = Complex64::from_polar(r, dtheta * (j as f64 + 0.5));
                let (z, jac) = match chart {
                    Chart::Inner => (zeta, 1.0),
                    Chart::Outer => (zeta.inv(), r.powi(-4)),
                };
                let d = curvature_density(s, z)? * jac;
                acc += d;
                acc_abs += d.norm();
            }
            let w = ws * r * r * dtheta;
            Ok((acc * w, acc_abs * w))
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_abs = 0.0;
    for row in rows {
        let (v, va) = row?;
        total += v;
        total_abs += va;
    }
    Ok((total, total_abs))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// `-∫K dM` on the cover.
    pub total_k: f64,
    /// `∫K⊥ dM` on the cover.
    pub total_kperp: f64,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureIntegral {
    /// `-∫K dM` over the cover.
    pub total_k: f64,
    /// `∫K⊥ dM` over the cover.
    pub total_kperp: f64,
    /// `∫|D| du dv`, which stays finite exactly when the density is
    /// absolutely integrable.
    pub abs_total: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub inner_chart: Complex64,
    pub outer_chart: Complex64,
    /// Contribution of `r_in/2 ≤ |ζ| ≤ r_in` to `∫|D|`, both charts.
    pub tail_abs: f64,
    /// Ratio of the `∫|D|` rings `[r_in/2, r_in]` and `[r_in, 2r_in]`.
    pub tail_ratio: f64,
    pub involution_symmetric: bool,
    /// `|inner - outer| / |inner + outer|`, expected to vanish for
    /// symmetric data since the involution swaps the charts.
    pub chart_symmetry_defect: f64,
    pub levels: Vec<LevelRow>,
}

impl CurvatureIntegral {
    /// `-∫K dM` on the quotient, when the data is involution-symmetric.
    pub fn quotient_k(&self) -> Option<f64> {
        self.involution_symmetric.then_some(self.total_k / 2.0)
    }

    /// The involution swaps the charts, so their contributions must agree.
    pub fn charts_consistent(&self) -> bool {
        !self.involution_symmetric || self.chart_symmetry_defect <= 5e-3
    }

    pub fn quotient_kperp(&self) -> Option<f64> {
        self.involution_symmetric.then_some(self.total_kperp / 2.0)
    }

    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("level,radial_nodes,angular_nodes,total_k,total_kperp,estimate\n");
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{},{},{},{:.12e},{:.12e},{:.3e}",
                l.level, l.radial_nodes, l.angular_nodes, l.total_k, l.total_kperp, l.estimate
            );
        }
        out
    }
}

fn check_supported<S: Surface + ?Sized>(s: &S) -> Result<bool> {
    match s.rational() {
        Some(d) => {
            for e in classify_all(d)? {
                let far = !matches!(e.point, ExtComplex::Infinity) && e.point.finite().is_some_and(|p| p.norm() > 1e-12);
                if far && e.kind != EndKind::Regular {
                    return Err(Error::Hypothesis(format!(
                        "singular end at {} lies away from 0 and ∞; move it there with a Möbius change of coordinate",
                        e.point
                    )));
                }
            }
            Ok(d.involution_antipodal && check_involution(d)?.symmetric)
        }
        None => Ok(s.involution_antipodal()),
    }
}

fn levels_integral<S: Surface + ?Sized>(
    s: &S,
    lo: f64,
    config: &QuadratureConfig,
    level: usize,
    rule: &GaussLegendre,
) -> Result<(Complex64, Complex64, f64)> {
    let panels = (config.radial_nodes / PANEL_ORDER).max(2) << level;
    let n_theta = config.angular_nodes << level;
    let (inner, ia) = annulus(s, Chart::Inner, lo, config.outer_radius, panels, n_theta, rule)?;
    let (outer, oa) = annulus(s, Chart::Outer, lo, config.outer_radius, panels, n_theta, rule)?;
    Ok((inner, outer, ia + oa))
}

/// `∫∫ 4φ'conj(ψ')/(φ - conj ψ)² du dv` over the sphere minus two disks of
/// radius `inner_radius` around `0` and `∞`, refined until successive
/// levels agree.
pub fn integrate_curvature<S: Surface + ?Sized>(s: &S, config: &QuadratureConfig) -> Result<CurvatureIntegral> {
    config.validate()?;
    let involution_symmetric = check_supported(s)?;
    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).expect("nonzero order"));
    let r_in = config.inner_radius;
    let tail_panels = 4;
    let tail_theta = config.angular_nodes << config.refinement_levels.min(3);
    let ring = |lo: f64, hi: f64| -> Result<f64> {
        Ok(annulus(s, Chart::Inner, lo, hi, tail_panels, tail_theta, &rule)?.1
            + annulus(s, Chart::Outer, lo, hi, tail_panels, tail_theta, &rule)?.1)
    };
    let tail_abs = ring(r_in / 2.0, r_in)?;
    let tail_ratio = tail_abs / ring(r_in, (2.0 * r_in).min(config.outer_radius))?.max(1e-300);
    // mass of |D| inside r_in, assuming the rings keep shrinking geometrically
    let omitted = if tail_ratio < 0.95 {
        tail_abs / (1.0 - tail_ratio)
    } else {
        f64::INFINITY
    };
    let mut levels = Vec::new();
    let mut prev: Option<Complex64> = None;
    let mut last = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
    let mut error_estimate = f64::INFINITY;
    let mut converged = false;
    for level in 0..=config.refinement_levels {
        let (inner, outer, abs_total) = levels_integral(s, r_in, config, level, &rule)?;
        let total = inner + outer;
        let diff = prev.map_or(f64::INFINITY, |p| (total - p).norm());
        error_estimate = diff + omitted;
        levels.push(LevelRow {
            level,
            radial_nodes: ((config.radial_nodes / PANEL_ORDER).max(2) * PANEL_ORDER) << level,
            angular_nodes: config.angular_nodes << level,
            total_k: total.re,
            total_kperp: total.im,
            estimate: error_estimate,
        });
        last = (inner, outer, abs_total);
        prev = Some(total);
        let scale = total.norm().max(1.0);
        if error_estimate <= config.target_rel_error * scale {
            converged = true;
            break;
        }
    }
    let (inner, outer, abs_total) = last;
    let total = inner + outer;
    let chart_symmetry_defect = (inner - outer).norm() / total.norm().max(1e-300);
    Ok(CurvatureIntegral {
        total_k: total.re,
        total_kperp: total.im,
        abs_total,
        error_estimate,
        converged,
        inner_chart: inner,
        outer_chart: outer,
        tail_abs,
        tail_ratio,
        involution_symmetric,
        chart_symmetry_defect,
        levels,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalvingReport {
    /// `r_in, r_in/2, r_in/4, …`
    pub radii: Vec<f64>,
    /// `∫|D|` over the sphere minus the disks of each radius.
    pub abs_totals: Vec<f64>,
    /// Signed `-∫K` for each radius.
    pub totals: Vec<f64>,
    /// Error estimate of the integral at `r_in`.
    pub error_estimate: f64,
    /// `|total(r_in/2) - total(r_in)|`
    pub first_change: f64,
    /// Ratio of the last two increments of `∫|D|`; about `1/2` for a good
    /// singular end, `1/4` at regular points, `1` when the integral diverges
    /// logarithmically.
    pub increment_ratio: f64,
    pub stable: bool,
    pub diverging: bool,
}

/// Repeatedly halves the inner radius and watches the absolute integral.
pub fn halving_test<S: Surface + ?Sized>(s: &S, config: &QuadratureConfig, halvings: usize) -> Result<HalvingReport> {
    if halvings < 2 {
        return Err(Error::InvalidParameter("halving test needs at least two halvings".into()));
    }
    let base = integrate_curvature(s, config)?;
    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).expect("nonzero order"));
    let n_theta = config.angular_nodes << config.refinement_levels.min(3);
    let mut radii = vec![config.inner_radius];
    let mut abs_totals = vec![base.abs_total];
    let mut totals = vec![base.total_k];
    let mut increments = Vec::new();
    for _ in 0..halvings {
        let r = *radii.last().expect("nonempty");
        let (i, ia) = annulus(s, Chart::Inner, r / 2.0, r, 4, n_theta, &rule)?;
        let (o, oa) = annulus(s, Chart::Outer, r / 2.0, r, 4, n_theta, &rule)?;
        increments.push(ia + oa);
        radii.push(r / 2.0);
        abs_totals.push(abs_totals.last().expect("nonempty") + ia + oa);
        totals.push(totals.last().expect("nonempty") + (i + o).re);
    }
    let n = increments.len();
    let increment_ratio = increments[n - 1] / increments[n - 2].max(1e-300);
    let first_change = (totals[1] - totals[0]).abs();
    let stable = first_change <= base.error_estimate && increment_ratio < 0.75;
    let monotone = abs_totals.windows(2).all(|w| w[1] > w[0]);
    let diverging = monotone && increment_ratio >= 0.75;
    Ok(HalvingReport {
        radii,
        abs_totals,
        totals,
        error_estimate: base.error_estimate,
        first_change,
        increment_ratio,
        stable,
        diverging,
    })
}

/// Value in units of `π`.
pub fn in_pi(x: f64) -> f64 {
    x / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxratio::{Poly, RationalMap};
    use crate::weierstrass::{essential, meeks, WeierstrassData};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn toy_density_at_one() {
        let phi = RationalMap::identity();
        let psi = RationalMap::new(Poly::constant(c(-1.0, 0.0)), Poly::monomial(c(1.0, 0.0), 1)).unwrap();
        let d = WeierstrassData::new(phi, psi, RationalMap::constant(c(1.0, 0.0)), vec![], false).unwrap();
        assert!((curvature_density(&d, c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn area_element_on_unit_sphere_data() {
        // φ = z, ψ = -1/z gives 4/(1+|z|²)², whose integral over the plane is 4π
        let phi = RationalMap::identity();
        let psi = RationalMap::new(Poly::constant(c(-1.0, 0.0)), Poly::monomial(c(1.0, 0.0), 1)).unwrap();
        let d = WeierstrassData::new(phi, psi, RationalMap::constant(c(1.0, 0.0)), vec![], false).unwrap();
        let z = c(0.3, -0.4);
        let want = 4.0 / (1.0 + z.norm_sqr()).powi(2);
        assert!((curvature_density(&d, z).unwrap() - want).norm() < 1e-14);
        let cfg = QuadratureConfig {
            inner_radius: 1e-6,
            ..Default::default()
        };
        let r = integrate_curvature(&d, &cfg).unwrap();
        assert!((r.total_k - 4.0 * PI).abs() < 1e-6, "{}", r.total_k);
        assert!(r.total_kperp.abs() < 1e-9);
    }

    #[test]
    fn meeks_quadrature_matches_index_formula() {
        let d = meeks(c(0.0, 1.0), 1).unwrap();
        let r = integrate_curvature(&d, &QuadratureConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.quotient_k().unwrap() - 6.0 * PI).abs() < 0.01 * 6.0 * PI, "{r:?}");
        assert!(r.chart_symmetry_defect < 5e-3);
    }

    #[test]
    fn essential_density_is_finite() {
        let e = essential(2).unwrap();
        assert!(curvature_density(&e, c(1.0, 0.0)).unwrap().is_finite());
    }

    #[test]
    fn rejects_bad_config() {
        let d = meeks(c(0.0, 1.0), 1).unwrap();
        let cfg = QuadratureConfig {
            inner_radius: 2.0,
            ..Default::default()
        };
        assert!(matches!(integrate_curvature(&d, &cfg), Err(Error::InvalidParameter(_))));
    }
}
