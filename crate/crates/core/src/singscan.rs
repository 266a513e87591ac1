//! Global search for singular points `φ(z) = conj ψ(z)` away from the ends.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cxratio::{roots, ExtComplex, Poly};
use crate::error::{Error, Result};
use crate::weierstrass::{common_value_multiplicities, section4_candidate, Surface};

/// Points closer than this (chordally) are the same singular point.
pub const DEDUP_TOL: f64 = 1e-7;
/// Chart-coordinate radius around punctures that is left to end analysis.
pub const PUNCTURE_EXCLUSION: f64 = 1e-4;
/// Newton is declared converged below this mismatch.
pub const ACCEPT_TOL: f64 = 1e-8;
/// Unconverged seeds with mismatch below this are reported, not dropped.
pub const SUSPICIOUS_TOL: f64 = 1e-4;
/// Grid minima above this chordal mismatch are not refined; the maximum
/// possible value 1 is attained when `conj ψ` is the antipode of `φ`.
pub const SEED_MAX: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { n_r: 512, n_theta: 512 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    Good,
    Bad,
    /// Multiplicities could not be computed (non-rational data).
    Unclassified,
}

impl SingularKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SingularKind::Good => "good",
            SingularKind::Bad => "bad",
            SingularKind::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub z: ExtComplex,
    /// Common value `φ(z) = conj ψ(z)`.
    pub value_t: ExtComplex,
    pub m: u32,
    pub n: u32,
    pub kind: SingularKind,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuspiciousMinimum {
    pub z: ExtComplex,
    pub mismatch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub grid: ScanGrid,
    pub seeds: usize,
    pub points: Vec<SingularPoint>,
    pub suspicious: Vec<SuspiciousMinimum>,
    /// Smallest grid mismatch outside the exclusion disks.
    pub min_grid_mismatch: f64,
}

impl ScanReport {
    pub fn regular(&self) -> bool {
        self.points.is_empty() && self.suspicious.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("z_re,z_im,residual,m,n,kind\n");
        for p in &self.points {
            let (re, im) = match p.z {
                ExtComplex::Finite(z) => (format!("{:.15e}", z.re), format!("{:.15e}", z.im)),
                ExtComplex::Infinity => ("inf".into(), "inf".into()),
            };
            let _ = writeln!(out, "{re},{im},{:.3e},{},{},{}", p.residual, p.m, p.n, p.kind.as_str());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    /// `z = ζ`
    Inner,
    /// `z = 1/ζ`
    Outer,
}

impl Chart {
    fn to_z(self, zeta: Complex64) -> Complex64 {
        match self {
            Chart::Inner => zeta,
            Chart::Outer => zeta.inv(),
        }
    }

    fn dz(self, zeta: Complex64) -> Complex64 {
        match self {
            Chart::Inner => Complex64::new(1.0, 0.0),
            Chart::Outer => -(zeta * zeta).inv(),
        }
    }
}

fn sphere_point(z: Complex64) -> ExtComplex {
    ExtComplex::Finite(z)
}

fn near_puncture<S: Surface + ?Sized>(s: &S, chart: Chart, zeta: Complex64) -> bool {
    s.punctures().iter().any(|p| {
        let local = match (chart, p) {
            (Chart::Inner, ExtComplex::Finite(c)) => Some(zeta - c),
            (Chart::Outer, ExtComplex::Infinity) => Some(zeta),
            (Chart::Outer, ExtComplex::Finite(c)) if c.norm() > 0.5 => Some(zeta - c.inv()),
            _ => None,
        };
        local.is_some_and(|d| d.norm() < PUNCTURE_EXCLUSION)
    })
}

/// `F = A - conj B` and its Wirtinger pieces `A'`, `B'` in the chart, with
/// `A, B` either `φ, ψ` or their reciprocals when both are large.
fn residual_and_jacobian<S: Surface + ?Sized>(
    s: &S,
    chart: Chart,
    zeta: Complex64,
) -> Option<(Complex64, [[f64; 2]; 2])> {
    let z = chart.to_z(zeta);
    let g = s.gauss(z);
    let (phi, psi) = g.values();
    let dphi = g.dphi * g.log_phi.exp();
    let dpsi = g.dpsi * g.log_psi.exp();
    let dz = chart.dz(zeta);
    let (a, da, b, db) = if phi.norm() > 1.0 && psi.norm() > 1.0 {
        (phi.inv(), -dphi / (phi * phi) * dz, psi.inv(), -dpsi / (psi * psi) * dz)
    } else {
        (phi, dphi * dz, psi, dpsi * dz)
    };
    let f = a - b.conj();
    let fx = da - db.conj();
    let fy = Complex64::new(0.0, 1.0) * (da + db.conj());
    if !(f.is_finite() && fx.is_finite() && fy.is_finite()) {
        return None;
    }
    Some((f, [[fx.re, fy.re], [fx.im, fy.im]]))
}

fn newton<S: Surface + ?Sized>(s: &S, chart: Chart, seed: Complex64) -> Option<Complex64> {
    let mut zeta = seed;
    for _ in 0..60 {
        let (f, j) = residual_and_jacobian(s, chart, zeta)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = -(j[1][1] * f.re - j[0][1] * f.im) / det;
        let dy = -(-j[1][0] * f.re + j[0][0] * f.im) / det;
        let step = Complex64::new(dx, dy);
        // damping: halve until the residual does not grow
        let mut lambda = 1.0;
        let mut next = zeta + step;
        while lambda > 1e-4 {
            match residual_and_jacobian(s, chart, next) {
                Some((g, _)) if g.norm() <= f.norm() => break,
                _ => {
                    lambda *= 0.5;
                    next = zeta + step * lambda;
                }
            }
        }
        zeta = next;
        if step.norm() * lambda < 1e-15 * (1.0 + zeta.norm()) {
            break;
        }
        if zeta.norm() > 4.0 {
            return None;
        }
    }
    Some(zeta)
}

/// Local minima of the mismatch on a polar grid of one chart.
fn chart_seeds<S: Surface + ?Sized>(s: &S, chart: Chart, grid: ScanGrid) -> (Vec<(Complex64, f64)>, f64) {
    let (nr, nt) = (grid.n_r, grid.n_theta);
    let point = |i: usize, j: usize| {
        let r = (i as f64 + 0.5) / nr as f64;
        Complex64::from_polar(r, TAU * j as f64 / nt as f64)
    };
    let values: Vec<f64> = (0..nr * nt)
        .into_par_iter()
        .map(|k| {
            let zeta = point(k / nt, k % nt);
            if near_puncture(s, chart, zeta) {
                return f64::INFINITY;
            }
            let v = s.mismatch(chart.to_z(zeta));
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        })
        .collect();
    let at = |i: usize, j: usize| values[i * nt + j];
    let mut seeds = Vec::new();
    let mut min_v = f64::INFINITY;
    for i in 0..nr {
        for j in 0..nt {
            let v = at(i, j);
            if !v.is_finite() {
                continue;
            }
            min_v = min_v.min(v);
            if v > SEED_MAX {
                continue;
            }
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= nr as i64 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(nt as i64) as usize;
                    if at(ii as usize, jj) < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push((point(i, j), v));
            }
        }
    }
    (seeds, min_v)
}

/// Dense sampling of the chordal mismatch `d(φ, conj ψ)` on two polar charts
/// covering the sphere, followed by damped Newton refinement of every local
/// minimum.
pub fn scan_singular_points<S: Surface + ?Sized>(s: &S, grid: ScanGrid) -> Result<ScanReport> {
    if grid.n_r < 4 || grid.n_theta < 8 {
        return Err(Error::InvalidParameter(format!(
            "scan grid {}×{} is too coarse",
            grid.n_r, grid.n_theta
        )));
    }
    let mut found: Vec<Complex64> = Vec::new();
    let mut suspicious: Vec<SuspiciousMinimum> = Vec::new();
    let mut seeds_total = 0;
    let mut min_grid = f64::INFINITY;
    for chart in [Chart::Inner, Chart::Outer] {
        let (seeds, min_v) = chart_seeds(s, chart, grid);
        seeds_total += seeds.len();
        min_grid = min_grid.min(min_v);
        let refined: Vec<(Complex64, f64, Option<Complex64>)> = seeds
            .par_iter()
            .map(|&(zeta, v)| (zeta, v, newton(s, chart, zeta)))
            .collect();
        for (zeta, v, out) in refined {
            let accepted = out.filter(|w| {
                w.norm() <= 1.0 + 1e-9
                    && !near_puncture(s, chart, *w)
                    && s.mismatch(chart.to_z(*w)) < ACCEPT_TOL
            });
            match accepted {
                Some(w) => {
                    let z = chart.to_z(w);
                    if !found
                        .iter()
                        .any(|q| sphere_point(*q).chordal_distance(&sphere_point(z)) < DEDUP_TOL)
                    {
                        found.push(z);
                    }
                }
                None if v < SUSPICIOUS_TOL && out.is_none_or(|w| w.norm() <= 1.0) => {
                    let z = chart.to_z(zeta);
                    if !suspicious
                        .iter()
                        .any(|q| q.z.chordal_distance(&sphere_point(z)) < 1e-3)
                    {
                        suspicious.push(SuspiciousMinimum {
                            z: sphere_point(z),
                            mismatch: v,
                        });
                    }
                }
                None => {}
            }
        }
    }
    // minima that Newton later resolved are not suspicious
    suspicious.retain(|q| {
        !found
            .iter()
            .any(|z| sphere_point(*z).chordal_distance(&q.z) < 1e-3)
    });
    let mut points = Vec::with_capacity(found.len());
    for z in found {
        points.push(classify_point(s, z)?);
    }
    points.sort_by(|a, b| {
        let (za, zb) = (a.z.finite().unwrap_or_default(), b.z.finite().unwrap_or_default());
        za.norm()
            .total_cmp(&zb.norm())
            .then(za.arg().total_cmp(&zb.arg()))
    });
    Ok(ScanReport {
        grid,
        seeds: seeds_total,
        points,
        suspicious,
        min_grid_mismatch: min_grid,
    })
}

fn classify_point<S: Surface + ?Sized>(s: &S, z: Complex64) -> Result<SingularPoint> {
    let residual = s.mismatch(z);
    let (phi, _) = s.gauss(z).values();
    let value_t = if phi.is_finite() {
        ExtComplex::Finite(phi)
    } else {
        ExtComplex::Infinity
    };
    let (m, n, kind) = match s.rational() {
        Some(d) => match common_value_multiplicities(&d.phi, &d.psi, ExtComplex::Finite(z))? {
            Some((m, n)) => (m, n, if m == n { SingularKind::Bad } else { SingularKind::Good }),
            None => (0, 0, SingularKind::Unclassified),
        },
        None => (0, 0, SingularKind::Unclassified),
    };
    Ok(SingularPoint {
        z: ExtComplex::Finite(z),
        value_t,
        m,
        n,
        kind,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonObstruction {
    pub eps: f64,
    pub min_modulus: f64,
    pub argmin_r: f64,
    pub argmin_theta: f64,
    /// `min_{x ≥ 0} (x² + 1) - (ε + √(2ε+ε²))(x + 2)`.
    pub analytic_bound: f64,
    pub bound_positive: bool,
}

/// `E(r, θ; ε) = e^{2iθ}(|w|²+1) + ε e^{iθ} w - √(2ε+ε²) e^{-iθ}(w - 2cos θ)`
/// with `w = r - 1/r + e^{iθ}`.
pub fn epsilon_expression(eps: f64, r: f64, theta: f64) -> Complex64 {
    let s = (2.0 * eps + eps * eps).sqrt();
    let e1 = Complex64::from_polar(1.0, theta);
    let w = Complex64::new(r - 1.0 / r, 0.0) + e1;
    let e2 = e1 * e1;
    e2 * (w.norm_sqr() + 1.0) + eps * e1 * w - s * e1.conj() * (w - 2.0 * theta.cos())
}

/// Lower bound for `|E|` from the triangle inequality, minimized over `|w|`.
pub fn epsilon_analytic_bound(eps: f64) -> f64 {
    let a = eps + (2.0 * eps + eps * eps).sqrt();
    // (x²+1) - a(x+2) is smallest at x = a/2
    1.0 - 2.0 * a - a * a / 4.0
}

/// Largest `ε` for which [`epsilon_analytic_bound`] stays positive.
pub fn epsilon_bound_threshold() -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if epsilon_analytic_bound(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Minimum of `|E|` over a log-spaced grid `r ∈ [10⁻³, 10³]`, `θ ∈ [0, 2π)`.
pub fn epsilon_family_obstruction(eps: f64, n_r: usize, n_theta: usize) -> Result<EpsilonObstruction> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!("ε must be ≥ 0, got {eps}")));
    }
    if n_r < 2 || n_theta < 1 {
        return Err(Error::InvalidParameter("empty (r, θ) grid".into()));
    }
    let (lr0, lr1) = (-3.0 * std::f64::consts::LN_10, 3.0 * std::f64::consts::LN_10);
    let (min_modulus, argmin_r, argmin_theta) = (0..n_r)
        .into_par_iter()
        .map(|i| {
            let r = (lr0 + (lr1 - lr0) * i as f64 / (n_r - 1) as f64).exp();
            (0..n_theta)
                .map(|j| {
                    let th = TAU * j as f64 / n_theta as f64;
                    (epsilon_expression(eps, r, th).norm(), r, th)
                })
                .fold((f64::INFINITY, 0.0, 0.0), |a, b| if b.0 < a.0 { b } else { a })
        })
        .reduce(|| (f64::INFINITY, 0.0, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    let analytic_bound = epsilon_analytic_bound(eps);
    Ok(EpsilonObstruction {
        eps,
        min_modulus,
        argmin_r,
        argmin_theta,
        analytic_bound,
        bound_positive: analytic_bound > 0.0,
    })
}

/// `z⁴ + (1+ε)z³ - (1/t)(z² - z) + √(2ε+ε²)`, the equation `φ(z) = t` of the
/// ε-family.
pub fn epsilon_quartic(eps: f64, t: Complex64) -> Poly {
    let s = (2.0 * eps + eps * eps).sqrt();
    let it = t.inv();
    Poly::new(vec![
        Complex64::new(s, 0.0),
        it,
        -it,
        Complex64::new(1.0 + eps, 0.0),
        Complex64::new(1.0, 0.0),
    ])
}

/// `z⁴ - (3+√3i)z² - √3i·t·z - √3i`. Its roots are the solutions of
/// `φ(z) = -1/t` for the two-ended candidate.
pub fn section4_quartic(t: Complex64) -> Poly {
    let s3 = 3f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    Poly::new(vec![
        -s3 * i,
        -s3 * i * t,
        -(3.0 + s3 * i),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VieteCheck {
    /// Deviations of `e₁, e₂, e₃, e₄` of the claimed roots from the
    /// coefficients.
    pub residuals: [f64; 4],
    pub max_residual: f64,
}

/// Compares the elementary symmetric functions of four claimed roots with
/// the coefficients of a quartic (normalized to be monic).
pub fn viete_verify(quartic: &Poly, roots4: [Complex64; 4]) -> Result<VieteCheck> {
    if quartic.degree() != 4 {
        return Err(Error::InvalidParameter(format!(
            "Viète check needs a quartic, got degree {}",
            quartic.degree()
        )));
    }
    let lead = quartic.coeff(4);
    let a = |k: usize| quartic.coeff(k) / lead;
    let [z0, z1, z2, z3] = roots4;
    let e1 = z0 + z1 + z2 + z3;
    let e2 = z0 * z1 + z0 * z2 + z0 * z3 + z1 * z2 + z1 * z3 + z2 * z3;
    let e3 = z0 * z1 * z2 + z0 * z1 * z3 + z0 * z2 * z3 + z1 * z2 * z3;
    let e4 = z0 * z1 * z2 * z3;
    let residuals = [
        (e1 + a(3)).norm(),
        (e2 - a(2)).norm(),
        (e3 + a(1)).norm(),
        (e4 - a(0)).norm(),
    ];
    Ok(VieteCheck {
        residuals,
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRoot {
    pub lambda0: f64,
    pub theta0: f64,
    pub r0: f64,
    pub z0: Complex64,
    /// `-1/conj(z₀)`
    pub partner: Complex64,
    /// Parameter of the quartic; `φ(z₀) = -1/t`.
    pub t: Complex64,
    pub phi_value: Complex64,
    /// `|φ(z₀) - conj ψ(z₀)|`
    pub residual: f64,
    pub partner_residual: f64,
    /// Residual of `√3√(1-λ²) = 2λ² + λ - 1` at `λ₀`.
    pub imag2_residual: f64,
    /// Right side of `r² + 1/r² = 2λ(2λ²+2λ+1)` at `λ₀`.
    pub real2_rhs: f64,
    /// `max |q(z)|` over `z₀` and its partner for the quartic at `t`.
    pub quartic_residual: f64,
    pub viete: VieteCheck,
    /// Solutions of the `-` branch `-√3√(1-λ²) = 2λ² + λ - 1` on `[-1, 1]`,
    /// with whether `r² + 1/r²` can reach the required value.
    pub minus_branch: Vec<(f64, bool)>,
}

fn imag2(lambda: f64, sign: f64) -> f64 {
    sign * 3f64.sqrt() * (1.0 - lambda * lambda).max(0.0).sqrt() - (2.0 * lambda * lambda + lambda - 1.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn real2_rhs(lambda: f64) -> f64 {
    2.0 * lambda * (2.0 * lambda * lambda + 2.0 * lambda + 1.0)
}

/// Reconstructs the singular point of the two-ended candidate from the
/// reduced real equations and checks it against the Gauss maps.
pub fn candidate_singular_root() -> Result<CandidateRoot> {
    let lambda0 = bisect(|l| imag2(l, 1.0), 0.5, 1.0);
    let imag2_residual = imag2(lambda0, 1.0).abs();
    // √3 sin 2θ = cos 4θ + cos 2θ > 0 on this branch, so sin 2θ > 0
    let theta0 = 0.5 * lambda0.acos();
    let rhs = real2_rhs(lambda0);
    if rhs <= 2.0 {
        return Err(Error::Verification(format!(
            "r² + 1/r² = {rhs} has no positive solution"
        )));
    }
    let r0 = ((rhs + (rhs * rhs - 4.0).sqrt()) / 2.0).sqrt();
    let z0 = Complex64::from_polar(r0, theta0);
    let partner = -z0.conj().inv();
    let data = section4_candidate()?;
    let phi_value = data.phi.value(z0);
    let residual = (phi_value - data.psi.value(z0).conj()).norm();
    let partner_residual = (data.phi.value(partner) - data.psi.value(partner).conj()).norm();
    let t = -phi_value.inv();
    let q = section4_quartic(t);
    let quartic_residual = q.eval(z0).norm().max(q.eval(partner).norm());
    // the other two roots, from deflating by the known pair
    let pair = Poly::from_roots(&[z0, partner]);
    let (rest, _) = q.div_rem(&pair);
    let others = roots(&rest)?;
    let mut rest_roots: Vec<Complex64> = Vec::new();
    for c in &others {
        for _ in 0..c.multiplicity {
            rest_roots.push(c.center);
        }
    }
    if rest_roots.len() != 2 {
        return Err(Error::Verification("quartic deflation lost roots".into()));
    }
    let viete = viete_verify(&q, [z0, partner, rest_roots[0], rest_roots[1]])?;
    let mut minus_branch = Vec::new();
    let f = |l: f64| imag2(l, -1.0);
    let n = 2000;
    for k in 0..=n {
        let l = -1.0 + 2.0 * k as f64 / n as f64;
        if f(l).abs() < 1e-12 {
            minus_branch.push(l);
        } else if k < n {
            let l2 = -1.0 + 2.0 * (k + 1) as f64 / n as f64;
            if f(l2).abs() >= 1e-12 && (f(l) > 0.0) != (f(l2) > 0.0) {
                minus_branch.push(bisect(f, l, l2));
            }
        }
    }
    let minus_branch = minus_branch.into_iter().map(|l| (l, real2_rhs(l) >= 2.0)).collect();
    if residual > 1e-8 || partner_residual > 1e-8 {
        return Err(Error::Verification(format!(
            "reconstructed point z₀ = {z0} is not singular: |φ - conj ψ| = {residual:e}"
        )));
    }
    Ok(CandidateRoot {
        lambda0,
        theta0,
        r0,
        z0,
        partner,
        t,
        phi_value,
        residual,
        partner_residual,
        imag2_residual,
        real2_rhs: rhs,
        quartic_residual,
        viete,
        minus_branch,
    })
}
