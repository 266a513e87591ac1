//! The immersion `x = 2 Re ∫ x_z dz` on a polar grid, closing defects of
//! loops, and mesh export.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cxratio::ExtComplex;
use crate::error::{Error, Result};
use crate::vecform::{lorentz_dot, Vec4C};
use crate::weierstrass::Surface;

/// Paths closer than this to a puncture are refused.
pub const PUNCTURE_CLEARANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainChart {
    /// `0 ≤ |z| ≤ r_max`, radii evenly spaced.
    Disk,
    /// `r_min ≤ |z| ≤ r_max`, radii geometrically spaced so that
    /// `r_min·r_max = 1` makes the grid invariant under `z ↦ -1/z̄`.
    Annulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainSpec {
    pub chart: DomainChart,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub base_point: Complex64,
    /// Gauss–Legendre nodes per path segment.
    pub gauss_nodes: usize,
}

impl DomainSpec {
    pub fn annulus(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Self {
        DomainSpec {
            chart: DomainChart::Annulus,
            r_min,
            r_max,
            n_r,
            n_theta,
            base_point: Complex64::new(1.0, 0.0),
            gauss_nodes: 16,
        }
    }

    pub fn disk(r_max: f64, n_r: usize, n_theta: usize) -> Self {
        DomainSpec {
            chart: DomainChart::Disk,
            r_min: 0.0,
            r_max,
            n_r,
            n_theta,
            base_point: Complex64::new(r_max / 2.0, 0.0),
            gauss_nodes: 16,
        }
    }

    fn radii(&self) -> Vec<f64> {
        let n = self.n_r;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.chart {
                    DomainChart::Disk => self.r_max * t,
                    DomainChart::Annulus => self.r_min * (self.r_max / self.r_min).powf(t),
                }
            })
            .collect()
    }

    fn angles(&self) -> Vec<f64> {
        (0..self.n_theta).map(|j| TAU * j as f64 / self.n_theta as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_r < 2 || self.n_theta < 3 || self.gauss_nodes < 2 {
            return Err(Error::InvalidParameter(format!(
                "mesh needs n_r ≥ 2, n_θ ≥ 3 and ≥ 2 Gauss nodes, got {}×{} with {}",
                self.n_r, self.n_theta, self.gauss_nodes
            )));
        }
        let ok = match self.chart {
            DomainChart::Disk => self.r_max > 0.0,
            DomainChart::Annulus => self.r_min > 0.0 && self.r_min < self.r_max,
        };
        if !ok || !self.r_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bad radii r_min = {}, r_max = {}",
                self.r_min, self.r_max
            )));
        }
        let rb = self.base_point.norm();
        if rb == 0.0 || rb < self.r_min || rb > self.r_max {
            return Err(Error::InvalidParameter(format!(
                "base point {} must be a nonzero point of the domain",
                self.base_point
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshPoint {
    pub z: Complex64,
    pub x: [f64; 4],
    /// `e^{2ω}`
    pub conformal_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mesh {
    pub domain: DomainSpec,
    /// Row-major: index `i·n_θ + j` for radius `i`, angle `j`.
    pub points: Vec<MeshPoint>,
}

impl Mesh {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 4];
        let mut hi = [f64::NEG_INFINITY; 4];
        for p in &self.points {
            for k in 0..4 {
                lo[k] = lo[k].min(p.x[k]);
                hi[k] = hi[k].max(p.x[k]);
            }
        }
        (0..4).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }
}

/// `e^{2ω} = 2⟨x_z, conj x_z⟩`, equal to `4|φ - conj ψ|²|h|²`.
pub fn conformal_factor<S: Surface + ?Sized>(s: &S, z: Complex64) -> Result<f64> {
    let v = Vec4C(s.xz(z));
    let e = 2.0 * lorentz_dot(&v, &v.conj()).re;
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::SingularPoint(z));
    }
    Ok(e)
}

/// The same factor from the Gauss maps directly.
pub fn conformal_factor_from_gauss<S: Surface + ?Sized>(s: &S, z: Complex64) -> f64 {
    let (phi, psi) = s.gauss(z).values();
    4.0 * (phi - psi.conj()).norm_sqr() * s.h(z).norm_sqr()
}

fn check_clearance<S: Surface + ?Sized>(s: &S, a: Complex64, b: Complex64, arc_radius: Option<f64>) -> Result<()> {
    for p in s.punctures() {
        let ExtComplex::Finite(c) = *p else { continue };
        let dist = match arc_radius {
            Some(r) => {
                // the arc lies on |z| = r; conservative: distance to the circle
                let on_circle = (c.norm() - r).abs();
                if on_circle > PUNCTURE_CLEARANCE {
                    continue;
                }
                let (ta, tb, tc) = (a.arg(), b.arg(), c.arg());
                let span = (tb - ta).rem_euclid(TAU);
                let off = (tc - ta).rem_euclid(TAU);
                if off <= span { on_circle } else { f64::INFINITY }
            }
            None => {
                let d = b - a;
                let t = if d.norm_sqr() == 0.0 {
                    0.0
                } else {
                    (((c - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
                };
                (a + d * t - c).norm()
            }
        };
        if dist < PUNCTURE_CLEARANCE {
            return Err(Error::PathThroughPuncture(*p));
        }
    }
    Ok(())
}

/// `∫ x_z dz` along the segment `a → b`.
fn segment<S: Surface + ?Sized>(s: &S, rule: &GaussLegendre, a: Complex64, b: Complex64) -> Vec4C {
    let half = (b - a) * 0.5;
    let mid = (a + b) * 0.5;
    rule.as_node_weight_pairs()
        .iter()
        .fold(Vec4C::zero(), |acc, &(x, w)| acc + Vec4C(s.xz(mid + half * x)).scale(half * w))
}

/// `∫ x_z dz` along `|z| = r` from angle `t0` to `t1`.
fn arc<S: Surface + ?Sized>(s: &S, rule: &GaussLegendre, r: f64, t0: f64, t1: f64) -> Vec4C {
    let half = 0.5 * (t1 - t0);
    let mid = 0.5 * (t0 + t1);
    let i = Complex64::new(0.0, 1.0);
    rule.as_node_weight_pairs().iter().fold(Vec4C::zero(), |acc, &(x, w)| {
        let z = Complex64::from_polar(r, mid + half * x);
        acc + Vec4C(s.xz(z)).scale(i * z * half * w)
    })
}

fn two_re(v: &Vec4C) -> [f64; 4] {
    v.re().map(|x| 2.0 * x)
}

/// Integrates the immersion over a polar grid. Every node is reached by an
/// arc on the circle through the base point followed by a radial spoke, and
/// the base point is mapped to the origin.
pub fn integrate_surface<S: Surface + ?Sized>(s: &S, domain: &DomainSpec) -> Result<Mesh> {
    domain.validate()?;
    let rule = GaussLegendre::new(NonZeroUsize::new(domain.gauss_nodes).expect("validated"));
    let radii = domain.radii();
    let angles = domain.angles();
    let rb = domain.base_point.norm();
    let tb = domain.base_point.arg();
    // cumulative arc integrals on the base circle, counterclockwise from tb
    let mut arc_to: Vec<Vec4C> = Vec::with_capacity(angles.len());
    for &t in &angles {
        let target = tb + (t - tb).rem_euclid(TAU);
        let steps = (((target - tb) / (TAU / 64.0)).ceil() as usize).max(1);
        let mut acc = Vec4C::zero();
        for k in 0..steps {
            let a = tb + (target - tb) * k as f64 / steps as f64;
            let b = tb + (target - tb) * (k + 1) as f64 / steps as f64;
            check_clearance(s, Complex64::from_polar(rb, a), Complex64::from_polar(rb, b), Some(rb))?;
            acc = acc + arc(s, &rule, rb, a, b);
        }
        arc_to.push(acc);
    }
    let spokes: Vec<Result<Vec<MeshPoint>>> = angles
        .par_iter()
        .zip(arc_to.par_iter())
        .map(|(&t, start)| {
            let dir = Complex64::from_polar(1.0, t);
            // radii sorted ascending; walk outward and inward from rb
            let mut xs = vec![Vec4C::zero(); radii.len()];
            let split = radii.partition_point(|&r| r < rb);
            let mut acc = *start;
            let mut prev = rb;
            for k in split..radii.len() {
                let (a, b) = (dir * prev, dir * radii[k]);
                check_clearance(s, a, b, None)?;
                acc = acc + segment(s, &rule, a, b);
                xs[k] = acc;
                prev = radii[k];
            }
            let mut acc = *start;
            let mut prev = rb;
            for k in (0..split).rev() {
                let (a, b) = (dir * prev, dir * radii[k]);
                check_clearance(s, a, b, None)?;
                acc = acc + segment(s, &rule, a, b);
                xs[k] = acc;
                prev = radii[k];
            }
            radii
                .iter()
                .zip(&xs)
                .map(|(&r, v)| {
                    let z = dir * r;
                    Ok(MeshPoint {
                        z,
                        x: two_re(v),
                        conformal_factor: conformal_factor(s, z)?,
                    })
                })
                .collect()
        })
        .collect();
    let mut by_angle = Vec::with_capacity(angles.len());
    for sp in spokes {
        by_angle.push(sp?);
    }
    let mut points = Vec::with_capacity(radii.len() * angles.len());
    for i in 0..radii.len() {
        for col in &by_angle {
            points.push(col[i]);
        }
    }
    Ok(Mesh {
        domain: *domain,
        points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoopSpec {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl LoopSpec {
    pub fn circle(center: Complex64, radius: f64) -> Self {
        LoopSpec {
            center,
            radius,
            nodes: 2048,
        }
    }
}

/// `2 Re ∮ x_z dz` around a counterclockwise circle, trapezoid rule.
pub fn loop_defect<S: Surface + ?Sized>(s: &S, lp: &LoopSpec) -> Result<[f64; 4]> {
    if lp.radius <= 0.0 || lp.nodes < 8 {
        return Err(Error::InvalidParameter("loop needs a positive radius and ≥ 8 nodes".into()));
    }
    for p in s.punctures() {
        if let ExtComplex::Finite(c) = *p {
            if ((c - lp.center).norm() - lp.radius).abs() < PUNCTURE_CLEARANCE {
                return Err(Error::PathThroughPuncture(*p));
            }
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let h = TAU / lp.nodes as f64;
    let sum = (0..lp.nodes).fold(Vec4C::zero(), |acc, k| {
        let u = Complex64::from_polar(lp.radius, h * k as f64);
        acc + Vec4C(s.xz(lp.center + u)).scale(i * u * h)
    });
    Ok(two_re(&sum))
}

/// Largest deviation of `x(-1/z̄) - x(z)` from its mean over the node pairs
/// of an inversion-symmetric annulus, relative to the mesh diameter.
/// `None` when the grid is not closed under the involution.
pub fn involution_pair_defect(mesh: &Mesh) -> Option<f64> {
    let d = &mesh.domain;
    if d.chart != DomainChart::Annulus || (d.r_min * d.r_max - 1.0).abs() > 1e-12 || !d.n_theta.is_multiple_of(2) {
        return None;
    }
    let (nr, nt) = (d.n_r, d.n_theta);
    let mut diffs = Vec::with_capacity(nr * nt);
    for i in 0..nr {
        for j in 0..nt {
            let a = mesh.points[i * nt + j].x;
            let b = mesh.points[(nr - 1 - i) * nt + (j + nt / 2) % nt].x;
            diffs.push([0, 1, 2, 3].map(|k| b[k] - a[k]));
        }
    }
    let n = diffs.len() as f64;
    let mean = [0, 1, 2, 3].map(|k| diffs.iter().map(|v| v[k]).sum::<f64>() / n);
    let worst = diffs
        .iter()
        .map(|v| (0..4).map(|k| (v[k] - mean[k]).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Some(worst / mesh.diameter().max(1e-300))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    DropX4,
    StereographicX4,
}

/// Writes `path` as an OBJ (projected to ℝ³) and a companion CSV with all
/// four coordinates next to it. Returns the two paths.
pub fn export_obj(mesh: &Mesh, projection: Projection, path: &Path) -> Result<(PathBuf, PathBuf)> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let (nr, nt) = (mesh.domain.n_r, mesh.domain.n_theta);
    let max_x4 = mesh.points.iter().map(|p| p.x[3].abs()).fold(0.0, f64::max);
    let s = if max_x4 > 0.0 { 0.5 / max_x4 } else { 0.0 };
    let mut obj = BufWriter::new(File::create(path)?);
    match projection {
        Projection::DropX4 => writeln!(obj, "# projection drop_x4")?,
        Projection::StereographicX4 => writeln!(obj, "# projection stereographic_x4 s={s:.12e}")?,
    }
    writeln!(obj, "# {} vertices, {}x{} grid", mesh.points.len(), nr, nt)?;
    for p in &mesh.points {
        let [x1, x2, x3, x4] = p.x;
        let (a, b, c) = match projection {
            Projection::DropX4 => (x1, x2, x3),
            Projection::StereographicX4 => {
                let q = 1.0 + s * x4;
                (x1 / q, x2 / q, x3 / q)
            }
        };
        writeln!(obj, "v {a:.12} {b:.12} {c:.12}")?;
    }
    let idx = |i: usize, j: usize| i * nt + (j % nt) + 1;
    for i in 0..nr.saturating_sub(1) {
        for j in 0..nt {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            writeln!(obj, "f {a} {b} {c}")?;
            writeln!(obj, "f {a} {c} {d}")?;
        }
    }
    obj.flush()?;
    let csv_path = path.with_extension("csv");
    let mut csv = BufWriter::new(File::create(&csv_path)?);
    writeln!(csv, "z_re,z_im,x1,x2,x3,x4,e2w")?;
    for p in &mesh.points {
        writeln!(
            csv,
            "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
            p.z.re, p.z.im, p.x[0], p.x[1], p.x[2], p.x[3], p.conformal_factor
        )?;
    }
    csv.flush()?;
    Ok((path.to_path_buf(), csv_path))
}
