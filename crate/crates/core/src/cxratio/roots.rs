//! Simultaneous (Aberth–Ehrlich) root finding with multiplicity clustering.
//!
//! Double-precision iterates of a `k`-fold root scatter on a circle of
//! radius about `ε^{1/k}` around the true root. Iterates within that
//! expected scatter are merged into one root with multiplicity, the merged
//! center is refined on `p^{(k-1)}` and validated, and the spread is kept on
//! the result. Iterates closer than the clustering tolerance that do *not*
//! look like a multiple root are reported as an ambiguity error.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::Error;

/// Tunables of the root finder.
#[derive(Clone, Copy, Debug)]
pub struct RootConfig {
    /// Relative distance below which iterates are merged into one root.
    pub cluster_tol: f64,
    pub max_iter: usize,
    /// Relative size of `p^{(j)}(c)` (against the absolute-coefficient bound)
    /// accepted when validating a merged root of multiplicity `> j`.
    pub multiplicity_tol: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            cluster_tol: 1e-8,
            max_iter: 2000,
            multiplicity_tol: 1e-6,
        }
    }
}

/// A root with multiplicity. `spread` is the largest distance from the
/// merged iterates to `center` (zero for simple roots and exact zeros).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
    pub spread: f64,
}

pub fn roots(p: &Poly) -> Result<Vec<RootCluster>, Error> {
    roots_with(p, &RootConfig::default())
}

pub fn roots_with(p: &Poly, cfg: &RootConfig) -> Result<Vec<RootCluster>, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    // exact zeros at the origin come straight from the coefficient pattern
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    if zeros_at_origin > 0 {
        out.push(RootCluster {
            center: Complex64::new(0.0, 0.0),
            multiplicity: zeros_at_origin,
            spread: 0.0,
        });
    }
    let q = p.strip_low(zeros_at_origin);
    if q.degree() == 0 {
        return Ok(out);
    }
    let approx = aberth(&q, cfg)?;
    out.extend(cluster(&q, approx, cfg)?);
    Ok(out)
}

fn initial_guesses(p: &Poly) -> Vec<Complex64> {
    let n = p.degree();
    let lead = p.leading().norm();
    // radius from the geometric mean of root moduli, clamped by the Cauchy bound
    let r0 = (p.coeff(0).norm() / lead).powf(1.0 / n as f64);
    let cauchy = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
    let r = if r0.is_finite() && r0 > 0.0 { r0.min(cauchy) } else { 1.0 };
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(r, theta)
        })
        .collect()
}

fn aberth(p: &Poly, cfg: &RootConfig) -> Result<Vec<Complex64>, Error> {
    let n = p.degree();
    if n == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    let dp = p.derivative();
    let mut z = initial_guesses(p);
    let mut converged = vec![false; n];
    for _ in 0..cfg.max_iter {
        let mut all_done = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval(zi);
            if pv.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = pv / dp.eval(zi);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = zi - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if !step.is_finite() {
                continue;
            }
            z[i] = zi - step;
            // stop once the step is at rounding level or the residual is
            // below its own rounding bound
            let bound = p.eval_abs(z[i].norm()) * 4.0 * f64::EPSILON;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300)
                || p.eval(z[i]).norm() <= bound
            {
                converged[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    // multiple roots converge only linearly; accept iterates whose residual
    // is at rounding level relative to the coefficient bound
    let worst = z
        .iter()
        .map(|&zi| p.eval(zi).norm() / p.eval_abs(zi.norm()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if worst <= 1e-10 {
        Ok(z)
    } else {
        Err(Error::RootsNotConverged {
            degree: n,
            residual: worst,
        })
    }
}

/// Expected scatter of double-precision iterates around a `k`-fold root at
/// `c`, capped by the largest scatter any root of modulus `scale` can show
/// (`ε^{1/n}` relative, `n` the degree).
fn expected_scatter(p: &Poly, c: Complex64, k: usize, scale: f64) -> f64 {
    // coefficients produced by cancellation carry absolute noise of order
    // ε·max|a_k|, not ε·|a_k|
    let bound = p.eval_abs(c.norm()).max(p.max_abs());
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let taylor = p.nth_derivative(k).eval(c).norm() / factorial;
    if taylor == 0.0 {
        // p^{(k)}(c) = 0 rules out a root of multiplicity exactly k at c
        return 0.0;
    }
    let cap = 4.0 * (4.0 * f64::EPSILON).powf(1.0 / p.degree() as f64) * scale;
    (4.0 * f64::EPSILON * bound / taylor).powf(1.0 / k as f64).min(cap)
}

fn cluster(p: &Poly, z: Vec<Complex64>, cfg: &RootConfig) -> Result<Vec<RootCluster>, Error> {
    // agglomerative merge: join the closest pair of groups while their
    // distance is within the scatter expected of the combined multiplicity
    // or the configured clustering tolerance
    let scale = z.iter().map(|w| w.norm()).fold(1.0, f64::max);
    let mut groups: Vec<Vec<Complex64>> = z.into_iter().map(|zi| vec![zi]).collect();
    let mean = |g: &[Complex64]| g.iter().sum::<Complex64>() / g.len() as f64;
    'merge: loop {
        let mut pairs = Vec::new();
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                pairs.push((i, j, (mean(&groups[i]) - mean(&groups[j])).norm()));
            }
        }
        pairs.sort_by(|a, b| a.2.total_cmp(&b.2));
        for (i, j, d) in pairs {
            let mut merged = groups[i].clone();
            merged.extend_from_slice(&groups[j]);
            let c = mean(&merged);
            let k = merged.len();
            let spread = merged.iter().map(|&w| (w - c).norm()).fold(0.0, f64::max);
            if d.max(spread) <= 4.0 * expected_scatter(p, c, k, scale) {
                groups[i] = merged;
                groups.swap_remove(j);
                continue 'merge;
            }
            if spread <= cfg.cluster_tol * c.norm().max(1.0) {
                return Err(Error::ClusterAmbiguity {
                    center: c,
                    multiplicity: k,
                    spread,
                });
            }
        }
        break;
    }
    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        let k = g.len();
        let m = mean(&g);
        let spread = g.iter().map(|&w| (w - m).norm()).fold(0.0, f64::max);
        let center = if k == 1 { polish(p, m) } else { refine_multiple(p, m, k) };
        if k > 1 {
            validate_multiple(p, center, k, cfg, spread)?;
        }
        out.push(RootCluster {
            center,
            multiplicity: k,
            spread,
        });
    }
    Ok(out)
}

fn polish(p: &Poly, z0: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut z = z0;
    let mut best = p.eval(z).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let r = p.eval(cand).norm();
        if r.is_finite() && r < best {
            best = r;
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Newton on `p^{(k-1)}`, which has a simple root at a `k`-fold root of `p`.
fn refine_multiple(p: &Poly, z0: Complex64, k: usize) -> Complex64 {
    let q = p.nth_derivative(k - 1);
    let dq = q.derivative();
    let mut z = z0;
    for _ in 0..8 {
        let d = dq.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = q.eval(z) / d;
        if !step.is_finite() || step.norm() > 1e-3 * z0.norm().max(1.0) {
            break;
        }
        z -= step;
        if step.norm() <= 2.0 * f64::EPSILON * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

fn validate_multiple(
    p: &Poly,
    c: Complex64,
    k: usize,
    cfg: &RootConfig,
    spread: f64,
) -> Result<(), Error> {
    let mut d = p.clone();
    for _ in 0..k - 1 {
        let bound = d.eval_abs(c.norm()).max(d.max_abs()).max(f64::MIN_POSITIVE);
        if d.eval(c).norm() > cfg.multiplicity_tol * bound {
            return Err(Error::ClusterAmbiguity {
                center: c,
                multiplicity: k,
                spread,
            });
        }
        d = d.derivative();
    }
    Ok(())
}
