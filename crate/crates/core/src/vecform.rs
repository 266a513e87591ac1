//! Vector-valued rational forms with the bilinear Lorentz product.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::cxratio::{same_center, Basis, ExtComplex, FractionSum, Laurent, RationalMap};
use crate::error::{Error, Result};
use crate::weierstrass::WeierstrassData;

/// Default tolerance for the isotropy and normal-form checks.
pub const VEC_TOL: f64 = 1e-9;

/// A vector of `ℂ⁴` with the bilinear product of signature `(+,+,+,-)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Vec4C(pub [Complex64; 4]);

impl Vec4C {
    pub fn new(x1: Complex64, x2: Complex64, x3: Complex64, x4: Complex64) -> Self {
        Vec4C([x1, x2, x3, x4])
    }

    pub fn real(v: [f64; 4]) -> Self {
        Vec4C(v.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn zero() -> Self {
        Vec4C([Complex64::new(0.0, 0.0); 4])
    }

    pub fn conj(&self) -> Self {
        Vec4C(self.0.map(|c| c.conj()))
    }

    pub fn re(&self) -> [f64; 4] {
        self.0.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 4] {
        self.0.map(|c| c.im)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Vec4C(self.0.map(|c| c * s))
    }

    /// Largest component modulus.
    pub fn norm_max(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn dot(&self, other: &Vec4C) -> Complex64 {
        lorentz_dot(self, other)
    }
}

impl Add for Vec4C {
    type Output = Vec4C;
    fn add(self, o: Vec4C) -> Vec4C {
        Vec4C([0, 1, 2, 3].map(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for Vec4C {
    type Output = Vec4C;
    fn sub(self, o: Vec4C) -> Vec4C {
        Vec4C([0, 1, 2, 3].map(|k| self.0[k] - o.0[k]))
    }
}

impl Mul<Complex64> for Vec4C {
    type Output = Vec4C;
    fn mul(self, s: Complex64) -> Vec4C {
        self.scale(s)
    }
}

/// `u₁v₁ + u₂v₂ + u₃v₃ - u₄v₄`, no conjugation.
pub fn lorentz_dot(u: &Vec4C, v: &Vec4C) -> Complex64 {
    u.0[0] * v.0[0] + u.0[1] * v.0[1] + u.0[2] * v.0[2] - u.0[3] * v.0[3]
}

/// `Σ basis(z)·coefficient` with `Vec4C` coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VectorForm {
    pub terms: Vec<(Basis, Vec4C)>,
}

impl VectorForm {
    pub fn new() -> Self {
        VectorForm { terms: Vec::new() }
    }

    pub fn push(&mut self, basis: Basis, v: Vec4C) {
        let mut comps = self.components();
        for k in 0..4 {
            comps[k].push(basis, v.0[k]);
        }
        *self = VectorForm::from_components(&comps);
    }

    pub fn from_components(c: &[FractionSum; 4]) -> Self {
        let mut bases: Vec<Basis> = Vec::new();
        for s in c {
            for t in &s.terms {
                let probe = FractionSum::single(t.basis, Complex64::new(1.0, 0.0));
                if !bases.iter().any(|b| probe.coeff(*b) != Complex64::new(0.0, 0.0)) {
                    bases.push(t.basis);
                }
            }
        }
        let terms = bases
            .into_iter()
            .map(|b| (b, Vec4C([0, 1, 2, 3].map(|k| c[k].coeff(b)))))
            .collect();
        VectorForm { terms }
    }

    pub fn components(&self) -> [FractionSum; 4] {
        let mut out: [FractionSum; 4] = Default::default();
        for (b, v) in &self.terms {
            for k in 0..4 {
                out[k].push(*b, v.0[k]);
            }
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> Vec4C {
        self.terms
            .iter()
            .fold(Vec4C::zero(), |acc, (b, v)| acc + v.scale(b.eval(z)))
    }

    /// Coefficient vector of a basis element.
    pub fn coeff(&self, basis: Basis) -> Vec4C {
        let comps = self.components();
        Vec4C([0, 1, 2, 3].map(|k| comps[k].coeff(basis)))
    }

    /// Pole orders present at `center`, with coefficient vectors.
    pub fn poles_at(&self, center: Complex64) -> Vec<(u32, Vec4C)> {
        let mut out: Vec<(u32, Vec4C)> = self
            .terms
            .iter()
            .filter_map(|(b, v)| match *b {
                Basis::Pole { center: c, power } if same_center(c, center) => Some((power, *v)),
                _ => None,
            })
            .collect();
        out.sort_by_key(|t| t.0);
        out
    }

    /// The scalar fraction sum `⟨self, self⟩`.
    pub fn self_dot(&self) -> FractionSum {
        let c = self.components();
        let mut out = FractionSum::new();
        for (k, sign) in [(0, 1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
            out.add_assign(&c[k].mul(&c[k]).scale(Complex64::new(sign, 0.0)));
        }
        out
    }
}

/// Coefficients of `u^lo, …, u^hi` of a local expansion.
#[derive(Clone, Debug)]
struct Window {
    lo: i64,
    c: Vec<Complex64>,
}

impl Window {
    fn from_laurent(l: &Laurent, lo: i64, hi: i64) -> Window {
        Window {
            lo,
            c: (lo..=hi).map(|k| l.coeff(k)).collect(),
        }
    }

    fn constant(v: Complex64, lo: i64, hi: i64) -> Window {
        Window {
            lo,
            c: (lo..=hi).map(|k| if k == 0 { v } else { Complex64::new(0.0, 0.0) }).collect(),
        }
    }

    fn get(&self, k: i64) -> Complex64 {
        self.c[(k - self.lo) as usize]
    }

    fn hi(&self) -> i64 {
        self.lo + self.c.len() as i64 - 1
    }

    fn zip(&self, o: &Window, f: impl Fn(Complex64, Complex64) -> Complex64) -> Window {
        Window {
            lo: self.lo,
            c: self.c.iter().zip(&o.c).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn mul(&self, o: &Window) -> Window {
        let (lo, hi) = (self.lo, self.hi());
        let c = (lo..=hi)
            .map(|e| {
                (lo..=hi)
                    .filter(|i| e - i >= lo && e - i <= hi)
                    .map(|i| self.get(i) * o.get(e - i))
                    .sum()
            })
            .collect();
        Window { lo, c }
    }
}

/// Principal parts of the four components around one point.
fn local_components(data: &WeierstrassData, p: ExtComplex) -> [Window; 4] {
    let orders: Vec<i64> = [&data.phi, &data.psi, &data.h]
        .iter()
        .map(|f| f.order_at(p).unwrap_or(0).min(0))
        .collect();
    let depth: i64 = -orders.iter().sum::<i64>();
    let lo = -depth;
    let hi = 3 * depth + 4;
    let terms = (hi - lo + 1) as usize + depth as usize;
    let w = |f: &RationalMap| Window::from_laurent(&f.laurent(p, terms), lo, hi);
    let (phi, psi, h) = (w(&data.phi), w(&data.psi), w(&data.h));
    let i = Complex64::new(0.0, 1.0);
    let one = Window::constant(Complex64::new(1.0, 0.0), lo, hi);
    let prod = phi.mul(&psi);
    [
        phi.zip(&psi, |a, b| a + b).mul(&h),
        phi.zip(&psi, |a, b| -i * (a - b)).mul(&h),
        one.zip(&prod, |a, b| a - b).mul(&h),
        one.zip(&prod, |a, b| a + b).mul(&h),
    ]
}

/// Partial-fraction form of `x_z = (φ+ψ, -i(φ-ψ), 1-φψ, 1+φψ)h`.
///
/// The principal parts are read off local Laurent expansions of `φ`, `ψ`,
/// `h` at every point where one of them has a pole or which is a puncture,
/// so no roots of the (ill-conditioned) product denominators are needed.
pub fn xz_from_data(data: &WeierstrassData) -> Result<VectorForm> {
    let mut centers: Vec<Complex64> = Vec::new();
    let mut add_center = |c: Complex64| {
        if !centers.iter().any(|q| same_center(*q, c)) {
            centers.push(c);
        }
    };
    for p in &data.punctures {
        if let ExtComplex::Finite(c) = p {
            add_center(*c);
        }
    }
    for f in [&data.phi, &data.psi, &data.h] {
        for r in f.finite_poles()? {
            add_center(r.center);
        }
    }
    let mut raw: Vec<(Basis, Vec4C)> = Vec::new();
    for &c in &centers {
        let comps = local_components(data, ExtComplex::Finite(c));
        for e in comps[0].lo..0 {
            let v = Vec4C([0, 1, 2, 3].map(|k| comps[k].get(e)));
            raw.push((
                Basis::Pole {
                    center: c,
                    power: (-e) as u32,
                },
                v,
            ));
        }
    }
    let comps = local_components(data, ExtComplex::Infinity);
    for e in comps[0].lo..=0 {
        let v = Vec4C([0, 1, 2, 3].map(|k| comps[k].get(e)));
        raw.push((Basis::Mono { power: (-e) as u32 }, v));
    }
    let scale = raw.iter().map(|(_, v)| v.norm_max()).fold(1.0, f64::max);
    let terms: Vec<(Basis, Vec4C)> = raw
        .into_iter()
        .filter(|(_, v)| v.norm_max() > 1e-13 * scale)
        .collect();
    let vf = VectorForm { terms };
    // spot check against direct evaluation
    for k in 0..12 {
        let t = 0.37 + k as f64 * 0.53;
        let z = Complex64::from_polar(0.3 + 0.25 * k as f64, t);
        if centers.iter().any(|c| (c - z).norm() < 1e-3) {
            continue;
        }
        let direct = Vec4C(data.xz(z));
        let summed = vf.eval(z);
        let err = (direct - summed).norm_max();
        if err > 1e-7 * direct.norm_max().max(1.0) {
            return Err(Error::Verification(format!(
                "partial-fraction form of x_z disagrees with direct evaluation at {z} by {err:e}"
            )));
        }
    }
    Ok(vf)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropyReport {
    /// Largest coefficient of the expanded `⟨x_z, x_z⟩`.
    pub residual: f64,
    /// Largest coefficient of the form itself, for scale.
    pub scale: f64,
    pub pass: bool,
}

pub fn check_isotropy(vf: &VectorForm) -> IsotropyReport {
    let residual = vf.self_dot().max_abs();
    let scale = vf.terms.iter().map(|(_, v)| v.norm_max()).fold(0.0, f64::max);
    IsotropyReport {
        residual,
        scale,
        pass: residual <= VEC_TOL,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaurentNormalForm {
    pub v0: Vec4C,
    pub v1: Vec4C,
    /// `α_3, …, α_{m+2}`
    pub alphas: Vec<Complex64>,
    pub v0_real: bool,
    pub v0_lightlike: bool,
    pub v1_isotropic: bool,
    pub v0_v1_orthogonal: bool,
    /// Largest deviation of the pole coefficients of order `3..=m+2` from
    /// multiples of `v0`.
    pub parallel_residual: f64,
    pub degenerate_span_ok: bool,
}

/// Normal form `x_z = (Σ α_{k+2}/u^{k+2}) v0 + v1/u² + O(1)` around a
/// good singular end with `ind = m`, `d̃ = 1` and zero flux.
pub fn laurent_normal_form(vf: &VectorForm, p: Complex64, m: u32) -> Result<LaurentNormalForm> {
    if m < 1 {
        return Err(Error::Hypothesis(format!("index m = {m} must be ≥ 1")));
    }
    let poles = vf.poles_at(p);
    let scale = poles.iter().map(|(_, v)| v.norm_max()).fold(0.0, f64::max).max(1.0);
    let live: Vec<&(u32, Vec4C)> = poles.iter().filter(|(_, v)| v.norm_max() > VEC_TOL * scale).collect();
    let deepest = live.iter().map(|t| t.0).max().unwrap_or(0);
    let flux = poles.iter().find(|t| t.0 == 1).map(|t| t.1).unwrap_or_else(Vec4C::zero);
    if flux.norm_max() > VEC_TOL * scale {
        return Err(Error::Hypothesis(format!(
            "flux at {p} is not zero (|residue| = {:e})",
            flux.norm_max()
        )));
    }
    if deepest != m + 2 {
        return Err(Error::Hypothesis(format!(
            "pole order {deepest} at {p} gives d̃ = {} for ind = {m}; the normal form needs d̃ = 1",
            deepest as i64 - 1 - m as i64
        )));
    }
    let coeff = |k: u32| poles.iter().find(|t| t.0 == k).map(|t| t.1).unwrap_or_else(Vec4C::zero);
    let lead = coeff(m + 2);
    // rotate the leading coefficient to a real vector
    let big = lead
        .0
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    let phase = big / big.norm();
    let v0 = lead.scale(phase.inv());
    let v0_re = Vec4C::real(v0.re());
    let nrm2: f64 = v0.re().iter().map(|x| x * x).sum();
    let mut alphas = Vec::new();
    let mut parallel_residual: f64 = 0.0;
    for k in 3..=m + 2 {
        let ck = coeff(k);
        let a: Complex64 = (0..4).map(|j| ck.0[j] * v0.re()[j]).sum::<Complex64>() / nrm2;
        parallel_residual = parallel_residual.max((ck - v0_re.scale(a)).norm_max());
        alphas.push(a);
    }
    let v1 = coeff(2);
    let im_norm = v0.im().iter().map(|x| x * x).sum::<f64>().sqrt();
    let v0_real = im_norm <= VEC_TOL * nrm2.sqrt();
    let v0_lightlike = lorentz_dot(&v0, &v0).norm() <= VEC_TOL * scale.powi(2);
    let v1_isotropic = lorentz_dot(&v1, &v1).norm() <= VEC_TOL * scale.powi(2);
    let v0_v1_orthogonal = lorentz_dot(&v0, &v1).norm() <= VEC_TOL * scale.powi(2);
    let degenerate_span_ok = v0_real
        && v0_lightlike
        && v1_isotropic
        && v0_v1_orthogonal
        && parallel_residual <= VEC_TOL * scale
        && alphas.last().is_some_and(|a| a.norm() > VEC_TOL);
    Ok(LaurentNormalForm {
        v0,
        v1,
        alphas,
        v0_real,
        v0_lightlike,
        v1_isotropic,
        v0_v1_orthogonal,
        parallel_residual,
        degenerate_span_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub c: f64,
    /// `v₁·u₁`
    pub v1u1: Complex64,
    /// `v₁·ū₁`
    pub v1u1bar: Complex64,
    /// `u₁·ū₁`
    pub u1_norm2: f64,
    /// Residual of the least-squares solve of the coefficient equations.
    pub solve_residual: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// `(1+c²)² - α₁² - α₂²`, equal to `α₃² - α₄²`.
    pub margin_alpha: f64,
    /// `(1+c²)² - β₁² - β₂²`, equal to `β₃² - β₄²`.
    pub margin_beta: f64,
    pub feasible: bool,
    pub verdict: String,
}

/// Coefficient conditions of `⟨x_z, x_z⟩ = 0` for
/// `x_z = v₁/z² + v̄₁ + u₁/(z-c)² + ū₁/(cz+1)²` with `v₁ = (1, i, 0, 0)`.
pub fn two_end_obstruction(c: f64) -> Result<ObstructionReport> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("two_end_obstruction needs real c ≠ 0, got {c}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let cz = Complex64::new(c, 0.0);
    let q = Complex64::new(-1.0 / c, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let pole = |center: Complex64, power: u32| FractionSum::single(Basis::Pole { center, power }, one);
    // 1/(cz+1)² = c⁻²/(z+1/c)²
    let inv_cz1_sq = pole(q, 2).scale(Complex64::new(1.0 / (c * c), 0.0));
    let z2 = pole(zero, 2);
    let zc2 = pole(cz, 2);
    let t_a = z2.mul(&zc2); // v₁u₁
    let t_b = z2.mul(&inv_cz1_sq); // v₁ū₁
    let t_c = zc2.mul(&inv_cz1_sq); // u₁ū₁
    let t_w = z2.clone(); // v₁v̄₁ = 2
    let t_bbar = zc2.clone(); // v̄₁u₁
    let t_abar = inv_cz1_sq.clone(); // v̄₁ū₁
    let basis = [
        Basis::Pole { center: zero, power: 1 },
        Basis::Pole { center: zero, power: 2 },
        Basis::Pole { center: cz, power: 1 },
        Basis::Pole { center: cz, power: 2 },
        Basis::Pole { center: q, power: 1 },
        Basis::Pole { center: q, power: 2 },
    ];
    // unknowns x = (Re A, Im A, Re B, Im B, C)
    let i = Complex64::new(0.0, 1.0);
    let mut mat = DMatrix::<f64>::zeros(12, 5);
    let mut rhs = DVector::<f64>::zeros(12);
    for (row, b) in basis.iter().enumerate() {
        let ka = t_a.coeff(*b);
        let kb = t_b.coeff(*b);
        let kc = t_c.coeff(*b);
        let kw = t_w.coeff(*b);
        let kbb = t_bbar.coeff(*b);
        let kab = t_abar.coeff(*b);
        // complex coefficient of each real unknown
        let cols = [ka + kab, i * ka - i * kab, kb + kbb, i * kb - i * kbb, kc];
        for (col, v) in cols.iter().enumerate() {
            mat[(2 * row, col)] = v.re;
            mat[(2 * row + 1, col)] = v.im;
        }
        let constant = kw * 2.0;
        rhs[2 * row] = -constant.re;
        rhs[2 * row + 1] = -constant.im;
    }
    let svd = mat.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Verification(format!("obstruction solve failed: {e}")))?;
    let solve_residual = (&mat * &x - &rhs).norm();
    let a = Complex64::new(x[0], x[1]);
    let b = Complex64::new(x[2], x[3]);
    let u1_norm2 = x[4];
    // v₁u₁ = (α₁-β₂) + i(β₁+α₂), v₁ū₁ = (α₁+β₂) + i(α₂-β₁)
    let alpha1 = (a.re + b.re) / 2.0;
    let beta2 = (b.re - a.re) / 2.0;
    let alpha2 = (a.im + b.im) / 2.0;
    let beta1 = (a.im - b.im) / 2.0;
    let half_len2 = u1_norm2 / 2.0;
    let margin_alpha = half_len2 - alpha1 * alpha1 - alpha2 * alpha2;
    let margin_beta = half_len2 - beta1 * beta1 - beta2 * beta2;
    let cross = alpha1 * beta1 + alpha2 * beta2;
    // |α₃| > |α₄| and |β₃| > |β₄| make α₃β₃ = α₄β₄ - (α₁β₁ + α₂β₂) impossible
    // once the cross term vanishes
    let feasible = !(margin_alpha > 0.0 && margin_beta > 0.0 && cross.abs() <= 1e-9 * half_len2.max(1.0));
    let verdict = if feasible {
        "feasible".to_string()
    } else {
        format!(
            "infeasible: α₃²-α₄² = {margin_alpha:.6} > 0 and β₃²-β₄² = {margin_beta:.6} > 0 \
             contradict α₃β₃ = α₄β₄"
        )
    };
    Ok(ObstructionReport {
        c,
        v1u1: a,
        v1u1bar: b,
        u1_norm2,
        solve_residual,
        alpha1,
        alpha2,
        beta1,
        beta2,
        margin_alpha,
        margin_beta,
        feasible,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lightlike_and_isotropic_vectors() {
        let v0 = Vec4C::real([0.0, 0.0, 1.0, 1.0]);
        let u0 = Vec4C::real([0.0, 0.0, -1.0, 1.0]);
        assert_eq!(lorentz_dot(&v0, &v0), c(0.0, 0.0));
        assert_eq!(lorentz_dot(&v0, &u0), c(-2.0, 0.0));
        let w = Vec4C::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(lorentz_dot(&w, &w), c(0.0, 0.0));
        assert_eq!(lorentz_dot(&w, &w.conj()), c(2.0, 0.0));
    }

    #[test]
    fn non_isotropic_single_term_fails() {
        let mut vf = VectorForm::new();
        vf.push(
            Basis::Pole {
                center: c(0.0, 0.0),
                power: 2,
            },
            Vec4C::real([1.0, 0.0, 0.0, 0.0]),
        );
        let r = check_isotropy(&vf);
        assert!((r.residual - 1.0).abs() < 1e-15);
        assert!(!r.pass);
    }

    #[test]
    fn obstruction_at_c_one() {
        let r = two_end_obstruction(1.0).unwrap();
        assert!((r.v1u1 - c(-1.0, 0.0)).norm() < 1e-9);
        assert!((r.v1u1bar - c(-1.0, 0.0)).norm() < 1e-9);
        assert!((r.u1_norm2 - 8.0).abs() < 1e-9);
        assert!(!r.feasible);
    }

    fn data_tests_prelude() -> (Vec4C, Vec4C) {
        (
            Vec4C::real([0.0, 0.0, 1.0, 1.0]),
            Vec4C::new(c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)),
        )
    }

    fn close(a: &Vec4C, b: &Vec4C, tol: f64) -> bool {
        (*a - *b).norm_max() < tol
    }

    #[test]
    fn section4_decomposition() {
        use crate::weierstrass::section4_candidate;
        let d = section4_candidate().unwrap();
        let vf = xz_from_data(&d).unwrap();
        assert!(check_isotropy(&vf).pass, "{:?}", check_isotropy(&vf));
        let (v0, v1) = data_tests_prelude();
        let nf = laurent_normal_form(&vf, c(0.0, 0.0), 1).unwrap();
        assert!(close(&nf.v0, &v0, 1e-9), "{:?}", nf.v0);
        assert!(close(&nf.v1, &v1, 1e-9), "{:?}", nf.v1);
        assert!((nf.alphas[0] - 1.0).norm() < 1e-9);
        assert!(nf.degenerate_span_ok);
        let s3 = 3f64.sqrt();
        let b3 = 4.0 / s3 + s3 / 4.0;
        let b4 = 4.0 / s3 - s3 / 4.0;
        let u1 = Vec4C::new(c(-1.0, 0.0), c(s3, 0.0), c(0.0, b3), c(0.0, b4));
        let at_one = vf.coeff(Basis::Pole {
            center: c(1.0, 0.0),
            power: 2,
        });
        assert!(close(&at_one, &u1, 1e-9), "{at_one:?}");
        assert!(vf.coeff(Basis::Pole { center: c(0.0, 0.0), power: 1 }).norm_max() < 1e-9);
        assert!(close(&vf.coeff(Basis::Mono { power: 1 }), &v0.scale(c(-1.0, 0.0)), 1e-9));
    }

    #[test]
    fn toy_normal_form_m2() {
        use crate::cxratio::{ExtComplex, Poly, RationalMap};
        use crate::weierstrass::WeierstrassData;
        let a2 = c(0.7, -0.3);
        let zero = c(0.0, 0.0);
        let phi = RationalMap::from_poly(Poly::new(vec![zero, zero, a2]));
        let psi = RationalMap::from_poly(Poly::monomial(c(1.0, 0.0), 4));
        let h = RationalMap::new(Poly::constant(c(1.0, 0.0)), Poly::monomial(c(1.0, 0.0), 4)).unwrap();
        let d = WeierstrassData::new(phi, psi, h, vec![ExtComplex::ZERO, ExtComplex::Infinity], false).unwrap();
        let vf = xz_from_data(&d).unwrap();
        assert!(check_isotropy(&vf).pass);
        let nf = laurent_normal_form(&vf, zero, 2).unwrap();
        assert!(close(&nf.v0, &Vec4C::real([0.0, 0.0, 1.0, 1.0]), 1e-12));
        assert!(close(&nf.v1, &Vec4C::new(a2, -c(0.0, 1.0) * a2, zero, zero), 1e-12));
        assert_eq!(nf.alphas.len(), 2);
        assert!(nf.alphas[0].norm() < 1e-12);
        assert!(nf.degenerate_span_ok);
    }

    #[test]
    fn epsilon_family_fails_reduced_multiplicity_hypothesis() {
        use crate::weierstrass::epsilon_family;
        let d = epsilon_family(0.1).unwrap();
        let vf = xz_from_data(&d).unwrap();
        assert!(check_isotropy(&vf).pass);
        assert!(vf.coeff(Basis::Pole { center: c(0.0, 0.0), power: 1 }).norm_max() < 1e-9);
        assert!(matches!(laurent_normal_form(&vf, c(0.0, 0.0), 1), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn xz_form_matches_direct_evaluation() {
        use crate::weierstrass::meeks;
        let d = meeks(c(0.0, 1.0), 1).unwrap();
        let vf = xz_from_data(&d).unwrap();
        assert!(check_isotropy(&vf).pass);
        for z in [c(0.3, 0.8), c(-1.7, 0.2), c(2.5, -3.0)] {
            let direct = Vec4C(d.xz(z));
            let summed = vf.eval(z);
            assert!((direct - summed).norm_max() <= 1e-9 * direct.norm_max().max(1.0));
        }
    }

    #[test]
    fn obstruction_at_c_two() {
        let r = two_end_obstruction(2.0).unwrap();
        assert!((r.v1u1 - c(-32.0 / 5.0, 0.0)).norm() < 1e-9);
        assert!((r.v1u1bar - c(-2.0 / 5.0, 0.0)).norm() < 1e-9);
        assert!((r.u1_norm2 - 50.0).abs() < 1e-9);
        assert!((r.alpha1 + 17.0 / 5.0).abs() < 1e-9);
        assert!((r.beta2 - 3.0).abs() < 1e-9);
        assert!(!r.feasible);
    }
}
