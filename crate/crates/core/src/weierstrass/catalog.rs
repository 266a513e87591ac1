use num_complex::Complex64;

use super::callable::{CallableData, CallableKind};
use super::data::WeierstrassData;
use super::SurfaceData;
use crate::cxratio::{ExtComplex, Poly, RationalMap};
use crate::error::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Parameters accepted by [`catalog`]; unused fields are ignored.
#[derive(Clone, Debug, Default)]
pub struct CatalogParams {
    pub lambda: Option<Complex64>,
    pub m: Option<u32>,
    pub eps: Option<f64>,
    pub p: Option<u32>,
}

pub const CATALOG_NAMES: [&str; 5] = ["meeks", "epsilon_family", "essential", "section4_candidate", "rejected_m2"];

pub fn catalog(name: &str, params: &CatalogParams) -> Result<SurfaceData> {
    let missing = |what: &str| Error::InvalidParameter(format!("{name} needs parameter {what}"));
    match name {
        "meeks" => {
            let lambda = params.lambda.ok_or_else(|| missing("lambda"))?;
            let m = params.m.unwrap_or(1);
            Ok(SurfaceData::Rational(meeks(lambda, m)?))
        }
        "epsilon_family" | "epsilon" => {
            let eps = params.eps.ok_or_else(|| missing("eps"))?;
            Ok(SurfaceData::Rational(epsilon_family(eps)?))
        }
        "essential" => {
            let p = params.p.unwrap_or(2);
            Ok(SurfaceData::Callable(essential(p)?))
        }
        "section4_candidate" | "section4" => Ok(SurfaceData::Rational(section4_candidate()?)),
        "rejected_m2" => Ok(SurfaceData::Rational(rejected_m2(&default_m2_denominator())?)),
        _ => Err(Error::InvalidParameter(format!(
            "unknown catalog entry '{name}' (known: {})",
            CATALOG_NAMES.join(", ")
        ))),
    }
}

/// `φ = z^{2m}(z-λ)/(z-λ̄)`, `ψ = (1+λ̄z)/((1+λz)z^{2m})`,
/// `dh = i(z-λ̄)(1+λz)dz/z²` on `ℂ \ {0}`.
pub fn meeks(lambda: Complex64, m: u32) -> Result<WeierstrassData> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("meeks needs |λ| = 1, got |λ| = {}", lambda.norm())));
    }
    if (lambda - 1.0).norm() < 1e-12 || (lambda + 1.0).norm() < 1e-12 {
        return Err(Error::InvalidParameter("meeks needs λ ≠ ±1".into()));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("meeks needs m ≥ 1".into()));
    }
    let one = c(1.0, 0.0);
    let z2m = Poly::monomial(one, 2 * m as usize);
    let lb = lambda.conj();
    let phi = RationalMap::new(&z2m * &Poly::new(vec![-lambda, one]), Poly::new(vec![-lb, one]))?;
    let psi = RationalMap::new(Poly::new(vec![one, lb]), &Poly::new(vec![one, lambda]) * &z2m)?;
    let h = RationalMap::new(
        (&Poly::new(vec![-lb, one]) * &Poly::new(vec![one, lambda])).scale(I),
        Poly::monomial(one, 2),
    )?;
    WeierstrassData::new(phi, psi, h, vec![ExtComplex::ZERO, ExtComplex::Infinity], true)
}

/// `Σ (-1)^k conj(a_k) z^{n-k}`, the denominator of `conj φ(-1/z̄)` when
/// `φ` has denominator `Σ a_k z^k` of degree `n`.
fn antipodal_denominator(a: &[Complex64]) -> Poly {
    let n = a.len() - 1;
    let mut q = vec![c(0.0, 0.0); n + 1];
    for (k, &ak) in a.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        q[n - k] = ak.conj() * sign;
    }
    Poly::new(q)
}

/// One-ended Möbius-strip data with a good singular end at `0`:
/// `φ = z(z-1)/P`, `ψ = conj φ(-1/z̄) = (z²+z³)/Q`, `dh = i P Q dz/z⁵`
/// with `P = z⁴ + (1+ε)z³ + √(2ε+ε²)`.
pub fn epsilon_family(eps: f64) -> Result<WeierstrassData> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon_family needs ε > 0, got {eps}")));
    }
    let a0 = (2.0 * eps + eps * eps).sqrt();
    let a = [c(a0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 + eps, 0.0), c(1.0, 0.0)];
    let b = [c(-1.0, 0.0), c(1.0, 0.0)];
    involution_family(1, &b, &a)
}

/// `φ = z^m (b_0 + b_1 z + …)/P`, `ψ = conj φ(-1/z̄)`, `dh = i P Q dz/z^{deg P + 1}`.
fn involution_family(m: usize, b: &[Complex64], a: &[Complex64]) -> Result<WeierstrassData> {
    let one = c(1.0, 0.0);
    let p = Poly::new(a.to_vec());
    let n = a.len() - 1;
    let q = antipodal_denominator(a);
    let phi = RationalMap::new(&Poly::monomial(one, m) * &Poly::new(b.to_vec()), p.clone())?;
    let psi = phi.involution_pullback();
    let psi = RationalMap::new(psi.num().clone(), psi.den().clone())?;
    let h = RationalMap::new((&p * &q).scale(I), Poly::monomial(one, n + 1))?;
    WeierstrassData::new(phi, psi, h, vec![ExtComplex::ZERO, ExtComplex::Infinity], true)
}

/// `P = z⁵ + 1`, for which `Re∮dh = 0`, so only `φψ dh` fails.
pub fn default_m2_denominator() -> [Complex64; 6] {
    [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
}

/// The `ind = 2` candidate `φ = z²/P`, `deg P = 5`; its `φψ dh = i dz/z`
/// breaks the vertical period condition.
pub fn rejected_m2(a: &[Complex64; 6]) -> Result<WeierstrassData> {
    if a[5].norm() == 0.0 {
        return Err(Error::InvalidParameter("rejected_m2 needs a_5 ≠ 0".into()));
    }
    involution_family(2, &[c(1.0, 0.0)], a)
}

/// Essential-singularity family with `p ≥ 2`.
pub fn essential(p: u32) -> Result<CallableData> {
    CallableData::new(CallableKind::Essential { p })
}

/// The two-ended candidate with ends `0, ∞, ±1`: `dh = (1/z³ - z + 16iz/(√3(z²-1)²))dz`,
/// `φ = -√3iz/((z²-1)² + 2ω²(z²+1))`, `ψ = -√3iz³/((z²-1)² + 2ωz²(z²+1))`.
pub fn section4_candidate() -> Result<WeierstrassData> {
    let s3 = 3f64.sqrt();
    let w = c(-0.5, s3 / 2.0);
    let w2 = w * w;
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let phi = RationalMap::new(
        Poly::new(vec![zero, -s3 * I]),
        Poly::new(vec![one + 2.0 * w2, zero, 2.0 * w2 - 2.0, zero, one]),
    )?;
    let psi = RationalMap::new(
        Poly::new(vec![zero, zero, zero, -s3 * I]),
        Poly::new(vec![one, zero, 2.0 * w - 2.0, zero, one + 2.0 * w]),
    )?;
    let z2m1_sq = Poly::from_real(&[1.0, 0.0, -2.0, 0.0, 1.0]);
    let part1 = RationalMap::new(Poly::from_real(&[1.0, 0.0, 0.0, 0.0, -1.0]), Poly::monomial(one, 3))?;
    let part2 = RationalMap::new(Poly::monomial(16.0 / s3 * I, 1), z2m1_sq)?;
    let h = part1.add(&part2)?;
    WeierstrassData::new(
        phi,
        psi,
        h,
        vec![ExtComplex::ZERO, ExtComplex::Infinity, ExtComplex::new(1.0, 0.0), ExtComplex::new(-1.0, 0.0)],
        true,
    )
}
