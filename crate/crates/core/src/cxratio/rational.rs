use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ext::ExtComplex;
use super::poly::Poly;
use super::roots::{roots, RootCluster};
use crate::error::{Error, Result};

/// Relative coefficient threshold used for local valuations and common-root
/// detection.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Rational map `num/den` of the Riemann sphere to itself, kept reduced
/// (no common roots) with a monic denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
}

/// Laurent expansion `Σ_j coeffs[j]·u^{order + j}` around a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub order: i64,
    pub coeffs: Vec<Complex64>,
}

impl Laurent {
    /// Coefficient of `u^k`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.order {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs
            .get((k - self.order) as usize)
            .copied()
            .unwrap_or_default()
    }
}

/// A zero (positive order) or pole (negative order) on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Divisor {
    pub point: ExtComplex,
    pub order: i64,
    /// Root-cluster spread from the root finder (0 for exact points).
    pub spread: f64,
}

impl RationalMap {
    /// Reduces `num/den` by cancelling common roots and makes `den` monic.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalMap {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let (num, den) = cancel_common(num, den)?;
        Ok(Self::new_coprime(num, den))
    }

    /// Builds from parts already known to be coprime, only normalizing the
    /// denominator.
    pub(crate) fn new_coprime(num: Poly, den: Poly) -> Self {
        let lc = den.leading();
        if lc == Complex64::new(1.0, 0.0) {
            return RationalMap { num, den };
        }
        // exact 1 in front, so normalizing again is the identity
        let mut d: Vec<Complex64> = den.coeffs().iter().map(|c| c / lc).collect();
        if let Some(last) = d.last_mut() {
            *last = Complex64::new(1.0, 0.0);
        }
        RationalMap {
            num: Poly::new(num.coeffs().iter().map(|c| c / lc).collect()),
            den: Poly::new(d),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalMap {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        RationalMap::from_poly(Poly::constant(c))
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        RationalMap::from_poly(Poly::monomial(Complex64::new(1.0, 0.0), 1))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree() == 0 && self.den.degree() == 0
    }

    /// Topological degree `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    /// Order of vanishing at `∞` (negative for a pole).
    pub fn order_at_infinity(&self) -> i64 {
        self.den.degree() as i64 - self.num.degree() as i64
    }

    pub fn eval(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Finite(z) => self.eval_finite(z),
            ExtComplex::Infinity => {
                let (dn, dd) = (self.num.degree(), self.den.degree());
                if self.num.is_zero() || dn < dd {
                    ExtComplex::ZERO
                } else if dn > dd {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.num.leading() / self.den.leading())
                }
            }
        }
    }

    pub fn eval_finite(&self, z: Complex64) -> ExtComplex {
        // for large |z| evaluate through 1/z to avoid overflow
        if z.norm() > 1.0 {
            let w = z.inv();
            let (dn, dd) = (self.num.degree(), self.den.degree());
            let n = self.num.reversed(dn).eval(w);
            let d = self.den.reversed(dd).eval(w);
            let power = dd as i32 - dn as i32;
            if d == Complex64::new(0.0, 0.0) {
                return ExtComplex::Infinity;
            }
            let scale = if power >= 0 { w.powi(power) } else { z.powi(-power) };
            let v = n / d * scale;
            return if v.is_finite() {
                ExtComplex::Finite(v)
            } else {
                ExtComplex::Infinity
            };
        }
        let d = self.den.eval(z);
        if d == Complex64::new(0.0, 0.0) {
            return ExtComplex::Infinity;
        }
        let v = self.num.eval(z) / d;
        if v.is_finite() {
            ExtComplex::Finite(v)
        } else {
            ExtComplex::Infinity
        }
    }

    /// Value at a finite point, `∞` mapped to an infinite complex.
    pub fn value(&self, z: Complex64) -> Complex64 {
        match self.eval_finite(z) {
            ExtComplex::Finite(v) => v,
            ExtComplex::Infinity => Complex64::new(f64::INFINITY, 0.0),
        }
    }

    /// Zeros and poles with multiplicity on the whole sphere.
    pub fn zeros_poles(&self) -> Result<Vec<Divisor>> {
        if self.num.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut out = Vec::new();
        let push = |out: &mut Vec<Divisor>, rs: Vec<RootCluster>, sign: i64| {
            for r in rs {
                out.push(Divisor {
                    point: ExtComplex::Finite(r.center),
                    order: sign * r.multiplicity as i64,
                    spread: r.spread,
                });
            }
        };
        if self.num.degree() > 0 {
            push(&mut out, roots(&self.num)?, 1);
        }
        if self.den.degree() > 0 {
            push(&mut out, roots(&self.den)?, -1);
        }
        let at_inf = self.order_at_infinity();
        if at_inf != 0 {
            out.push(Divisor {
                point: ExtComplex::Infinity,
                order: at_inf,
                spread: 0.0,
            });
        }
        Ok(out)
    }

    /// Finite poles with multiplicity.
    pub fn finite_poles(&self) -> Result<Vec<RootCluster>> {
        if self.den.degree() == 0 {
            return Ok(Vec::new());
        }
        roots(&self.den)
    }

    /// `f(u + a)` as a rational function of `u`.
    pub fn shifted(&self, a: Complex64) -> RationalMap {
        RationalMap::new_coprime(self.num.shift(a), self.den.shift(a))
    }

    /// `f(1/w)` as a rational function of `w`.
    pub fn at_infinity(&self) -> RationalMap {
        let n = self.num.degree().max(self.den.degree());
        RationalMap::new_coprime(self.num.reversed(n), self.den.reversed(n))
    }

    /// Coefficient of the 1-form `f(z)dz` in the chart `w = 1/z`, i.e.
    /// `-f(1/w)/w²`.
    pub fn form_at_infinity(&self) -> RationalMap {
        let g = self.at_infinity();
        let den = &g.den * &Poly::monomial(Complex64::new(1.0, 0.0), 2);
        RationalMap::new_coprime(-&g.num, den)
    }

    /// Local representative around `p`: `f(u + p)` for finite `p` and
    /// `f(1/u)` at infinity.
    pub fn local_function(&self, p: ExtComplex) -> RationalMap {
        match p {
            ExtComplex::Finite(a) => self.shifted(a),
            ExtComplex::Infinity => self.at_infinity(),
        }
    }

    /// Local representative of the 1-form `f dz` around `p`.
    pub fn local_form(&self, p: ExtComplex) -> RationalMap {
        match p {
            ExtComplex::Finite(a) => self.shifted(a),
            ExtComplex::Infinity => self.form_at_infinity(),
        }
    }

    /// Order of `self` at `u = 0` (zero order positive, pole negative);
    /// `None` for the zero map.
    pub fn order_at_origin(&self) -> Option<i64> {
        let vn = self.num.valuation(DEFAULT_TOL)?;
        let vd = self.den.valuation(DEFAULT_TOL).unwrap_or(0);
        Some(vn as i64 - vd as i64)
    }

    /// Order of the function at `p`.
    pub fn order_at(&self, p: ExtComplex) -> Option<i64> {
        self.local_function(p).order_at_origin()
    }

    /// Pole order of the 1-form `f dz` at `p` (0 when holomorphic there).
    pub fn form_pole_order(&self, p: ExtComplex) -> usize {
        match self.local_form(p).order_at_origin() {
            Some(o) if o < 0 => (-o) as usize,
            _ => 0,
        }
    }

    /// Laurent expansion at `u = 0` with `terms` coefficients.
    pub fn laurent_at_origin(&self, terms: usize) -> Laurent {
        let Some(vn) = self.num.valuation(DEFAULT_TOL) else {
            return Laurent {
                order: 0,
                coeffs: vec![Complex64::new(0.0, 0.0); terms],
            };
        };
        let vd = self.den.valuation(DEFAULT_TOL).unwrap_or(0);
        let n = self.num.strip_low(vn);
        let d = self.den.strip_low(vd);
        // power series division n/d, d(0) ≠ 0
        let d0 = d.coeff(0);
        let mut q = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = n.coeff(k);
            for j in 1..=k.min(d.degree()) {
                acc -= d.coeff(j) * q[k - j];
            }
            q.push(acc / d0);
        }
        Laurent {
            order: vn as i64 - vd as i64,
            coeffs: q,
        }
    }

    /// Laurent expansion of the function around `p` in the local coordinate.
    pub fn laurent(&self, p: ExtComplex, terms: usize) -> Laurent {
        self.local_function(p).laurent_at_origin(terms)
    }

    /// Residue of `f(z)dz` at `p`. At `∞` the residue is defined so that
    /// all residues on the sphere sum to zero.
    pub fn residue(&self, p: ExtComplex) -> Complex64 {
        let local = self.local_form(p);
        let lo = match local.order_at_origin() {
            Some(o) if o < 0 => o,
            _ => return Complex64::new(0.0, 0.0),
        };
        let terms = (-lo) as usize;
        local.laurent_at_origin(terms).coeff(-1)
    }

    /// Quotient-rule derivative. The pole structure of the denominator is
    /// used directly so no cancellation step is needed: with
    /// `den = Π(z-p_i)^{k_i}` and square-free part `S = Π(z-p_i)`,
    /// `f' = (num'·S - num·T)/(den·S)` where `T = Σ k_i S/(z-p_i)`.
    pub fn derivative(&self) -> Result<RationalMap> {
        if self.den.degree() == 0 {
            return Ok(RationalMap::new_coprime(self.num.derivative(), self.den.clone()));
        }
        let poles = roots(&self.den)?;
        let centers: Vec<Complex64> = poles.iter().map(|r| r.center).collect();
        let s = Poly::from_roots(&centers);
        let mut t = Poly::zero();
        for (i, r) in poles.iter().enumerate() {
            let others: Vec<Complex64> = centers
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &c)| c)
                .collect();
            let term = Poly::from_roots(&others).scale(Complex64::new(r.multiplicity as f64, 0.0));
            t = &t + &term;
        }
        let num = &(&self.num.derivative() * &s) - &(&self.num * &t);
        let den = &self.den * &s;
        Ok(RationalMap::new_coprime(num, den))
    }

    /// `g(z) = conj(f(-1/conj z))`, the pullback under the antipodal
    /// involution followed by conjugation.
    pub fn involution_pullback(&self) -> RationalMap {
        let n = self.num.degree().max(self.den.degree());
        let num = self.num.conj_coeffs().negate_arg().reversed(n);
        let den = self.den.conj_coeffs().negate_arg().reversed(n);
        RationalMap::new_coprime(num, den)
    }

    /// `1/f`.
    pub fn recip(&self) -> Result<RationalMap> {
        if self.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RationalMap::new_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn add(&self, other: &RationalMap) -> Result<RationalMap> {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RationalMap::new(num, &self.den * &other.den)
    }

    pub fn sub(&self, other: &RationalMap) -> Result<RationalMap> {
        let num = &(&self.num * &other.den) - &(&other.num * &self.den);
        RationalMap::new(num, &self.den * &other.den)
    }

    pub fn mul(&self, other: &RationalMap) -> Result<RationalMap> {
        RationalMap::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &RationalMap) -> Result<RationalMap> {
        if other.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        RationalMap::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn scale(&self, c: Complex64) -> RationalMap {
        RationalMap::new_coprime(self.num.scale(c), self.den.clone())
    }

    pub fn add_constant(&self, c: Complex64) -> RationalMap {
        RationalMap::new_coprime(&self.num + &self.den.scale(c), self.den.clone())
    }

    /// Largest coefficient magnitude of numerator and denominator.
    pub fn coeff_scale(&self) -> f64 {
        self.num.max_abs().max(self.den.max_abs())
    }
}

fn cancel_common(mut num: Poly, mut den: Poly) -> Result<(Poly, Poly)> {
    if num.degree() == 0 || den.degree() == 0 {
        return Ok((num, den));
    }
    // exact zeros at the origin first
    let zn = num.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let zd = den.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let common = zn.min(zd);
    if common > 0 {
        num = num.strip_low(common);
        den = den.strip_low(common);
    }
    if num.degree() == 0 || den.degree() == 0 {
        return Ok((num, den));
    }
    for r in roots(&den)? {
        let mut k = 0;
        let mut d = num.clone();
        while k < r.multiplicity && d.degree() > 0 {
            let bound = d.eval_abs(r.center.norm()).max(f64::MIN_POSITIVE);
            if d.eval(r.center).norm() <= DEFAULT_TOL * bound {
                k += 1;
                d = d.derivative();
            } else {
                break;
            }
        }
        for _ in 0..k {
            num = num.deflate(r.center);
            den = den.deflate(r.center);
        }
        if num.degree() == 0 {
            break;
        }
    }
    Ok((num, den))
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |f: &mut fmt::Formatter<'_>, p: &Poly| -> fmt::Result {
            write!(f, "(")?;
            for (k, c) in p.coeffs().iter().enumerate() {
                if k > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({:.6}{:+.6}i)z^{}", c.re, c.im, k)?;
            }
            write!(f, ")")
        };
        show(f, &self.num)?;
        write!(f, " / ")?;
        show(f, &self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z() -> RationalMap {
        RationalMap::identity()
    }

    #[test]
    fn eval_identity_at_infinity() {
        assert_eq!(z().eval(ExtComplex::Infinity), ExtComplex::Infinity);
    }

    #[test]
    fn cancels_common_factor() {
        // (z-1)(z+2) / ((z-1)(z-3))
        let num = Poly::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let den = Poly::from_roots(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let f = RationalMap::new(num, den).unwrap();
        assert_eq!(f.num().degree(), 1);
        assert_eq!(f.den().degree(), 1);
        assert_eq!(f.degree(), 1);
    }

    #[test]
    fn residue_of_simple_pole() {
        let f = RationalMap::new(Poly::constant(c(0.0, 1.0)), Poly::from_real(&[0.0, 1.0])).unwrap();
        assert!((f.residue(ExtComplex::ZERO) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((f.residue(ExtComplex::Infinity) + c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn residue_double_poles() {
        // 1/(z^2 (z-c)^2), residue at 0 is 2/c^3
        let cc = c(1.7, 0.4);
        let den = &Poly::monomial(c(1.0, 0.0), 2) * &Poly::from_roots(&[cc, cc]);
        let f = RationalMap::new(Poly::one(), den).unwrap();
        let expect = 2.0 / cc.powi(3);
        assert!((f.residue(ExtComplex::ZERO) - expect).norm() < 1e-12);
        assert!((f.residue(ExtComplex::Finite(cc)) + expect).norm() < 1e-10);
    }

    #[test]
    fn derivative_of_reciprocal() {
        let f = RationalMap::new(Poly::one(), Poly::from_real(&[0.0, 1.0])).unwrap();
        let d = f.derivative().unwrap();
        for zz in [c(1.0, 0.0), c(0.3, -2.0)] {
            let expect = -1.0 / (zz * zz);
            assert!((d.value(zz) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_square() {
        let f = RationalMap::from_poly(Poly::from_real(&[0.0, 0.0, 1.0]));
        let d = f.derivative().unwrap();
        assert!((d.value(c(3.0, 0.0)) - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn involution_pullback_of_identity() {
        let g = z().involution_pullback();
        for zz in [c(1.0, 0.0), c(0.3, -2.0)] {
            assert!((g.value(zz) + zz.inv()).norm() < 1e-14);
        }
    }

    #[test]
    fn zeros_poles_of_reciprocal() {
        let f = RationalMap::new(Poly::one(), Poly::from_real(&[0.0, 1.0])).unwrap();
        let dv = f.zeros_poles().unwrap();
        assert_eq!(dv.len(), 2);
        assert!(dv.contains(&Divisor {
            point: ExtComplex::ZERO,
            order: -1,
            spread: 0.0
        }));
        assert!(dv.iter().any(|d| d.point == ExtComplex::Infinity && d.order == 1));
    }

    #[test]
    fn large_argument_eval_is_stable() {
        let f = RationalMap::new(Poly::from_real(&[1.0, 0.0, 0.0, 2.0]), Poly::from_real(&[0.0, 0.0, 1.0]))
            .unwrap();
        let v = f.value(c(1e200, 0.0));
        assert!((v.re / 2e200 - 1.0).abs() < 1e-12);
    }
}
