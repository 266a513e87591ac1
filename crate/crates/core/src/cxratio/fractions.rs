//! Partial-fraction sums over the basis `(z-p)^{-k}` and `z^k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::RationalMap;
use super::roots::roots;
use crate::error::Result;

/// Relative distance under which two pole centers are the same basis point.
pub const CENTER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `(z - center)^{-power}`, `power ≥ 1`
    Pole { center: Complex64, power: u32 },
    /// `z^power`, `power ≥ 0`
    Mono { power: u32 },
}

impl Basis {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            Basis::Pole { center, power } => (z - center).powi(-(power as i32)),
            Basis::Mono { power } => z.powi(power as i32),
        }
    }

    fn same(&self, other: &Basis) -> bool {
        match (*self, *other) {
            (Basis::Mono { power: a }, Basis::Mono { power: b }) => a == b,
            (Basis::Pole { center: p, power: a }, Basis::Pole { center: q, power: b }) => {
                a == b && same_center(p, q)
            }
            _ => false,
        }
    }
}

pub(crate) fn same_center(p: Complex64, q: Complex64) -> bool {
    (p - q).norm() <= CENTER_TOL * p.norm().max(q.norm()).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionTerm {
    pub basis: Basis,
    pub coeff: Complex64,
}

/// A finite linear combination of basis fractions with merged duplicates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FractionSum {
    pub terms: Vec<FractionTerm>,
}

impl FractionSum {
    pub fn new() -> Self {
        FractionSum { terms: Vec::new() }
    }

    pub fn single(basis: Basis, coeff: Complex64) -> Self {
        let mut s = FractionSum::new();
        s.push(basis, coeff);
        s
    }

    pub fn push(&mut self, basis: Basis, coeff: Complex64) {
        if let Some(t) = self.terms.iter_mut().find(|t| t.basis.same(&basis)) {
            t.coeff += coeff;
        } else {
            self.terms.push(FractionTerm { basis, coeff });
        }
    }

    pub fn add_assign(&mut self, other: &FractionSum) {
        for t in &other.terms {
            self.push(t.basis, t.coeff);
        }
    }

    pub fn scale(&self, c: Complex64) -> FractionSum {
        FractionSum {
            terms: self
                .terms
                .iter()
                .map(|t| FractionTerm {
                    basis: t.basis,
                    coeff: t.coeff * c,
                })
                .collect(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.coeff * t.basis.eval(z)).sum()
    }

    /// Coefficient of the basis element (zero if absent).
    pub fn coeff(&self, basis: Basis) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.basis.same(&basis))
            .map(|t| t.coeff)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    /// Product, re-expanded into the same basis.
    pub fn mul(&self, other: &FractionSum) -> FractionSum {
        let mut out = FractionSum::new();
        for a in &self.terms {
            for b in &other.terms {
                let c = a.coeff * b.coeff;
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (basis, k) in basis_product(a.basis, b.basis) {
                    out.push(basis, c * k);
                }
            }
        }
        out
    }

    /// Terms sorted for stable output: monomials by power, then poles by
    /// center (re, im) and power.
    pub fn sorted(&self) -> Vec<FractionTerm> {
        let mut t = self.terms.clone();
        t.sort_by(|a, b| key(&a.basis).partial_cmp(&key(&b.basis)).unwrap());
        t
    }
}

fn key(b: &Basis) -> (u8, f64, f64, u32) {
    match *b {
        Basis::Mono { power } => (0, 0.0, 0.0, power),
        Basis::Pole { center, power } => (1, center.re, center.im, power),
    }
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expansion of the product of two basis elements.
fn basis_product(a: Basis, b: Basis) -> Vec<(Basis, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    match (a, b) {
        (Basis::Mono { power: j }, Basis::Mono { power: k }) => {
            vec![(Basis::Mono { power: j + k }, one)]
        }
        (Basis::Pole { center, power }, Basis::Mono { power: k })
        | (Basis::Mono { power: k }, Basis::Pole { center, power }) => {
            pole_times_mono(center, power, k)
        }
        (Basis::Pole { center: p, power: a }, Basis::Pole { center: q, power: b }) => {
            if same_center(p, q) {
                return vec![(Basis::Pole { center: p, power: a + b }, one)];
            }
            let delta = p - q;
            let mut out = Vec::new();
            // (z-p)^{-a}(z-q)^{-b}: expand (u + δ)^{-b} about u = z - p
            for i in 1..=a {
                let n = a - i;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * binom(b + n - 1, n) * delta.powi(-((b + n) as i32));
                out.push((Basis::Pole { center: p, power: i }, c));
            }
            for j in 1..=b {
                let n = b - j;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * binom(a + n - 1, n) * (-delta).powi(-((a + n) as i32));
                out.push((Basis::Pole { center: q, power: j }, c));
            }
            out
        }
    }
}

/// `(z-p)^{-a} z^k` with `z^k = Σ C(k,n) p^{k-n} (z-p)^n`.
fn pole_times_mono(p: Complex64, a: u32, k: u32) -> Vec<(Basis, Complex64)> {
    let mut out = Vec::new();
    for n in 0..=k {
        let c = binom(k, n) * p.powi((k - n) as i32);
        if n < a {
            out.push((Basis::Pole { center: p, power: a - n }, c));
        } else {
            // (z-p)^e expanded back into monomials
            let e = n - a;
            for j in 0..=e {
                let cj = binom(e, j) * (-p).powi((e - j) as i32);
                out.push((Basis::Mono { power: j }, c * cj));
            }
        }
    }
    out
}

/// Partial-fraction decomposition of a rational map. Nearby denominator
/// roots that cannot be resolved surface as a clustering error from the
/// root finder.
pub fn partial_fractions(f: &RationalMap) -> Result<FractionSum> {
    let mut out = FractionSum::new();
    let (q, _) = f.num().div_rem(f.den());
    for (k, &c) in q.coeffs().iter().enumerate() {
        if c != Complex64::new(0.0, 0.0) {
            out.push(Basis::Mono { power: k as u32 }, c);
        }
    }
    if f.den().degree() == 0 || f.is_zero() {
        return Ok(out);
    }
    for r in roots(f.den())? {
        let k = r.multiplicity;
        let num = f.num().shift(r.center);
        // the k lowest coefficients of the shifted denominator vanish
        let den = f.den().shift(r.center).strip_low(k);
        let series = series_div(&num, &den, k);
        for (j, c) in series.into_iter().enumerate() {
            // u^{j-k}
            let power = (k - j) as u32;
            out.push(Basis::Pole { center: r.center, power }, c);
        }
    }
    Ok(out)
}

/// First `terms` coefficients of the power series `n/d`, `d(0) ≠ 0`.
fn series_div(n: &Poly, d: &Poly, terms: usize) -> Vec<Complex64> {
    let d0 = d.coeff(0);
    let mut q: Vec<Complex64> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut acc = n.coeff(k);
        for j in 1..=k.min(d.degree()) {
            acc -= d.coeff(j) * q[k - j];
        }
        q.push(acc / d0);
    }
    q
}

/// Re-sums a fraction sum into a rational map over the common denominator.
pub fn to_rational(s: &FractionSum) -> Result<RationalMap> {
    let mut acc = RationalMap::constant(Complex64::new(0.0, 0.0));
    for t in &s.terms {
        let f = match t.basis {
            Basis::Mono { power } => RationalMap::from_poly(Poly::monomial(t.coeff, power as usize)),
            Basis::Pole { center, power } => {
                let den = Poly::from_roots(&vec![center; power as usize]);
                RationalMap::new(Poly::constant(t.coeff), den)?
            }
        };
        acc = acc.add(&f)?;
    }
    Ok(acc)
}
