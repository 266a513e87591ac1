//! The Weierstrass-data file format: UTF-8 JSON, version 1.
//!
//! ```json
//! {
//!   "version": 1,
//!   "phi": {"num": [[0, 0], [1, 0]], "den": [[1, 0]]},
//!   "psi": {"num": [[-1, 0]], "den": [[0, 0], [1, 0]]},
//!   "dh":  {"num": [[1, 0]], "den": [[1, 0]]},
//!   "punctures": [[0, 0], "inf"],
//!   "involution": "none",
//!   "metadata": ""
//! }
//! ```
//!
//! Non-rational data uses `{"callable": "essential", "params": {"p": 2}}`
//! for each of `phi`, `psi` and `dh`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cxratio::{ExtComplex, Poly, RationalMap};
use crate::error::{Error, Result};
use crate::weierstrass::{CallableData, CallableKind, SurfaceData, WeierstrassData};

pub const WDF_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WdfFunction {
    Rational { num: Vec<[f64; 2]>, den: Vec<[f64; 2]> },
    Callable(CallableKind),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WdfPoint {
    Finite([f64; 2]),
    Named(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WdfInvolution {
    Antipodal,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WdfDocument {
    pub version: u32,
    pub phi: WdfFunction,
    pub psi: WdfFunction,
    pub dh: WdfFunction,
    pub punctures: Vec<WdfPoint>,
    pub involution: WdfInvolution,
    #[serde(default)]
    pub metadata: String,
}

fn pairs(p: &Poly) -> Vec<[f64; 2]> {
    p.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

fn function(f: &RationalMap) -> WdfFunction {
    WdfFunction::Rational {
        num: pairs(f.num()),
        den: pairs(f.den()),
    }
}

fn point(p: &ExtComplex) -> WdfPoint {
    match p {
        ExtComplex::Finite(z) => WdfPoint::Finite([z.re, z.im]),
        ExtComplex::Infinity => WdfPoint::Named("inf".into()),
    }
}

impl WdfDocument {
    pub fn from_data(data: &SurfaceData, metadata: &str) -> Self {
        let (phi, psi, dh, punctures, inv) = match data {
            SurfaceData::Rational(d) => (
                function(&d.phi),
                function(&d.psi),
                function(&d.h),
                &d.punctures,
                d.involution_antipodal,
            ),
            SurfaceData::Callable(c) => (
                WdfFunction::Callable(c.kind),
                WdfFunction::Callable(c.kind),
                WdfFunction::Callable(c.kind),
                &c.punctures,
                c.involution_antipodal,
            ),
        };
        WdfDocument {
            version: WDF_VERSION,
            phi,
            psi,
            dh,
            punctures: punctures.iter().map(point).collect(),
            involution: if inv { WdfInvolution::Antipodal } else { WdfInvolution::None },
            metadata: metadata.to_string(),
        }
    }

    pub fn to_data(&self) -> Result<SurfaceData> {
        if self.version != WDF_VERSION {
            return Err(Error::Format(format!("unsupported version {}", self.version)));
        }
        let punctures = self
            .punctures
            .iter()
            .map(|p| match p {
                WdfPoint::Finite([re, im]) if re.is_finite() && im.is_finite() => Ok(ExtComplex::new(*re, *im)),
                WdfPoint::Finite(_) => Err(Error::Format("puncture coordinates must be finite".into())),
                WdfPoint::Named(s) if s == "inf" => Ok(ExtComplex::Infinity),
                WdfPoint::Named(s) => Err(Error::Format(format!("unknown puncture {s:?}; use [re, im] or \"inf\""))),
            })
            .collect::<Result<Vec<_>>>()?;
        let antipodal = self.involution == WdfInvolution::Antipodal;
        match (&self.phi, &self.psi, &self.dh) {
            (WdfFunction::Callable(a), WdfFunction::Callable(b), WdfFunction::Callable(c)) => {
                if a != b || b != c {
                    return Err(Error::Format("phi, psi and dh must name the same callable family".into()));
                }
                let d = CallableData::new(*a)?;
                if !punctures.is_empty() && punctures != d.punctures {
                    return Err(Error::Format(format!(
                        "callable family {:?} has punctures 0 and inf",
                        a
                    )));
                }
                if antipodal != d.involution_antipodal {
                    return Err(Error::Format("callable family involution flag does not match".into()));
                }
                Ok(SurfaceData::Callable(d))
            }
            (phi, psi, dh) => {
                let phi = rational(phi, "phi")?;
                let psi = rational(psi, "psi")?;
                let h = rational(dh, "dh")?;
                Ok(SurfaceData::Rational(WeierstrassData::new(phi, psi, h, punctures, antipodal)?))
            }
        }
    }
}

fn rational(f: &WdfFunction, name: &str) -> Result<RationalMap> {
    let WdfFunction::Rational { num, den } = f else {
        return Err(Error::Format(format!("{name}: cannot mix callable and rational entries")));
    };
    let poly = |v: &[[f64; 2]], part: &str| -> Result<Poly> {
        if v.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("{name}.{part}: coefficients must be finite")));
        }
        Ok(Poly::new(v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()))
    };
    RationalMap::new(poly(num, "num")?, poly(den, "den")?)
}

pub fn to_wdf_string(data: &SurfaceData, metadata: &str) -> Result<String> {
    Ok(serde_json::to_string_pretty(&WdfDocument::from_data(data, metadata))?)
}

pub fn parse_wdf(text: &str) -> Result<(SurfaceData, String)> {
    let doc: WdfDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    Ok((doc.to_data()?, doc.metadata))
}

pub fn read_wdf(path: &Path) -> Result<(SurfaceData, String)> {
    parse_wdf(&std::fs::read_to_string(path)?)
}

pub fn write_wdf(path: &Path, data: &SurfaceData, metadata: &str) -> Result<()> {
    let mut text = to_wdf_string(data, metadata)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::{catalog, CatalogParams, CATALOG_NAMES};

    #[test]
    fn catalog_round_trips() {
        for name in CATALOG_NAMES {
            let params = CatalogParams {
                lambda: Some(Complex64::new(0.0, 1.0)),
                eps: Some(0.1),
                ..Default::default()
            };
            let d = catalog(name, &params).unwrap();
            let text = to_wdf_string(&d, name).unwrap();
            let (back, meta) = parse_wdf(&text).unwrap();
            assert_eq!(back, d, "{name}");
            assert_eq!(meta, name);
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_version = r#"{"version": 2, "phi": {"num": [[1,0]], "den": [[1,0]]},
            "psi": {"num": [[1,0]], "den": [[1,0]]}, "dh": {"num": [[1,0]], "den": [[1,0]]},
            "punctures": [], "involution": "none"}"#;
        assert!(matches!(parse_wdf(bad_version), Err(Error::Format(_))));
        assert!(matches!(parse_wdf("{"), Err(Error::Format(_))));
        let bad_point = r#"{"version": 1, "phi": {"num": [[0,0],[1,0]], "den": [[1,0]]},
            "psi": {"num": [[0,0],[2,0]], "den": [[1,0]]}, "dh": {"num": [[1,0]], "den": [[1,0]]},
            "punctures": ["north"], "involution": "none"}"#;
        assert!(matches!(parse_wdf(bad_point), Err(Error::Format(_))));
    }

    #[test]
    fn callable_entries() {
        let text = r#"{"version": 1,
            "phi": {"callable": "essential", "params": {"p": 2}},
            "psi": {"callable": "essential", "params": {"p": 2}},
            "dh": {"callable": "essential", "params": {"p": 2}},
            "punctures": [[0, 0], "inf"], "involution": "antipodal"}"#;
        let (d, _) = parse_wdf(text).unwrap();
        assert!(matches!(d, SurfaceData::Callable(_)));
    }
}
