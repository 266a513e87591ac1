use std::path::{Path, PathBuf};

use stationary::wdf::read_wdf;
use stationary::weierstrass::{catalog, CatalogParams};
use stationary_cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["stationary"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write_entry(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.wdf"));
    let p = path.to_str().unwrap();
    let mut full = vec!["catalog", name];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", p]);
    let o = cli(&full);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    path
}

fn fixture() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/rejected_m2.wdf")
}

#[test]
fn catalog_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], CatalogParams); 4] = [
        (
            "meeks",
            &["--lambda", "0", "1", "--m", "1"],
            CatalogParams {
                lambda: Some(num_complex::Complex64::new(0.0, 1.0)),
                m: Some(1),
                ..Default::default()
            },
        ),
        (
            "epsilon",
            &["--eps", "0.1"],
            CatalogParams {
                eps: Some(0.1),
                ..Default::default()
            },
        ),
        ("section4", &[], CatalogParams::default()),
        ("essential", &["--p", "3"], CatalogParams {
            p: Some(3),
            ..Default::default()
        }),
    ];
    for (name, args, params) in cases {
        let path = write_entry(dir.path(), name, args);
        let (back, meta) = read_wdf(&path).unwrap();
        assert_eq!(back, catalog(name, &params).unwrap(), "{name}");
        assert!(meta.starts_with(&format!("catalog {name}")));
    }
}

#[test]
fn fixture_matches_catalog_entry() {
    let (d, _) = read_wdf(Path::new(fixture())).unwrap();
    assert_eq!(d, catalog("rejected_m2", &CatalogParams::default()).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["catalog", "nope"]).code, EXIT_USAGE);
    assert_eq!(cli(&["catalog", "epsilon"]).code, EXIT_USAGE);
    assert_eq!(cli(&["catalog", "epsilon", "--eps", "-1"]).code, EXIT_USAGE);
    assert_eq!(cli(&["validate", "/no/such/file.wdf"]).code, EXIT_USAGE);
    assert_eq!(cli(&["curvature"]).code, EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.wdf");
    std::fs::write(&bad, "{\"version\": 2}").unwrap();
    let o = cli(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.err.contains("malformed"), "{}", o.err);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn validate_rejects_m2_on_the_vertical_period() {
    let o = cli(&["validate", "--skip-scan", fixture()]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.out.contains("vertical period condition"), "{}", o.out);
    assert!(o.out.contains("Re∮φψdh = -6.283185 = -2π"), "{}", o.out);
}

#[test]
fn validate_names_the_singular_point() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_entry(dir.path(), "section4", &[]);
    let o = cli(&["validate", "--grid", "128", f.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.out.contains("singular point found at z = 2.30787"), "{}", o.out);
}

#[test]
fn validate_json_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_entry(dir.path(), "meeks", &["--lambda", "0", "1"]);
    let o = cli(&["--json", "validate", "--grid", "64", f.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["curvature"]["quotient_value"], 6.0);
    assert_eq!(v["ends"].as_array().unwrap().len(), 2);
    assert_eq!(v["scan"]["points"].as_array().unwrap().len(), 0);
}

#[test]
fn quiet_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_entry(dir.path(), "meeks", &["--lambda", "0", "1"]);
    let o = cli(&["--quiet", "validate", "--skip-scan", f.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.out.is_empty());
}

#[test]
fn curvature_methods() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = write_entry(dir.path(), "meeks", &["--lambda", "0", "1", "--m", "2"]);
    let o = cli(&["curvature", "--method", "index", m2.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.out.contains("-∫K = 10π on the quotient"), "{}", o.out);

    let eps = write_entry(dir.path(), "epsilon", &["--eps", "0.1"]);
    let o = cli(&["curvature", "--method", "both", eps.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.out.contains("agreement"), "{}", o.out);

    let ess = write_entry(dir.path(), "essential", &[]);
    let o = cli(&["curvature", "--method", "index", ess.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.err.contains("--method quad"), "{}", o.err);
    let o = cli(&["--json", "curvature", "--method", "quad", ess.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    let k = v["quadrature"]["total_k"].as_f64().unwrap() / 2.0;
    assert!((k / std::f64::consts::PI - 6.0).abs() < 0.12, "{k}");
}

#[test]
fn scan_csv() {
    let dir = tempfile::tempdir().unwrap();
    let eps = write_entry(dir.path(), "epsilon", &["--eps", "0.01"]);
    let o = cli(&["scan", "--grid", "128", eps.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.out.trim(), "z_re,z_im,residual,m,n,kind");

    let s4 = write_entry(dir.path(), "section4", &[]);
    let csv = dir.path().join("s4.csv");
    let o = cli(&["scan", "--grid", "128", s4.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5, "{text}");
}

#[test]
fn mesh_exports_and_refuses() {
    let dir = tempfile::tempdir().unwrap();
    let meeks = write_entry(dir.path(), "meeks", &["--lambda", "0", "1"]);
    let obj = dir.path().join("meeks.obj");
    let o = cli(&["mesh", "--grid", "64", meeks.to_str().unwrap(), "-o", obj.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 64 * 128);

    let eps = write_entry(dir.path(), "epsilon", &["--eps", "0.1"]);
    let obj = dir.path().join("eps.obj");
    let o = cli(&["mesh", "--grid", "64", "--project", "stereographic", eps.to_str().unwrap(), "-o", obj.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let csv = std::fs::read_to_string(dir.path().join("eps.csv")).unwrap();
    assert!(csv.lines().all(|l| l.split(',').count() == 7));

    let s4 = write_entry(dir.path(), "section4", &[]);
    let obj = dir.path().join("s4.obj");
    let o = cli(&["mesh", "--grid", "128", s4.to_str().unwrap(), "-o", obj.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.err.contains("singular point"), "{}", o.err);
    assert!(!obj.exists());
    let o = cli(&["mesh", "--force", s4.to_str().unwrap(), "--r-min", "1.2", "--r-max", "2", "--base", "0", "1.5", "-o", obj.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
}
