//! Command-line front end for the `stationary` library.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use stationary::quadcurv::{in_pi, integrate_curvature, CurvatureIntegral, QuadratureConfig};
use stationary::singscan::{scan_singular_points, ScanGrid, ScanReport};
use stationary::surface_mesh::{export_obj, integrate_surface, DomainSpec, Projection};
use stationary::wdf::{read_wdf, to_wdf_string};
use stationary::weierstrass::{
    catalog, check_periods_with, check_regularity, classify_all, total_curvature, CatalogParams, CurvatureReport,
    EndReport, PeriodReport, RegularityReport, SurfaceData, PERIOD_TOL,
};
use stationary::nonorientable::{check_involution, flux_vanishing_check, FluxReport, InvolutionReport};
use stationary::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stationary", version, about = "Weierstrass data tools for stationary surfaces in Lorentz 4-space")]
pub struct Cli {
    /// Tolerance on period residuals.
    #[arg(long, global = true, default_value_t = PERIOD_TOL)]
    pub tol: f64,
    /// Suppress the human-readable report.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Print a JSON document instead of the text report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a catalog entry as a WDF file.
    Catalog(CatalogArgs),
    /// Run the full validation pipeline.
    Validate(ValidateArgs),
    /// Total curvature by index formulas and/or quadrature.
    Curvature(CurvatureArgs),
    /// Search for singular points φ = conj ψ.
    Scan(ScanArgs),
    /// Integrate the surface over a domain and export OBJ + CSV.
    Mesh(MeshArgs),
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    pub name: String,
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub p: Option<u32>,
    /// Output path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub skip_scan: bool,
    /// Scan grid size per chart (N×N).
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Index,
    Quad,
    Both,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    #[arg(long, default_value_t = 1e-3)]
    pub inner_radius: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// CSV output path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChartArg {
    Annulus,
    Disk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProjectArg {
    DropX4,
    Stereographic,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ChartArg::Annulus)]
    pub chart: ChartArg,
    #[arg(long, default_value_t = 0.5)]
    pub r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 64)]
    pub n_r: usize,
    #[arg(long, default_value_t = 128)]
    pub n_theta: usize,
    /// Start point of the path integration (default 1 on an annulus,
    /// r_max/2 on a disk).
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub base: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ProjectArg::DropX4)]
    pub project: ProjectArg,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Export even when validation fails.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

/// Failure of a command: `Usage` maps to exit code 2, `Math` to 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Format(_) | Error::Io(_) | Error::Json(_) | Error::NonRational(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    quiet: bool,
    json: bool,
}

impl Io<'_> {
    fn say(&mut self, line: &str) {
        if !self.quiet && !self.json {
            let _ = writeln!(self.out, "{line}");
        }
    }

    fn emit_json(&mut self, v: &Value) {
        if self.json {
            let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).unwrap_or_default());
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io {
        out,
        quiet: cli.quiet,
        json: cli.json,
    };
    let result = match &cli.command {
        Command::Catalog(a) => cmd_catalog(a, &mut io),
        Command::Validate(a) => cmd_validate(a, cli.tol, &mut io),
        Command::Curvature(a) => cmd_curvature(a, &mut io),
        Command::Scan(a) => cmd_scan(a, &mut io),
        Command::Mesh(a) => cmd_mesh(a, cli.tol, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Math(m)) => {
            let _ = writeln!(err, "failed: {m}");
            EXIT_FAIL
        }
    }
}

fn load(path: &Path) -> Result<(SurfaceData, String), Failure> {
    read_wdf(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// `x·π` as a rational multiple of π when within 1e-6 of one with
/// denominator at most 12, else as a decimal.
pub fn format_pi(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}π");
    }
    for q in 1..=12i64 {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= 1e-6 {
            let p = p as i64;
            return match (p, q) {
                (0, _) => "0".to_string(),
                (1, 1) => "π".to_string(),
                (-1, 1) => "-π".to_string(),
                (p, 1) => format!("{p}π"),
                (p, q) => format!("{p}π/{q}"),
            };
        }
    }
    format!("{x:.6}π")
}

fn cmd_catalog(a: &CatalogArgs, io: &mut Io) -> Result<i32, Failure> {
    let lambda = a.lambda.as_ref().map(|v| Complex64::new(v[0], v[1]));
    let params = CatalogParams {
        lambda,
        m: a.m,
        eps: a.eps,
        p: a.p,
    };
    let data = catalog(&a.name, &params).map_err(|e| Failure::Usage(e.to_string()))?;
    let metadata = catalog_metadata(&a.name, &params);
    let text = to_wdf_string(&data, &metadata)?;
    match &a.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            io.say(&format!("wrote {} ({})", path.display(), a.name));
            io.emit_json(&json!({"name": a.name, "output": path}));
        }
        None => {
            let _ = write!(io.out, "{text}");
        }
    }
    Ok(EXIT_OK)
}

fn catalog_metadata(name: &str, p: &CatalogParams) -> String {
    let mut parts = vec![format!("catalog {name}")];
    if let Some(l) = p.lambda {
        parts.push(format!("lambda={} {}", l.re, l.im));
    }
    if let Some(m) = p.m {
        parts.push(format!("m={m}"));
    }
    if let Some(e) = p.eps {
        parts.push(format!("eps={e}"));
    }
    if let Some(q) = p.p {
        parts.push(format!("p={q}"));
    }
    parts.join(" ")
}

/// Outcome of the validation pipeline. The verdict is the conjunction of
/// the stage verdicts; `failures` names the stages that did not pass.
#[derive(Debug, Default)]
pub struct ValidationSummary {
    pub regularity: Option<RegularityReport>,
    pub periods: Option<PeriodReport>,
    pub involution: Option<InvolutionReport>,
    pub flux: Option<FluxReport>,
    pub ends: Vec<EndReport>,
    pub curvature: Option<CurvatureReport>,
    pub quadrature: Option<CurvatureIntegral>,
    pub scan: Option<ScanReport>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationSummary {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn to_json(&self) -> Value {
        json!({
            "pass": self.pass(),
            "failures": self.failures,
            "notes": self.notes,
            "regularity": self.regularity,
            "periods": self.periods,
            "involution": self.involution,
            "flux": self.flux,
            "ends": self.ends,
            "curvature": self.curvature,
            "quadrature": self.quadrature,
            "scan": self.scan,
        })
    }
}

/// Runs regularity → periods → involution → ends → curvature → scan.
pub fn validate(data: &SurfaceData, tol: f64, scan_grid: Option<usize>) -> stationary::Result<ValidationSummary> {
    let mut s = ValidationSummary::default();
    match data {
        SurfaceData::Rational(d) => {
            let reg = check_regularity(d)?;
            if !reg.pass {
                let mut why = Vec::new();
                for p in &reg.coincident_poles {
                    why.push(format!("φ and ψ share a pole at {p}"));
                }
                for m in &reg.dh_mismatches {
                    why.push(format!("dh has order {} at {} where {} is required", m.found, m.point, m.expected));
                }
                for p in &reg.stray_poles {
                    why.push(format!("x_z dz has a pole at {p} off the ends"));
                }
                s.failures.push(format!("regularity: {}", why.join("; ")));
            }
            s.regularity = Some(reg);

            let per = check_periods_with(d, tol)?;
            for e in per.failing() {
                if !e.horizontal_ok {
                    s.failures.push(format!(
                        "horizontal period condition at {}: |∮φdh + conj ∮ψdh| = {:.3e}",
                        e.point, e.horizontal
                    ));
                }
                if !e.vertical_ok {
                    s.failures.push(format!(
                        "vertical period condition at {}: Re∮dh = {:.6}, Re∮φψdh = {:.6} = {}",
                        e.point,
                        e.re_period_h,
                        e.re_period_phipsi_h,
                        format_pi(in_pi(e.re_period_phipsi_h))
                    ));
                }
            }
            s.periods = Some(per);

            if d.involution_antipodal {
                let inv = check_involution(d)?;
                if !inv.symmetric {
                    s.failures.push(format!(
                        "involution: antipodal symmetry fails (residuals {:.3e}, {:.3e}, {:.3e})",
                        inv.phi_symmetry_residual, inv.psi_symmetry_residual, inv.dh_symmetry_residual
                    ));
                } else {
                    match flux_vanishing_check(d) {
                        Ok(f) => s.flux = Some(f),
                        Err(e) => s.notes.push(format!("flux: {e}")),
                    }
                }
                s.involution = Some(inv);
            }

            match classify_all(d) {
                Ok(ends) => s.ends = ends,
                Err(e) => s.failures.push(format!("ends: {e}")),
            }
            match total_curvature(d) {
                Ok(c) => {
                    if !c.agreement {
                        s.failures.push(format!(
                            "curvature: index formulas disagree ({}, {}, {})",
                            c.by_deg_phi, c.by_deg_psi, c.by_jorge_meeks
                        ));
                    }
                    s.curvature = Some(c);
                }
                Err(e) => s.failures.push(format!("curvature: {e}")),
            }
        }
        SurfaceData::Callable(c) => {
            s.notes.push(format!(
                "non-rational data ({}): residue-based stages skipped, curvature by quadrature",
                c.description()
            ));
            match integrate_curvature(data, &QuadratureConfig::default()) {
                Ok(q) => {
                    if !q.converged {
                        s.notes.push(format!("quadrature estimate {:.3e} above target", q.error_estimate));
                    }
                    s.quadrature = Some(q);
                }
                Err(e) => s.failures.push(format!("curvature: {e}")),
            }
        }
    }
    if let Some(n) = scan_grid {
        let rep = scan_singular_points(data, ScanGrid { n_r: n, n_theta: n })?;
        for p in rep.points.iter().take(4) {
            s.failures.push(format!(
                "regularity: singular point found at z = {} (φ = conj ψ = {}, residual {:.1e})",
                p.z, p.value_t, p.residual
            ));
        }
        if rep.points.len() > 4 {
            s.failures.push(format!("regularity: {} further singular points", rep.points.len() - 4));
        }
        s.scan = Some(rep);
    } else {
        s.notes.push("singular-point scan skipped".into());
    }
    Ok(s)
}

fn print_summary(s: &ValidationSummary, io: &mut Io) {
    if let Some(r) = &s.regularity {
        io.say(&format!("regularity   {}", pass_word(r.pass)));
    }
    if let Some(p) = &s.periods {
        io.say(&format!("periods      {} (tol {:e})", pass_word(p.pass), p.tol));
        for e in &p.ends {
            io.say(&format!(
                "  end {}: horizontal {:.2e}, Re∮dh {:.2e}, Re∮φψdh {:.2e}",
                e.point, e.horizontal, e.re_period_h, e.re_period_phipsi_h
            ));
        }
    }
    if let Some(i) = &s.involution {
        io.say(&format!("involution   {}", pass_word(i.symmetric)));
    }
    if let Some(f) = &s.flux {
        io.say(&format!("flux         {}", if f.pass { "zero at every end" } else { "nonzero" }));
    }
    for e in &s.ends {
        io.say(&format!(
            "  end {}: {:?} m={} n={} ind={} ind+={} ind10={} ind01={} d~={}",
            e.point, e.kind, e.m, e.n, e.ind, e.ind_plus, e.ind10, e.ind01, e.d_tilde
        ));
    }
    if let Some(c) = &s.curvature {
        io.say(&format!(
            "curvature    -∫K = {} (deg φ), {} (deg ψ), {} (Jorge–Meeks) on the cover",
            format_pi(c.by_deg_phi as f64),
            format_pi(c.by_deg_psi as f64),
            format_pi(c.by_jorge_meeks as f64)
        ));
        if let Some(q) = c.quotient_value {
            io.say(&format!("             -∫K = {} on the quotient", format_pi(q)));
        }
    }
    if let Some(q) = &s.quadrature {
        print_quad(q, io);
    }
    if let Some(r) = &s.scan {
        io.say(&format!(
            "scan         {} singular point(s) on a {}×{} grid",
            r.points.len(),
            r.grid.n_r,
            r.grid.n_theta
        ));
    }
    for n in &s.notes {
        io.say(&format!("note: {n}"));
    }
    for f in &s.failures {
        io.say(&format!("FAIL {f}"));
    }
    io.say(if s.pass() { "verdict: valid" } else { "verdict: invalid" });
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_validate(a: &ValidateArgs, tol: f64, io: &mut Io) -> Result<i32, Failure> {
    let (data, _) = load(&a.input)?;
    let grid = (!a.skip_scan).then_some(a.grid);
    let s = validate(&data, tol, grid)?;
    print_summary(&s, io);
    io.emit_json(&s.to_json());
    Ok(if s.pass() { EXIT_OK } else { EXIT_FAIL })
}

fn print_quad(q: &CurvatureIntegral, io: &mut Io) {
    io.say(&format!(
        "quadrature   -∫K = {} ± {:.2e}π, ∫K⊥ = {:.3e}π on the cover{}",
        format_pi(in_pi(q.total_k)),
        in_pi(q.error_estimate),
        in_pi(q.total_kperp),
        if q.converged { "" } else { " (not converged)" }
    ));
    if let (Some(k), Some(kp)) = (q.quotient_k(), q.quotient_kperp()) {
        io.say(&format!(
            "             -∫K = {} ± {:.2e}π, ∫K⊥ = {:.3e}π on the quotient",
            format_pi(in_pi(k)),
            in_pi(q.error_estimate / 2.0),
            in_pi(kp)
        ));
    }
}

fn cmd_curvature(a: &CurvatureArgs, io: &mut Io) -> Result<i32, Failure> {
    let (data, _) = load(&a.input)?;
    let mut out = json!({});
    let mut index_cover = None;
    if matches!(a.method, Method::Index | Method::Both) {
        match data.as_rational() {
            Some(d) => {
                let c = total_curvature(d)?;
                io.say(&format!(
                    "index        -∫K = {} (deg φ), {} (deg ψ), {} (Jorge–Meeks) on the cover",
                    format_pi(c.by_deg_phi as f64),
                    format_pi(c.by_deg_psi as f64),
                    format_pi(c.by_jorge_meeks as f64)
                ));
                if let Some(q) = c.quotient_value {
                    io.say(&format!("             -∫K = {} on the quotient", format_pi(q)));
                }
                index_cover = Some(c.by_deg_phi as f64);
                out["index"] = json!(c);
            }
            None if a.method == Method::Index => {
                return Err(Failure::Usage(
                    "index formulas need rational data; use --method quad for this input".into(),
                ));
            }
            None => io.say("index        skipped: non-rational data"),
        }
    }
    if matches!(a.method, Method::Quad | Method::Both) {
        let config = QuadratureConfig {
            inner_radius: a.inner_radius,
            ..QuadratureConfig::default()
        };
        let q = integrate_curvature(&data, &config)?;
        print_quad(&q, io);
        if let Some(ix) = index_cover {
            let diff = (in_pi(q.total_k) - ix).abs();
            let agree = diff <= in_pi(q.error_estimate).max(1e-6 * ix.abs());
            io.say(&format!(
                "agreement    |quad - index| = {diff:.3e}π ({})",
                if agree { "within estimate" } else { "outside estimate" }
            ));
            out["agreement"] = json!({"difference_in_pi": diff, "within_estimate": agree});
        }
        out["quadrature"] = json!(q);
    }
    io.emit_json(&out);
    Ok(EXIT_OK)
}

fn cmd_scan(a: &ScanArgs, io: &mut Io) -> Result<i32, Failure> {
    let (data, _) = load(&a.input)?;
    if a.grid < 3 {
        return Err(Failure::Usage(format!("--grid must be at least 3, got {}", a.grid)));
    }
    let rep = scan_singular_points(&data, ScanGrid { n_r: a.grid, n_theta: a.grid })?;
    let csv = rep.to_csv();
    match &a.output {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            io.say(&format!("{} singular point(s); wrote {}", rep.points.len(), path.display()));
        }
        None if !io.json => {
            let _ = write!(io.out, "{csv}");
        }
        None => {}
    }
    io.emit_json(&json!(rep));
    Ok(EXIT_OK)
}

fn cmd_mesh(a: &MeshArgs, tol: f64, io: &mut Io) -> Result<i32, Failure> {
    let (data, _) = load(&a.input)?;
    if a.n_r < 2 || a.n_theta < 3 {
        return Err(Failure::Usage("mesh needs --n-r ≥ 2 and --n-theta ≥ 3".into()));
    }
    if !a.force {
        let s = validate(&data, tol, Some(a.grid))?;
        if !s.pass() {
            return Err(Failure::Math(format!(
                "refusing to mesh invalid data (use --force): {}",
                s.failures.join("; ")
            )));
        }
    }
    let mut domain = match a.chart {
        ChartArg::Annulus => {
            if !(a.r_min > 0.0 && a.r_min < a.r_max) {
                return Err(Failure::Usage("annulus needs 0 < r_min < r_max".into()));
            }
            DomainSpec::annulus(a.r_min, a.r_max, a.n_r, a.n_theta)
        }
        ChartArg::Disk => {
            if a.r_max <= 0.0 {
                return Err(Failure::Usage("disk needs r_max > 0".into()));
            }
            DomainSpec::disk(a.r_max, a.n_r, a.n_theta)
        }
    };
    if let Some(b) = &a.base {
        domain.base_point = Complex64::new(b[0], b[1]);
    }
    let projection = match a.project {
        ProjectArg::DropX4 => Projection::DropX4,
        ProjectArg::Stereographic => Projection::StereographicX4,
    };
    let mesh = integrate_surface(&data, &domain)?;
    let (obj, csv) = export_obj(&mesh, projection, &a.output)?;
    io.say(&format!(
        "{} vertices; wrote {} and {}",
        mesh.points.len(),
        obj.display(),
        csv.display()
    ));
    io.emit_json(&json!({"vertices": mesh.points.len(), "obj": obj, "csv": csv}));
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_formatting() {
        assert_eq!(format_pi(6.0), "6π");
        assert_eq!(format_pi(1.5), "3π/2");
        assert_eq!(format_pi(-1.0), "-π");
        assert_eq!(format_pi(0.0), "0");
        assert_eq!(format_pi(2.0 + 3e-7), "2π");
        assert_eq!(format_pi(0.123456789), "0.123457π");
    }

    #[test]
    fn unknown_catalog_name_is_usage_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["stationary", "catalog", "nope"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["stationary", "catalog", "meeks"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["stationary", "bogus"], &mut o, &mut e), EXIT_USAGE);
    }

    #[test]
    fn catalog_to_stdout_parses_back() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(["stationary", "catalog", "epsilon", "--eps", "0.1"], &mut o, &mut e);
        assert_eq!(code, EXIT_OK);
        let text = String::from_utf8(o).unwrap();
        let (d, meta) = stationary::wdf::parse_wdf(&text).unwrap();
        assert!(meta.contains("eps=0.1"));
        let a0 = d.as_rational().unwrap().phi.den().coeff(0);
        assert!((a0.re - 0.21f64.sqrt()).abs() < 1e-15);
    }
}
