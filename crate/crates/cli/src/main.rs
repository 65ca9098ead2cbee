//! Command-line front end: read a polynomial system file, then solve for
//! its roots, extract a state-space realization, simulate the model on a
//! grid, or verify a previously emitted JSON report. Output is
//! deterministic: identical inputs and seed produce byte-identical text.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use polysolve_core::error::Error as CoreError;
use polysolve_core::linalg::column_echelon;
use polysolve_core::realization::{
    canonical_realization, cayley_hamilton_residual, commutation_residual, descriptor_split,
    simulate, verify_trajectory, DescriptorRealization, Realization, TrajectoryGrid,
};
use polysolve_core::solver::{analyze, Analysis, SolveConfig};
use polysolve_core::system::PolySystem;

/// A command failure carrying the process exit code to report.
struct Failure {
    code: u8,
    message: String,
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    fail(1, format!("error: {e}"))
}

#[derive(Parser)]
#[command(
    name = "polysolve",
    version,
    about = "Solve zero-dimensional polynomial systems and realize them as \
             multidimensional state-space models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the system for all roots, affine and at infinity.
    Solve {
        /// System file: a "vars:" header line, then one polynomial per line.
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Solve and extract a state-space realization of the root structure.
    Realize {
        /// System file: a "vars:" header line, then one polynomial per line.
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Realize and sample the model output on a grid, printed as CSV.
    Simulate {
        /// System file: a "vars:" header line, then one polynomial per line.
        file: PathBuf,
        /// Comma-separated per-variable grid extents, e.g. 5,5.
        extents: String,
        /// Comma-separated real initial state overriding the default.
        #[arg(long)]
        x0: Option<String>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Evaluate the roots of a JSON report against the system.
    Verify {
        /// System file: a "vars:" header line, then one polynomial per line.
        file: PathBuf,
        /// JSON report (as emitted by solve or realize --output json).
        roots: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Macaulay degree to start from (default: degree-sum heuristic).
    #[arg(long)]
    degree: Option<u32>,
    /// Cap for automatic degree escalation.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Rank tolerance for all rank decisions (default: machine policy).
    #[arg(long)]
    tol: Option<f64>,
    /// Residual above which a root is flagged, and the verify pass bound.
    #[arg(long, default_value_t = 1e-6)]
    residual_tol: f64,
    /// Radius for merging nearby raw roots into one multiple root.
    #[arg(long)]
    cluster_tol: Option<f64>,
    /// Seed for the internal random shift combination; root values do not
    /// depend on it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Report format for solve and realize; simulate and verify are text.
    #[arg(long, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputMode {
    Text,
    Json,
}

impl std::fmt::Display for OutputMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputMode::Text => "text",
            OutputMode::Json => "json",
        })
    }
}

impl CommonOpts {
    fn validate(&self) -> CmdResult<SolveConfig> {
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(fail(1, "error: --tol must be positive"));
            }
        }
        if !(self.residual_tol > 0.0) {
            return Err(fail(1, "error: --residual-tol must be positive"));
        }
        if let Some(t) = self.cluster_tol {
            if !(t > 0.0) {
                return Err(fail(1, "error: --cluster-tol must be positive"));
            }
        }
        if let (Some(d), Some(m)) = (self.degree, self.max_degree) {
            if d > m {
                return Err(fail(1, "error: --degree exceeds --max-degree"));
            }
        }
        Ok(SolveConfig {
            degree: self.degree,
            max_degree: self.max_degree,
            rank_tol: self.tol,
            residual_tol: self.residual_tol,
            cluster_tol: self.cluster_tol,
            seed: self.seed,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version land on stdout and exit clean; usage errors
            // are input errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve { file, opts } => cmd_solve(&file, &opts),
        Command::Realize { file, opts } => cmd_realize(&file, &opts),
        Command::Simulate {
            file,
            extents,
            x0,
            opts,
        } => cmd_simulate(&file, &extents, x0.as_deref(), &opts),
        Command::Verify { file, roots, opts } => cmd_verify(&file, &roots, &opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_system(path: &Path) -> CmdResult<PolySystem> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(1, format!("error: cannot read {}: {e}", path.display())))?;
    PolySystem::parse(&text).map_err(input_error)
}

fn run_analysis(sys: &PolySystem, config: &SolveConfig) -> CmdResult<Analysis> {
    analyze(sys, config).map_err(|e| match e {
        CoreError::NoStabilization { .. } => fail(2, format!("error: {e}")),
        other => input_error(other),
    })
}

/// Canonical realization of the affine part of a solved analysis.
fn build_realization(
    sys: &PolySystem,
    analysis: &Analysis,
    config: &SolveConfig,
) -> CmdResult<Realization> {
    if analysis.gap.regular_count == 0 {
        return Err(fail(
            3,
            "error: no affine roots; the behavior is purely at infinity and \
             has no canonical realization",
        ));
    }
    let d_star = analysis
        .gap
        .d_star
        .ok_or_else(|| fail(3, "error: rank pattern did not stabilize"))?;
    let h = column_echelon(analysis.z_regular.view(), config.rank_tol)
        .map_err(|e| fail(3, format!("error: {e}")))?;
    canonical_realization(&h, sys.num_vars(), d_star).map_err(|e| fail(3, format!("error: {e}")))
}

// ---------------------------------------------------------------------------
// Number formatting: everything is printed at 12 significant digits.

/// Round to 12 significant digits.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal form of the 12-significant-digit rounding; magnitudes
/// outside a readable window switch to scientific notation.
fn fmt_real(x: f64) -> String {
    let r = sig12(x);
    if r == 0.0 {
        "0".into()
    } else if r.abs() < 1e-4 || r.abs() >= 1e16 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Complex number for text output; the flag reports whether a nonzero
/// imaginary part below `realify_tol` was dropped.
fn fmt_complex(z: Complex64, realify_tol: f64) -> (String, bool) {
    if z.im == 0.0 {
        return (fmt_real(z.re), false);
    }
    if z.im.abs() < realify_tol {
        return (fmt_real(z.re), true);
    }
    let sign = if z.im < 0.0 { "-" } else { "+" };
    (
        format!("{}{sign}{}i", fmt_real(z.re), fmt_real(z.im.abs())),
        false,
    )
}

/// Residual for a root line; tiny values print as the bound they beat.
fn fmt_residual(r: f64) -> String {
    if r < 1e-10 {
        "<1e-10".into()
    } else {
        format!("{r:.3e}")
    }
}

/// A monomial rendered with the system's own variable names.
fn mono_string(exponents: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exponents.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{e}", names[i])),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

// ---------------------------------------------------------------------------
// JSON report, schema v1.

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl ComplexJson {
    fn of(z: Complex64) -> ComplexJson {
        ComplexJson {
            re: sig12(z.re),
            im: sig12(z.im),
        }
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: usize,
    degrees: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bezout: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct TolerancesJson {
    rank: f64,
    residual: f64,
    cluster: f64,
}

#[derive(Serialize, Deserialize)]
struct SolveJson {
    degree_used: u32,
    nullity: usize,
    #[serde(rename = "m_R")]
    m_r: usize,
    #[serde(rename = "m_S")]
    m_s: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_star: Option<u32>,
    tolerances: TolerancesJson,
}

#[derive(Serialize, Deserialize)]
struct RootJson {
    coords: Vec<ComplexJson>,
    homogeneous: bool,
    at_infinity: bool,
    multiplicity: usize,
    residual: f64,
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    #[serde(rename = "m_R")]
    m_r: usize,
    #[serde(rename = "m_S")]
    m_s: usize,
    #[serde(rename = "E0_nilpotency_residual")]
    e0_nilpotency_residual: f64,
}

#[derive(Serialize, Deserialize)]
struct RealizationJson {
    state_monomials: Vec<String>,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<ComplexJson>>>,
    c: Vec<ComplexJson>,
    x0: Vec<ComplexJson>,
    commutation_residual: f64,
    cayley_hamilton_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    descriptor: Option<DescriptorJson>,
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    version: String,
    system: SystemJson,
    solve: SolveJson,
    roots: Vec<RootJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    realization: Option<RealizationJson>,
}

fn matrix_json(m: &Array2<Complex64>) -> Vec<Vec<ComplexJson>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|&z| ComplexJson::of(z)).collect())
        .collect()
}

fn vector_json(v: &Array1<Complex64>) -> Vec<ComplexJson> {
    v.iter().map(|&z| ComplexJson::of(z)).collect()
}

fn report_json(sys: &PolySystem, analysis: &Analysis) -> ReportJson {
    let diag = &analysis.root_set.diagnostics;
    let roots = analysis
        .root_set
        .roots
        .iter()
        .map(|root| {
            let (coords, homogeneous) = match root.affine_coords() {
                Some(affine) => (affine, false),
                None => (root.point.coords().to_vec(), true),
            };
            RootJson {
                coords: coords.into_iter().map(ComplexJson::of).collect(),
                homogeneous,
                at_infinity: root.at_infinity,
                multiplicity: root.multiplicity,
                residual: sig12(root.residual),
            }
        })
        .collect();
    ReportJson {
        version: "v1".into(),
        system: SystemJson {
            n: sys.num_vars(),
            degrees: sys.degrees(),
            bezout: diag.bezout,
        },
        solve: SolveJson {
            degree_used: diag.degree_used,
            nullity: diag.nullity,
            m_r: analysis.gap.regular_count,
            m_s: analysis.gap.singular_count,
            d_star: analysis.gap.d_star,
            tolerances: TolerancesJson {
                rank: sig12(diag.rank_tol),
                residual: sig12(diag.residual_tol),
                cluster: sig12(diag.cluster_tol),
            },
        },
        roots,
        realization: None,
    }
}

fn realization_json(
    real: &Realization,
    sys: &PolySystem,
    comm: f64,
    ch: f64,
    descriptor: Option<&DescriptorRealization>,
) -> RealizationJson {
    let names = sys.variable_names();
    RealizationJson {
        state_monomials: real
            .state_monomials
            .iter()
            .map(|m| mono_string(m.exponents(), names))
            .collect(),
        a: real.a.iter().map(matrix_json).collect(),
        c: vector_json(&real.c),
        x0: vector_json(&real.x0),
        commutation_residual: sig12(comm),
        cayley_hamilton_residual: sig12(ch),
        descriptor: descriptor.map(|d| DescriptorJson {
            m_r: d.regular_dim,
            m_s: d.singular_dim,
            e0_nilpotency_residual: sig12(d.e0_nilpotency_residual),
        }),
    }
}

fn print_json(report: &ReportJson) -> CmdResult<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| fail(1, format!("error: cannot serialize report: {e}")))?;
    println!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// Text reports.

fn print_text_header(sys: &PolySystem, analysis: &Analysis) {
    let diag = &analysis.root_set.diagnostics;
    let degrees: Vec<String> = sys.degrees().iter().map(u32::to_string).collect();
    println!(
        "system: {} variables, {} equations, degrees [{}]",
        sys.num_vars(),
        sys.num_equations(),
        degrees.join(", ")
    );
    let d_star = match analysis.gap.d_star {
        Some(d) => d.to_string(),
        None => "-".into(),
    };
    println!(
        "degree used: {} (d* {}), nullity: {}, m_R: {}, m_S: {}",
        diag.degree_used, d_star, diag.nullity, analysis.gap.regular_count,
        analysis.gap.singular_count
    );
    println!(
        "tolerances: rank {:.3e}, residual {:.3e}, cluster {:.3e}",
        diag.rank_tol, diag.residual_tol, diag.cluster_tol
    );
}

fn print_text_roots(analysis: &Analysis, realify_tol: f64) {
    let mut realified = false;
    for (i, root) in analysis.root_set.roots.iter().enumerate() {
        let coords: Vec<Complex64> = match root.affine_coords() {
            Some(affine) => affine,
            None => root.point.coords().to_vec(),
        };
        let rendered: Vec<String> = coords
            .iter()
            .map(|&z| {
                let (s, flagged) = fmt_complex(z, realify_tol);
                realified |= flagged;
                s
            })
            .collect();
        let suffix = if root.at_infinity { " at infinity" } else { "" };
        println!(
            "root {}: ({}) mult {} residual {}{}",
            i + 1,
            rendered.join(", "),
            root.multiplicity,
            fmt_residual(root.residual),
            suffix
        );
    }
    if realified {
        println!("realified: imaginary parts below {realify_tol:e} shown as real");
    }
}

fn print_text_footer(analysis: &Analysis) {
    let diag = &analysis.root_set.diagnostics;
    if let Some(bezout) = diag.bezout {
        let affine: usize = analysis
            .root_set
            .roots
            .iter()
            .filter(|r| !r.at_infinity)
            .map(|r| r.multiplicity)
            .sum();
        let infinity: usize = analysis
            .root_set
            .roots
            .iter()
            .filter(|r| r.at_infinity)
            .map(|r| r.multiplicity)
            .sum();
        println!("bezout: {bezout} = {affine}+{infinity}");
    }
    for w in &diag.warnings {
        println!("warning: {w}");
    }
}

fn print_matrix(label: &str, m: &Array2<Complex64>, realify_tol: f64) {
    println!("{label}:");
    for i in 0..m.nrows() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|&z| fmt_complex(z, realify_tol).0)
            .collect();
        println!("  [{}]", row.join(", "));
    }
}

fn print_vector(label: &str, v: &Array1<Complex64>, realify_tol: f64) {
    let row: Vec<String> = v.iter().map(|&z| fmt_complex(z, realify_tol).0).collect();
    println!("{label}: [{}]", row.join(", "));
}

// ---------------------------------------------------------------------------
// Commands.

fn cmd_solve(file: &Path, opts: &CommonOpts) -> CmdResult<()> {
    let config = opts.validate()?;
    let sys = load_system(file)?;
    let analysis = run_analysis(&sys, &config)?;
    match opts.output {
        OutputMode::Json => print_json(&report_json(&sys, &analysis)),
        OutputMode::Text => {
            print_text_header(&sys, &analysis);
            print_text_roots(&analysis, opts.residual_tol);
            print_text_footer(&analysis);
            Ok(())
        }
    }
}

fn cmd_realize(file: &Path, opts: &CommonOpts) -> CmdResult<()> {
    let config = opts.validate()?;
    let sys = load_system(file)?;
    let analysis = run_analysis(&sys, &config)?;
    let real = build_realization(&sys, &analysis, &config)?;
    let descriptor = if analysis.gap.singular_count > 0 {
        Some(
            descriptor_split(&analysis, &sys, config.rank_tol)
                .map_err(|e| fail(3, format!("error: {e}")))?,
        )
    } else {
        None
    };
    let comm = commutation_residual(&real.a);
    let ch = cayley_hamilton_residual(&real, &sys).map_err(|e| fail(3, format!("error: {e}")))?;
    match opts.output {
        OutputMode::Json => {
            let mut report = report_json(&sys, &analysis);
            report.realization = Some(realization_json(
                &real,
                &sys,
                comm,
                ch,
                descriptor.as_ref(),
            ));
            print_json(&report)
        }
        OutputMode::Text => {
            let rt = opts.residual_tol;
            print_text_header(&sys, &analysis);
            print_text_roots(&analysis, rt);
            let names = sys.variable_names();
            let monos: Vec<String> = real
                .state_monomials
                .iter()
                .map(|m| mono_string(m.exponents(), names))
                .collect();
            println!("state monomials: {}", monos.join(", "));
            for (i, a) in real.a.iter().enumerate() {
                print_matrix(&format!("A{} ({})", i + 1, names[i]), a, rt);
            }
            print_vector("c", &real.c, rt);
            print_vector("x0", &real.x0, rt);
            println!("commutation residual: {comm:.3e}");
            println!("cayley-hamilton residual: {ch:.3e}");
            if let Some(d) = &descriptor {
                let down = match d.down_variable {
                    Some(j) => names[j - 1].clone(),
                    None => "-".into(),
                };
                println!(
                    "descriptor: m_R {}, m_S {}, down variable {}, \
                     ||E0^{}|| {:.3e}",
                    d.regular_dim,
                    d.singular_dim,
                    down,
                    d.singular_dim,
                    d.e0_nilpotency_residual
                );
                let e0 = d
                    .a0
                    .slice(s![d.regular_dim.., d.regular_dim..])
                    .to_owned();
                print_matrix("E0", &e0, rt);
                for i in 0..sys.num_vars() {
                    print_matrix(
                        &format!("E{} ({})", i + 1, names[i]),
                        &d.singular_block(i).to_owned(),
                        rt,
                    );
                }
            }
            print_text_footer(&analysis);
            Ok(())
        }
    }
}

fn parse_extents(text: &str, n: usize) -> CmdResult<Vec<usize>> {
    let extents: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| fail(1, format!("error: bad extents '{text}': {e}")))?;
    if extents.len() != n {
        return Err(fail(
            1,
            format!("error: {} extents for {} variables", extents.len(), n),
        ));
    }
    if extents.iter().any(|&e| e == 0) {
        return Err(fail(1, "error: extents must be at least 1"));
    }
    Ok(extents)
}

fn parse_x0(text: &str, dim: usize) -> CmdResult<Array1<Complex64>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| fail(1, format!("error: bad x0 '{text}': {e}")))?;
    if vals.len() != dim {
        return Err(fail(
            1,
            format!("error: x0 has {} entries for {} states", vals.len(), dim),
        ));
    }
    Ok(Array1::from_iter(
        vals.into_iter().map(|v| Complex64::new(v, 0.0)),
    ))
}

/// CSV rows sweep the last axis; earlier axes advance row by row in
/// row-major order.
fn print_grid_csv(grid: &TrajectoryGrid, realify_tol: f64) {
    let n = grid.extents.len();
    let row_len = grid.extents[n - 1];
    let flat: Vec<String> = grid
        .values
        .iter()
        .map(|&z| fmt_complex(z, realify_tol).0)
        .collect();
    for row in flat.chunks(row_len) {
        println!("{}", row.join(","));
    }
}

fn cmd_simulate(file: &Path, extents: &str, x0: Option<&str>, opts: &CommonOpts) -> CmdResult<()> {
    let config = opts.validate()?;
    let sys = load_system(file)?;
    let extents = parse_extents(extents, sys.num_vars())?;
    let analysis = run_analysis(&sys, &config)?;
    let mut real = build_realization(&sys, &analysis, &config)?;
    if let Some(text) = x0 {
        real.x0 = parse_x0(text, real.state_dim())?;
    }
    let grid = simulate(&real, &extents).map_err(input_error)?;
    print_grid_csv(&grid, opts.residual_tol);
    match verify_trajectory(&sys, &grid) {
        Ok(res) => println!("verification residual: {res:.3e}"),
        Err(CoreError::GridTooSmall { needed, .. }) => println!(
            "verification skipped: grid smaller than the equation window \
             ({needed} needed)"
        ),
        Err(e) => return Err(input_error(e)),
    }
    Ok(())
}

fn cmd_verify(file: &Path, roots: &Path, opts: &CommonOpts) -> CmdResult<()> {
    let _ = opts.validate()?;
    let sys = load_system(file)?;
    let text = fs::read_to_string(roots)
        .map_err(|e| fail(1, format!("error: cannot read {}: {e}", roots.display())))?;
    let report: ReportJson = serde_json::from_str(&text)
        .map_err(|e| fail(1, format!("error: malformed roots JSON: {e}")))?;
    if report.system.n != sys.num_vars() {
        return Err(fail(
            1,
            format!(
                "error: report is for {} variables, system has {}",
                report.system.n,
                sys.num_vars()
            ),
        ));
    }
    let hom = sys.homogenize();
    let mut worst = 0.0f64;
    for (ri, root) in report.roots.iter().enumerate() {
        let coords: Vec<Complex64> = root.coords.iter().map(ComplexJson::value).collect();
        let target = if root.homogeneous { &hom } else { &sys };
        if coords.len() != target.num_vars() {
            return Err(fail(
                1,
                format!(
                    "error: root {} has {} coordinates, expected {}",
                    ri + 1,
                    coords.len(),
                    target.num_vars()
                ),
            ));
        }
        let values = target.evaluate_all(&coords).map_err(input_error)?;
        for (ei, v) in values.iter().enumerate() {
            let r = v.norm();
            worst = worst.max(r);
            println!("root {} eq {}: residual {:.3e}", ri + 1, ei + 1, r);
        }
    }
    if worst <= opts.residual_tol {
        println!("verification passed: worst residual {worst:.3e}");
        Ok(())
    } else {
        Err(fail(
            4,
            format!(
                "error: verification failed: worst residual {:.3e} exceeds {:e}",
                worst, opts.residual_tol
            ),
        ))
    }
}
