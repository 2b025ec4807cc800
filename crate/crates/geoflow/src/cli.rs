//! Command-line front end: reproducible experiments over the library with
//! machine-readable CSV/JSON artifacts.
//!
//! Every run is deterministic: sampling uses the configured seed (default
//! 42) and every CSV starts with a `# config:` comment recording the fully
//! resolved parameters. Exit codes: 0 success, 1 numerical failure
//! (non-finite state), 2 validation failure.

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::algebra::CurvatureReport;
use crate::clebsch::{evolve_clebsch, ClebschState, ModeCoeff3};
use crate::error::{Error, Result};
use crate::euler2d::{equivalence_vs_geodesic, evolve, ModeCoeff2, SpectralField2D};
use crate::geodesic::{
    deviation_expansion, integrate_geodesic, reconstruct_group, semicircle_fit, DeviationModel,
    GroupPoint,
};
use crate::models::{
    eval_vect_s1, inertia_from_shape, make_affine2, make_sdiff_t2, make_so3, make_vect_s1,
    RigidBodySpec,
};
use crate::rigid::{cylinder_h_scan, sectional_table};

#[derive(Parser)]
#[command(name = "geoflow", version, about = "geodesic-flow experiments on metric Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate Euler's rigid-body equations and log conserved quantities
    RigidBody(RigidBodyArgs),
    /// Stability map / curvature table for a rigid body shape
    Stability(StabilityArgs),
    /// Hyperbolic half-plane geodesic with Killing charges and circle fit
    Halfplane(HalfplaneArgs),
    /// Curvature biquadratic report for a registered algebra
    Curvature(CurvatureArgs),
    /// Truncated Burgers geodesic vs method of characteristics
    Burgers(BurgersArgs),
    /// Spectral 2D Euler evolution with conservation logs
    Fluid2d(Fluid2dArgs),
    /// 3D Clebsch-variable Euler evolution diagnostics
    Clebsch(ClebschArgs),
    /// Geodesic-deviation fit vs curvature prediction
    Deviation(DeviationArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file mirroring the flags (flags win on conflict)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for any randomized sampling
    #[arg(long)]
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

/// Entry point used by the `geoflow` binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    if let Ok(threads) = std::env::var("GEOFLOW_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            // Ignore the error if a pool already exists (tests, repeat calls).
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::RigidBody(a) => run_rigid_body(a),
        Command::Stability(a) => run_stability(a),
        Command::Halfplane(a) => run_halfplane(a),
        Command::Curvature(a) => run_curvature(a),
        Command::Burgers(a) => run_burgers(a),
        Command::Fluid2d(a) => run_fluid2d(a),
        Command::Clebsch(a) => run_clebsch(a),
        Command::Deviation(a) => run_deviation(a),
    };
    match result {
        Ok(()) => 0,
        Err(Error::NonFiniteState { step }) => {
            eprintln!("error: non-finite state at step {step}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

// ---- shared plumbing ----

fn load_config<C: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<C> {
    match path {
        None => Ok(C::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn pick<T>(flag: Option<T>, cfg: Option<T>) -> Option<T> {
    flag.or(cfg)
}

fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing required parameter `{name}`")))
}

fn parse_f64_list(s: &str, expected: usize, name: &str) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|_| {
        Error::InvalidParameter(format!("could not parse `{name}` as comma-separated numbers"))
    })?;
    if expected > 0 && vals.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "`{name}` needs {expected} components, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

/// start:stop:step, endpoint-inclusive within 1e-12.
fn parse_scan(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParameter(
            "scan must be start:stop:step".into(),
        ));
    }
    let nums: std::result::Result<Vec<f64>, _> =
        parts.iter().map(|t| t.trim().parse::<f64>()).collect();
    let nums =
        nums.map_err(|_| Error::InvalidParameter("could not parse scan bounds".into()))?;
    Ok((nums[0], nums[1], nums[2]))
}

/// Runs `write` against the chosen sink; returns true when writing to a file
/// (summaries then go to stdout instead of stderr).
fn with_sink(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<bool> {
    match out {
        Some(p) => {
            let mut f = fs::File::create(p)?;
            write(&mut f)?;
            Ok(true)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            Ok(false)
        }
    }
}

fn emit_summary(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

// ---- rigid-body ----

#[derive(Args)]
struct RigidBodyArgs {
    /// Principal moments, e.g. 1,2,3
    #[arg(long = "G")]
    g: Option<String>,
    /// Initial angular velocity, e.g. 0.1,1,0
    #[arg(long)]
    v0: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RigidBodyCfg {
    g: Option<[f64; 3]>,
    v0: Option<[f64; 3]>,
    dt: Option<f64>,
    t_final: Option<f64>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct RigidBodyResolved {
    command: &'static str,
    g: [f64; 3],
    v0: [f64; 3],
    dt: f64,
    t_final: f64,
}

fn run_rigid_body(a: RigidBodyArgs) -> Result<()> {
    let cfg: RigidBodyCfg = load_config(&a.common.config)?;
    let g = match a.g {
        Some(s) => {
            let v = parse_f64_list(&s, 3, "G")?;
            [v[0], v[1], v[2]]
        }
        None => require(cfg.g, "G")?,
    };
    let v0 = match a.v0 {
        Some(s) => {
            let v = parse_f64_list(&s, 3, "v0")?;
            [v[0], v[1], v[2]]
        }
        None => require(cfg.v0, "v0")?,
    };
    let dt = pick(a.dt, cfg.dt).unwrap_or(1e-3);
    let t_final = pick(a.t_final, cfg.t_final).unwrap_or(10.0);
    let resolved = RigidBodyResolved {
        command: "rigid-body",
        g,
        v0,
        dt,
        t_final,
    };

    let algebra = make_so3(g[0], g[1], g[2])?;
    let v0_vec = DVector::from_vec(v0.to_vec());
    let mut traj = integrate_geodesic(&algebra, &v0_vec, dt, t_final)?;
    traj.log_velocity_invariant("l_squared", |v| {
        (g[0] * v[0]).powi(2) + (g[1] * v[1]).powi(2) + (g[2] * v[2]).powi(2)
    });
    let e_drift = traj.invariant_drift("energy").unwrap_or(0.0);
    let l_drift = traj.invariant_drift("l_squared").unwrap_or(0.0);

    let comment = format!("config: {}", serde_json::to_string(&resolved)?);
    let to_file = with_sink(&a.common.out, |w| traj.write_csv(&mut &mut *w, Some(&comment)))?;
    emit_summary(
        to_file,
        &format!("energy_drift={e_drift:.3e} l_squared_drift={l_drift:.3e}"),
    );
    Ok(())
}

// ---- stability ----

#[derive(Args)]
struct StabilityArgs {
    /// cylinder | box | ellipsoid
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Cylinder height scan start:stop:step (endpoint-inclusive)
    #[arg(long = "h-scan")]
    h_scan: Option<String>,
    /// Random planes sampled for the curvature minimum
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct StabilityCfg {
    shape: Option<String>,
    r: Option<f64>,
    h: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    h_scan: Option<String>,
    samples: Option<usize>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct StabilityResolved {
    command: &'static str,
    shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_scan: Option<String>,
    samples: usize,
    seed: u64,
}

fn run_stability(a: StabilityArgs) -> Result<()> {
    let cfg: StabilityCfg = load_config(&a.common.config)?;
    let shape = require(pick(a.shape, cfg.shape), "shape")?;
    let samples = pick(a.samples, cfg.samples).unwrap_or(10_000);
    let seed = pick(a.common.seed, cfg.seed).unwrap_or(42);
    let h_scan = pick(a.h_scan, cfg.h_scan);

    if let Some(scan) = h_scan {
        if shape != "cylinder" {
            return Err(Error::InvalidParameter(
                "--h-scan applies to cylinders only".into(),
            ));
        }
        let r = require(pick(a.r, cfg.r), "r")?;
        let (start, stop, step) = parse_scan(&scan)?;
        let rows = cylinder_h_scan(r, start, stop, step)?;
        let resolved = StabilityResolved {
            command: "stability",
            shape,
            r: Some(r),
            h: None,
            dims: None,
            h_scan: Some(scan),
            samples,
            seed,
        };
        let comment = format!("config: {}", serde_json::to_string(&resolved)?);
        with_sink(&a.common.out, |w| {
            writeln!(w, "# {comment}")?;
            writeln!(w, "h,K12,K23,K31,verdict")?;
            for row in &rows {
                writeln!(
                    w,
                    "{:.12e},{:.12e},{:.12e},{:.12e},{}",
                    row.h,
                    row.k12,
                    row.k23,
                    row.k31,
                    match row.verdict {
                        crate::rigid::Verdict::Stable => "stable",
                        crate::rigid::Verdict::Unstable => "unstable",
                    }
                )?;
            }
            Ok(())
        })?;
        return Ok(());
    }

    let (spec, dims) = match shape.as_str() {
        "cylinder" => {
            let r = require(pick(a.r, cfg.r), "r")?;
            let h = require(pick(a.h, cfg.h), "h")?;
            (RigidBodySpec::Cylinder { r, h }, None)
        }
        "box" => {
            let d = [
                require(pick(a.a, cfg.a), "a")?,
                require(pick(a.b, cfg.b), "b")?,
                require(pick(a.c, cfg.c), "c")?,
            ];
            (RigidBodySpec::Box { a: d[0], b: d[1], c: d[2] }, Some(d))
        }
        "ellipsoid" => {
            let d = [
                require(pick(a.a, cfg.a), "a")?,
                require(pick(a.b, cfg.b), "b")?,
                require(pick(a.c, cfg.c), "c")?,
            ];
            (RigidBodySpec::Ellipsoid { a: d[0], b: d[1], c: d[2] }, Some(d))
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown shape `{other}` (cylinder | box | ellipsoid)"
            )))
        }
    };
    let inertia = inertia_from_shape(&spec)?;
    let report = sectional_table(inertia.g[0], inertia.g[1], inertia.g[2], samples, seed)?;
    let resolved = StabilityResolved {
        command: "stability",
        shape,
        r: a.r.or(cfg.r),
        h: a.h.or(cfg.h),
        dims,
        h_scan: None,
        samples,
        seed,
    };
    with_sink(&a.common.out, |w| {
        let doc = serde_json::json!({
            "config": resolved,
            "inertia": inertia,
            "report": report,
        });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    })?;
    Ok(())
}

// ---- halfplane ----

#[derive(Args)]
struct HalfplaneArgs {
    /// Initial velocity, e.g. 0,1
    #[arg(long)]
    v0: Option<String>,
    /// Initial point x0,x1 with x0 > 0 (default 1,0)
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct HalfplaneCfg {
    v0: Option<[f64; 2]>,
    x0: Option<[f64; 2]>,
    dt: Option<f64>,
    t_final: Option<f64>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct HalfplaneResolved {
    command: &'static str,
    v0: [f64; 2],
    x0: [f64; 2],
    dt: f64,
    t_final: f64,
}

fn run_halfplane(a: HalfplaneArgs) -> Result<()> {
    let cfg: HalfplaneCfg = load_config(&a.common.config)?;
    let v0 = match a.v0 {
        Some(s) => {
            let v = parse_f64_list(&s, 2, "v0")?;
            [v[0], v[1]]
        }
        None => require(cfg.v0, "v0")?,
    };
    let x0 = match a.x0 {
        Some(s) => {
            let v = parse_f64_list(&s, 2, "x0")?;
            [v[0], v[1]]
        }
        None => cfg.x0.unwrap_or([1.0, 0.0]),
    };
    let dt = pick(a.dt, cfg.dt).unwrap_or(1e-3);
    let t_final = pick(a.t_final, cfg.t_final).unwrap_or(5.0);
    let resolved = HalfplaneResolved {
        command: "halfplane",
        v0,
        x0,
        dt,
        t_final,
    };

    let algebra = make_affine2()?;
    let traj = integrate_geodesic(&algebra, &DVector::from_vec(v0.to_vec()), dt, t_final)?;
    let rec = reconstruct_group(
        &algebra,
        &traj,
        &GroupPoint::HalfPlane { x0: x0[0], x1: x0[1] },
    )?;
    let (_, _, resid) = semicircle_fit(rec.group_points.as_ref().unwrap())?;
    let drifts: Vec<f64> = ["F0", "F1", "Fm1"]
        .iter()
        .map(|name| {
            let s = &rec.invariants[*name];
            s.iter().map(|v| (v - s[0]).abs()).fold(0.0f64, f64::max)
        })
        .collect();

    let comment = format!("config: {}", serde_json::to_string(&resolved)?);
    let to_file = with_sink(&a.common.out, |w| rec.write_csv(&mut &mut *w, Some(&comment)))?;
    emit_summary(
        to_file,
        &format!(
            "killing_drift_max={:.3e} semicircle_residual={resid:.3e}",
            drifts.iter().cloned().fold(0.0f64, f64::max)
        ),
    );
    Ok(())
}

// ---- curvature ----

#[derive(Args)]
struct CurvatureArgs {
    /// so3 | affine2 | vect_s1 | sdiff_t2
    #[arg(long)]
    algebra: Option<String>,
    /// so3: G1,G2,G3 — vect_s1/sdiff_t2: cutoff N
    #[arg(long)]
    params: Option<String>,
    /// Basis planes reported: (e_i, e_j) with i < j < max-basis
    #[arg(long = "max-basis")]
    max_basis: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CurvatureCfg {
    algebra: Option<String>,
    params: Option<String>,
    max_basis: Option<usize>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct CurvatureResolved {
    command: &'static str,
    algebra: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<String>,
    max_basis: usize,
}

fn run_curvature(a: CurvatureArgs) -> Result<()> {
    let cfg: CurvatureCfg = load_config(&a.common.config)?;
    let name = require(pick(a.algebra, cfg.algebra), "algebra")?;
    let params = pick(a.params, cfg.params);
    let max_basis = pick(a.max_basis, cfg.max_basis).unwrap_or(8);

    let algebra = match name.as_str() {
        "so3" => {
            let p = require(params.clone(), "params")?;
            let v = parse_f64_list(&p, 3, "params")?;
            make_so3(v[0], v[1], v[2])?
        }
        "affine2" => make_affine2()?,
        "vect_s1" => {
            let p = require(params.clone(), "params")?;
            let n: usize = p.trim().parse().map_err(|_| {
                Error::InvalidParameter("params must be the cutoff N".into())
            })?;
            make_vect_s1(n)?
        }
        "sdiff_t2" => {
            let p = require(params.clone(), "params")?;
            let n: usize = p.trim().parse().map_err(|_| {
                Error::InvalidParameter("params must be the cutoff N".into())
            })?;
            make_sdiff_t2(n)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown algebra `{other}` (so3 | affine2 | vect_s1 | sdiff_t2)"
            )))
        }
    };
    let report = CurvatureReport::for_basis_planes(&algebra, max_basis)?;
    let resolved = CurvatureResolved {
        command: "curvature",
        algebra: name,
        params,
        max_basis,
    };
    with_sink(&a.common.out, |w| {
        let doc = serde_json::json!({ "config": resolved, "report": report });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    })?;
    Ok(())
}

// ---- burgers ----

#[derive(Args)]
struct BurgersArgs {
    /// Fourier cutoff of the truncated flow
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Sample points for the comparison grid
    #[arg(long)]
    grid: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BurgersCfg {
    n: Option<usize>,
    t_final: Option<f64>,
    dt: Option<f64>,
    grid: Option<usize>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct BurgersResolved {
    command: &'static str,
    n: usize,
    t_final: f64,
    dt: f64,
    grid: usize,
}

/// Characteristic solution of ∂v/∂t + 3v∂v/∂x = 0, v(x,0) = sin x: Newton
/// inversion of x = ξ + 3 sin(ξ) t.
fn burgers_characteristic(x: f64, t: f64) -> f64 {
    let mut xi = x;
    for _ in 0..100 {
        let f = xi + 3.0 * t * xi.sin() - x;
        let df = 1.0 + 3.0 * t * xi.cos();
        let step = f / df;
        xi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    xi.sin()
}

fn run_burgers(a: BurgersArgs) -> Result<()> {
    let cfg: BurgersCfg = load_config(&a.common.config)?;
    let n = pick(a.n, cfg.n).unwrap_or(32);
    let t_final = pick(a.t_final, cfg.t_final).unwrap_or(0.2);
    let dt = pick(a.dt, cfg.dt).unwrap_or(1e-3);
    let grid = pick(a.grid, cfg.grid).unwrap_or(256);

    // Shock time for v₀ = sin x: t* = 1/(3·max(−v₀′)) = 1/3; refuse runs
    // close enough to the shock that characteristics become unreliable.
    let t_star = 1.0 / 3.0;
    if t_final >= 0.9 * t_star + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "T = {t_final} too close to the shock time t* = {t_star:.6}; need T < {:.6}",
            0.9 * t_star
        )));
    }
    let resolved = BurgersResolved {
        command: "burgers",
        n,
        t_final,
        dt,
        grid,
    };

    let algebra = make_vect_s1(n)?;
    let mut v0 = DVector::zeros(2 * n + 1);
    v0[2] = 1.0; // sin x
    let traj = integrate_geodesic(&algebra, &v0, dt, t_final)?;
    let last = traj.velocities.last().unwrap();

    let comment = format!("config: {}", serde_json::to_string(&resolved)?);
    let mut sup = 0.0f64;
    let to_file = with_sink(&a.common.out, |w| {
        writeln!(w, "# {comment}")?;
        writeln!(w, "x,v_spectral,v_characteristics,abs_err")?;
        for i in 0..grid {
            let x = std::f64::consts::TAU * i as f64 / grid as f64;
            let vs = eval_vect_s1(last, x);
            let vc = burgers_characteristic(x, t_final);
            let err = (vs - vc).abs();
            sup = sup.max(err);
            writeln!(w, "{x:.12e},{vs:.12e},{vc:.12e},{err:.12e}")?;
        }
        Ok(())
    })?;
    emit_summary(to_file, &format!("sup_error={sup:.3e}"));
    Ok(())
}

// ---- fluid2d ----

#[derive(Args)]
struct Fluid2dArgs {
    #[arg(long = "N")]
    n: Option<i64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// JSON file: [{"k":[1,0],"re":0.5,"im":0.0}, ...]
    #[arg(long)]
    init: Option<PathBuf>,
    /// Also run the generic-geodesic oracle (requires N <= 4)
    #[arg(long = "check-equivalence")]
    check_equivalence: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Fluid2dCfg {
    n: Option<i64>,
    t_final: Option<f64>,
    dt: Option<f64>,
    init: Option<PathBuf>,
    check_equivalence: Option<bool>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Fluid2dResolved {
    command: &'static str,
    n: i64,
    t_final: f64,
    dt: f64,
    init: PathBuf,
    check_equivalence: bool,
}

fn run_fluid2d(a: Fluid2dArgs) -> Result<()> {
    let cfg: Fluid2dCfg = load_config(&a.common.config)?;
    let n = pick(a.n, cfg.n).unwrap_or(8);
    let t_final = pick(a.t_final, cfg.t_final).unwrap_or(1.0);
    let dt = pick(a.dt, cfg.dt).unwrap_or(1e-3);
    let init = require(pick(a.init, cfg.init), "init")?;
    let check = a.check_equivalence || cfg.check_equivalence.unwrap_or(false);
    let resolved = Fluid2dResolved {
        command: "fluid2d",
        n,
        t_final,
        dt,
        init: init.clone(),
        check_equivalence: check,
    };

    let modes: Vec<ModeCoeff2> = serde_json::from_str(&fs::read_to_string(&init)?)?;
    let state = SpectralField2D::from_modes(n, &modes)?;
    let tracked: Vec<(i64, i64)> = modes.iter().map(|m| (m.k[0], m.k[1])).collect();
    let series = evolve(&state, dt, t_final)?;

    let comment = format!("config: {}", serde_json::to_string(&resolved)?);
    let to_file = with_sink(&a.common.out, |w| series.write_csv(&mut &mut *w, &tracked, Some(&comment)))?;
    let mut summary = format!(
        "energy_drift={:.3e} enstrophy_drift={:.3e}",
        series.energy_drift(),
        series.enstrophy_drift()
    );
    if check {
        let dev = equivalence_vs_geodesic(n, &state, dt, t_final)?;
        summary.push_str(&format!(" geodesic_deviation={dev:.3e}"));
    }
    emit_summary(to_file, &summary);
    Ok(())
}

// ---- clebsch ----

#[derive(Args)]
struct ClebschArgs {
    /// Grid points per axis
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// JSON file: {"p": [modes...], "q": [modes...]}
    #[arg(long)]
    init: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ClebschCfg {
    n: Option<usize>,
    t_final: Option<f64>,
    dt: Option<f64>,
    init: Option<PathBuf>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClebschInit {
    p: Vec<ModeCoeff3>,
    q: Vec<ModeCoeff3>,
}

#[derive(Serialize)]
struct ClebschResolved {
    command: &'static str,
    n: usize,
    t_final: f64,
    dt: f64,
    init: PathBuf,
}

fn run_clebsch(a: ClebschArgs) -> Result<()> {
    let cfg: ClebschCfg = load_config(&a.common.config)?;
    let n = pick(a.n, cfg.n).unwrap_or(16);
    let t_final = pick(a.t_final, cfg.t_final).unwrap_or(0.5);
    let dt = pick(a.dt, cfg.dt).unwrap_or(1e-3);
    let init = require(pick(a.init, cfg.init), "init")?;
    let resolved = ClebschResolved {
        command: "clebsch",
        n,
        t_final,
        dt,
        init: init.clone(),
    };

    let data: ClebschInit = serde_json::from_str(&fs::read_to_string(&init)?)?;
    let state = ClebschState::from_modes(n, &data.p, &data.q)?;
    let (series, _) = evolve_clebsch(&state, dt, t_final)?;

    let comment = format!("config: {}", serde_json::to_string(&resolved)?);
    let to_file = with_sink(&a.common.out, |w| series.write_csv(&mut &mut *w, Some(&comment)))?;
    emit_summary(
        to_file,
        &format!(
            "energy_drift={:.3e} max_div={:.3e} max_curl_disc={:.3e}",
            series.energy_drift(),
            series.div_sup.iter().cloned().fold(0.0f64, f64::max),
            series.curl_disc.iter().cloned().fold(0.0f64, f64::max),
        ),
    );
    Ok(())
}

// ---- deviation ----

#[derive(Args)]
struct DeviationArgs {
    /// affine2 | so3-biinvariant
    #[arg(long)]
    model: Option<String>,
    /// Perturbation direction (2 or 3 components)
    #[arg(long)]
    u: Option<String>,
    /// Base velocity (2 or 3 components)
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    /// Metric scale for the bi-invariant so(3) model
    #[arg(long = "G")]
    g: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DeviationCfg {
    model: Option<String>,
    u: Option<Vec<f64>>,
    v: Option<Vec<f64>>,
    eps: Option<f64>,
    g: Option<f64>,
    #[allow(dead_code)] // accepted in every config file; only sampling commands read it
    seed: Option<u64>,
}

#[derive(Serialize)]
struct DeviationResolved {
    command: &'static str,
    model: String,
    u: Vec<f64>,
    v: Vec<f64>,
    eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<f64>,
}

fn run_deviation(a: DeviationArgs) -> Result<()> {
    let cfg: DeviationCfg = load_config(&a.common.config)?;
    let model_name = require(pick(a.model, cfg.model), "model")?;
    let (model, algebra, dim, g) = match model_name.as_str() {
        "affine2" => (DeviationModel::Affine2, make_affine2()?, 2, None),
        "so3-biinvariant" => {
            let g = pick(a.g, cfg.g).unwrap_or(1.0);
            (DeviationModel::So3BiInvariant, make_so3(g, g, g)?, 3, Some(g))
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown model `{other}` (affine2 | so3-biinvariant)"
            )))
        }
    };
    let u = match a.u {
        Some(s) => parse_f64_list(&s, dim, "u")?,
        None => require(cfg.u, "u")?,
    };
    let v = match a.v {
        Some(s) => parse_f64_list(&s, dim, "v")?,
        None => require(cfg.v, "v")?,
    };
    if u.len() != dim || v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: if u.len() != dim { u.len() } else { v.len() },
        });
    }
    let u_vec = DVector::from_vec(u.clone());
    let v_vec = DVector::from_vec(v.clone());
    let v_norm = algebra.inner(&v_vec, &v_vec)?.sqrt();
    if v_norm == 0.0 {
        return Err(Error::InvalidParameter("v must be nonzero".into()));
    }
    let eps = pick(a.eps, cfg.eps).unwrap_or(1e-4 * v_norm);
    let resolved = DeviationResolved {
        command: "deviation",
        model: model_name,
        u: u.clone(),
        v: v.clone(),
        eps,
        g,
    };

    let t_max = 0.1 / v_norm;
    let t_grid: Vec<f64> = (1..=20).map(|i| t_max * i as f64 / 20.0).collect();
    let (coef_a, coef_b) = deviation_expansion(&algebra, model, &v_vec, &u_vec, eps, &t_grid)?;
    let r = algebra.curvature_biquadratic(&u_vec, &v_vec)?;
    let predicted = -r / 3.0;
    let rel_err = if predicted.abs() > 0.0 {
        (coef_b - predicted).abs() / predicted.abs()
    } else {
        coef_b.abs()
    };
    with_sink(&a.common.out, |w| {
        let doc = serde_json::json!({
            "config": resolved,
            "fit": { "quadratic": coef_a, "curvature_coefficient": coef_b },
            "biquadratic_r": r,
            "predicted_coefficient": predicted,
            "relative_error": rel_err,
        });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    })?;
    Ok(())
}

// ---- quick checks for tiny helpers (full runs live in tests/cli.rs) ----
