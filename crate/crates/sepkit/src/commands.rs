//! Command dispatch: wiring from parsed flags to the analysis library and
//! the exporters.

use std::path::{Path, PathBuf};

use sepkit_core::{
    bvp_separatrix_point, curvature_max_scan, escape_report, find_zeros, index_scan,
    integrate_batch, zdp_curve, BvpProblem, Complex64, Equilibrium, HolomorphicFunction,
    MethodError, Rectangle, SeparatrixCandidate, TimeDirection,
};

use crate::cli::{
    parse_bracket, parse_point, parse_segment, Cli, Command, MethodArg, OutputFormat,
};
use crate::config::{ConfigEcho, FileConfig, Merge, RunConfig};
use crate::output::{
    field_csv, trajectory_csv, CandidateJson, Document, EquilibriumJson, EscapeJson, PolylineJson,
};
use crate::svg::SvgCanvas;
use crate::CliError;

const ZERO_TOL: f64 = 1e-10;
const ZDP_REFINE_TOL: f64 = 1e-12;
const SCAN_BISECT_TOL: f64 = 1e-6;
const SVG_WIDTH_PX: f64 = 800.0;

pub fn run(cli: Cli) -> Result<u8, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let merge = Merge {
        file,
        rtol: cli.rtol,
        atol: cli.atol,
    };
    let quiet = cli.quiet;
    match cli.command {
        Command::Portrait {
            function,
            domain,
            grid,
            out,
            format,
        } => cmd_portrait(&merge, &function, domain.as_deref(), grid, out, format, quiet),
        Command::Field {
            function,
            domain,
            grid,
            out,
        } => cmd_field(&merge, &function, domain.as_deref(), grid, out, quiet),
        Command::Equilibria {
            function,
            domain,
            grid,
            out,
        } => cmd_equilibria(&merge, &function, domain.as_deref(), grid, out, quiet),
        Command::Separatrix {
            function,
            method,
            segment,
            epsilon,
            xstar,
            t1,
            bracket,
            seed,
            domain,
            grid,
            out,
        } => cmd_separatrix(
            &merge,
            &function,
            method,
            SeparatrixFlags {
                segment,
                epsilon,
                xstar,
                t1,
                bracket,
                seed,
                domain,
                grid,
                out,
            },
            quiet,
        ),
        Command::Escape {
            function,
            z0,
            tmax,
            out,
        } => cmd_escape(&merge, &function, &z0, tmax, out),
    }
}

fn parse_function(src: &str) -> Result<HolomorphicFunction, CliError> {
    Ok(HolomorphicFunction::parse(src)?)
}

fn require_domain(cfg: &RunConfig) -> Result<Rectangle, CliError> {
    cfg.domain
        .ok_or_else(|| CliError::usage("domain", "this command needs --domain"))
}

fn note(quiet: bool, message: &str) {
    if !quiet {
        eprintln!("{message}");
    }
}

fn csv_sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    out.with_file_name(format!("{stem}{suffix}"))
}

fn cmd_portrait(
    merge: &Merge,
    function: &str,
    domain: Option<&str>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    quiet: bool,
) -> Result<u8, CliError> {
    let cfg = merge.resolve(function, domain, grid, 10, 15.0)?;
    let domain = require_domain(&cfg)?;
    let f = parse_function(&cfg.function)?;
    let out = out.unwrap_or_else(|| PathBuf::from("portrait.svg"));

    let n = cfg.grid_n.max(2);
    let seeds: Vec<Complex64> = (0..n * n)
        .map(|idx| domain.grid_node(idx % n, idx / n, n))
        .collect();
    let trajectories = integrate_batch(&f, &seeds, TimeDirection::real_time(), &cfg.settings);
    let equilibria = find_zeros(&f, &domain, n.max(24), ZERO_TOL);

    let mut canvas = SvgCanvas::new(domain, SVG_WIDTH_PX);
    for traj in &trajectories {
        let points: Vec<Complex64> = traj.samples.iter().map(|&(_, z)| z).collect();
        canvas.polyline(&points, "trajectory", "#1f4e79");
        // One arrowhead at the midpoint sample shows the flow direction.
        let mid = traj.samples.len() / 2;
        let (_, z_mid) = traj.samples[mid];
        if let Ok(v) = f.eval(z_mid) {
            canvas.arrowhead(z_mid, v, 6.0, "arrowhead", "#1f4e79");
        }
    }
    for e in &equilibria {
        canvas.marker(e.location, 4.0, "equilibrium", "#c23b22");
    }
    std::fs::write(&out, canvas.finish())?;
    note(quiet, &format!("portrait: {} trajectories -> {}", trajectories.len(), out.display()));

    if format == Some(OutputFormat::Csv) {
        for (idx, traj) in trajectories.iter().enumerate() {
            let path = csv_sibling(&out, &format!("_traj{idx:04}.csv"));
            std::fs::write(&path, trajectory_csv(traj))?;
        }
        note(quiet, &format!("portrait: wrote {} trajectory CSV files", trajectories.len()));
    }
    Ok(0)
}

fn cmd_field(
    merge: &Merge,
    function: &str,
    domain: Option<&str>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    quiet: bool,
) -> Result<u8, CliError> {
    let cfg = merge.resolve(function, domain, grid, 25, 200.0)?;
    let domain = require_domain(&cfg)?;
    let f = parse_function(&cfg.function)?;
    let out = out.unwrap_or_else(|| PathBuf::from("field.svg"));

    let n = cfg.grid_n.max(2);
    let mut rows = Vec::with_capacity(n * n);
    let mut canvas = SvgCanvas::new(domain, SVG_WIDTH_PX);
    let cell_px = SVG_WIDTH_PX / n as f64 * 0.8;
    for j in 0..n {
        for i in 0..n {
            let z = domain.grid_node(i, j, n);
            let v = f.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            rows.push((z.re, z.im, v.re, v.im));
            let dir = if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            };
            canvas.arrow(z, dir, cell_px, "arrow", "#333333");
        }
    }
    std::fs::write(&out, canvas.finish())?;
    let csv_path = out.with_extension("csv");
    std::fs::write(&csv_path, field_csv(&rows))?;
    note(
        quiet,
        &format!("field: {} arrows -> {}, samples -> {}", n * n, out.display(), csv_path.display()),
    );
    Ok(0)
}

fn cmd_equilibria(
    merge: &Merge,
    function: &str,
    domain: Option<&str>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    quiet: bool,
) -> Result<u8, CliError> {
    let cfg = merge.resolve(function, domain, grid, 40, 200.0)?;
    let domain = require_domain(&cfg)?;
    let f = parse_function(&cfg.function)?;

    let zeros = find_zeros(&f, &domain, cfg.grid_n, ZERO_TOL);
    let results: Vec<EquilibriumJson> = zeros.iter().map(EquilibriumJson::from).collect();
    let found = results.len();

    let mut doc = Document::new(ConfigEcho::new("equilibria", &cfg), results);
    doc.diagnostic("zero_tol", ZERO_TOL);
    doc.diagnostic("count", found);
    doc.emit(out.as_deref())?;
    note(quiet, &format!("equilibria: {found} found"));
    Ok(if found > 0 { 0 } else { 3 })
}

struct SeparatrixFlags {
    segment: Option<String>,
    epsilon: Option<f64>,
    xstar: Option<f64>,
    t1: Option<f64>,
    bracket: Option<String>,
    seed: Option<String>,
    domain: Option<String>,
    grid: Option<usize>,
    out: Option<PathBuf>,
}

fn cmd_separatrix(
    merge: &Merge,
    function: &str,
    method: MethodArg,
    flags: SeparatrixFlags,
    quiet: bool,
) -> Result<u8, CliError> {
    let tmax_default = match method {
        MethodArg::Curvature => 40.0,
        _ => 200.0,
    };
    let grid_default = match method {
        MethodArg::Zdp => 200,
        _ => 30,
    };
    let cfg = merge.resolve(
        function,
        flags.domain.as_deref(),
        flags.grid,
        grid_default,
        tmax_default,
    )?;
    let f = parse_function(&cfg.function)?;
    let mut echo = ConfigEcho::new("separatrix", &cfg);
    echo.method = Some(method.name().to_string());

    match method {
        MethodArg::Index => {
            let segment = parse_segment(
                flags
                    .segment
                    .as_deref()
                    .ok_or_else(|| CliError::usage("segment", "--method index needs --segment"))?,
            )?;
            let domain = require_domain(&cfg)?;
            let epsilon = flags.epsilon.unwrap_or(0.2);
            let centers = flanking_centers(&f, &domain, cfg.grid_n, segment)?;
            let candidates = index_scan(
                &f,
                segment,
                (&centers.0, &centers.1),
                epsilon,
                &cfg.settings,
                SCAN_BISECT_TOL,
            )?;
            emit_candidates(echo, &candidates, flags.out.as_deref(), quiet)
        }
        MethodArg::Zdp => {
            let domain = require_domain(&cfg)?;
            let polylines = zdp_curve(&f, &domain, cfg.grid_n, ZDP_REFINE_TOL)?;
            let results: Vec<PolylineJson> = polylines.iter().map(PolylineJson::from).collect();
            let vertices: usize = results.iter().map(|p| p.points.len()).sum();
            let mut doc = Document::new(echo, results);
            doc.diagnostic("refine_tol", ZDP_REFINE_TOL);
            doc.diagnostic("polylines", polylines.len());
            doc.diagnostic("vertices", vertices);
            doc.emit(flags.out.as_deref())?;
            note(quiet, &format!("zdp: {} polylines, {vertices} vertices", polylines.len()));
            Ok(if vertices > 0 { 0 } else { 3 })
        }
        MethodArg::Bvp => {
            let target = flags
                .xstar
                .ok_or_else(|| CliError::usage("xstar", "--method bvp needs --xstar"))?;
            let mut problem = BvpProblem::new(target);
            if let Some(t1) = flags.t1 {
                problem.t1 = t1;
            }
            if let Some(bracket) = flags.bracket.as_deref() {
                problem.bracket = parse_bracket(bracket)?;
            }
            // Try the forward flow first; targets upstream of it need the
            // sign-switched field.
            let candidate = bvp_separatrix_point(&f, &problem, &cfg.settings).or_else(|err| {
                if matches!(
                    err,
                    MethodError::InnerNewtonDiverged | MethodError::BracketInvalid
                ) {
                    note(quiet, "bvp: forward flow failed; retrying with the sign-switched field");
                    problem.direction = TimeDirection::real_time().reversed();
                    bvp_separatrix_point(&f, &problem, &cfg.settings)
                } else {
                    Err(err)
                }
            })?;
            emit_candidates(echo, std::slice::from_ref(&candidate), flags.out.as_deref(), quiet)
        }
        MethodArg::Curvature => {
            let seed = parse_point(
                "seed",
                flags
                    .seed
                    .as_deref()
                    .ok_or_else(|| CliError::usage("seed", "--method curvature needs --seed"))?,
            )?;
            let candidate = curvature_max_scan(&f, seed, &cfg.settings)?;
            emit_candidates(echo, std::slice::from_ref(&candidate), flags.out.as_deref(), quiet)
        }
    }
}

/// The two Center-kind equilibria nearest the scan segment.
fn flanking_centers(
    f: &HolomorphicFunction,
    domain: &Rectangle,
    grid_n: usize,
    segment: (Complex64, Complex64),
) -> Result<(Equilibrium, Equilibrium), CliError> {
    let midpoint = 0.5 * (segment.0 + segment.1);
    let mut centers: Vec<Equilibrium> = find_zeros(f, domain, grid_n, ZERO_TOL)
        .into_iter()
        .filter(|e| e.kind.is_center())
        .collect();
    if centers.len() < 2 {
        return Err(CliError::usage(
            "domain",
            format!(
                "the index method needs two centers in the domain, found {}",
                centers.len()
            ),
        ));
    }
    centers.sort_by(|a, b| {
        (a.location - midpoint)
            .norm()
            .partial_cmp(&(b.location - midpoint).norm())
            .unwrap()
    });
    let mut pair = (centers.swap_remove(1), centers.swap_remove(0));
    if pair.0.location.im > pair.1.location.im {
        std::mem::swap(&mut pair.0, &mut pair.1);
    }
    Ok(pair)
}

fn emit_candidates(
    echo: ConfigEcho,
    candidates: &[SeparatrixCandidate],
    out: Option<&Path>,
    quiet: bool,
) -> Result<u8, CliError> {
    let results: Vec<CandidateJson> = candidates.iter().map(CandidateJson::from).collect();
    let converged = candidates.iter().filter(|c| c.converged).count();
    let mut doc = Document::new(echo, results);
    doc.diagnostic("converged", converged);
    doc.emit(out)?;
    note(
        quiet,
        &format!("separatrix: {} candidates, {converged} converged", candidates.len()),
    );
    Ok(if converged > 0 { 0 } else { 3 })
}

fn cmd_escape(
    merge: &Merge,
    function: &str,
    z0_text: &str,
    tmax: Option<f64>,
    out: Option<PathBuf>,
) -> Result<u8, CliError> {
    let cfg = merge.resolve(function, None, None, 2, tmax.unwrap_or(200.0))?;
    let mut settings = cfg.settings.clone();
    if let Some(tmax) = tmax {
        settings.t_max = tmax;
    }
    let f = parse_function(&cfg.function)?;
    let z0 = parse_point("z0", z0_text)?;

    let report = escape_report(&f, z0, &settings);
    let mut echo = ConfigEcho::new("escape", &cfg);
    echo.t_max = settings.t_max;
    let mut doc = Document::new(echo, vec![EscapeJson::from(&report)]);
    doc.diagnostic("z0", format!("{},{}", z0.re, z0.im));
    doc.emit(out.as_deref())?;
    Ok(0)
}
