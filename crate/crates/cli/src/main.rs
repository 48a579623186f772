use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ridgekit::cutlocus::{agreement_from_mask, detect_skeleton};
use ridgekit::eikonal::{error_report, solve};
use ridgekit::export::{self, to_json};
use ridgekit::geometry::DomainKind;
use ridgekit::render::render_svg;
use ridgekit::verify::{verify_builtin, VerifyOptions};
use ridgekit::{classify, Domain, DomainSpec, Error, Point, Tolerances};

#[derive(Parser)]
#[command(name = "ridgekit", version, about = "Distance functions, cut loci and curvature radii of planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance field on a grid, or projections of given points.
    Distfield(GridCmd),
    /// Detected skeleton mask and its closure.
    Skeleton(GridCmd),
    /// Radius of inner curvature and its envelope.
    Rho(RhoCmd),
    /// Classify points as regular, cut-locus or boundary case.
    Classify(ClassifyCmd),
    /// Fast-marching solution of the eikonal equation.
    Eikonal(GridCmd),
    /// Run the verification suite for a builtin domain.
    Verify(VerifyCmd),
    /// SVG of the boundary, skeleton closure and classification.
    Render(GridCmd),
}

#[derive(Args)]
struct DomainArgs {
    /// Builtin domain name.
    #[arg(long, conflicts_with = "domain")]
    builtin: Option<String>,
    /// DomainSpec JSON file.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Builtin parameter overrides, `k=v[,k=v...]`.
    #[arg(long = "param", value_delimiter = ',')]
    params: Vec<String>,
    /// Tolerance override `KEY=VAL` (repeatable).
    #[arg(long = "tol")]
    tol: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
    Pgm,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct GridCmd {
    #[command(flatten)]
    domain: DomainArgs,
    /// Grid spacing.
    #[arg(long = "grid-res", default_value_t = 1.0 / 64.0)]
    grid_res: f64,
    /// Query point `X,Y` (repeatable); `distfield` then reports projections.
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RhoCmd {
    #[command(flatten)]
    domain: DomainArgs,
    /// `vertex`, `covertex`, `corner`, `origin` or `X,Y` (nearest boundary point).
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ClassifyCmd {
    #[command(flatten)]
    domain: DomainArgs,
    /// Query point `X,Y` (repeatable).
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    points: Vec<String>,
    /// Classifier resolution (defaults to the `resolution` tolerance).
    #[arg(long)]
    resolution: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyCmd {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long = "grid-res", default_value_t = 1.0 / 64.0)]
    grid_res: f64,
    /// Seed of the randomized checks.
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure of a command: invalid input (exit 2) or failed checks (exit 1).
enum Failure {
    Invalid(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(Error::Io(e))
    }
}

type CmdResult = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(Error::InvalidArgument(msg.into()))
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => Ok(Point::new(x, y)),
            _ => Err(invalid(format!("point '{s}' is not of the form X,Y"))),
        },
        _ => Err(invalid(format!("point '{s}' is not of the form X,Y"))),
    }
}

impl DomainArgs {
    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let mut tol = Tolerances::default();
        for t in &self.tol {
            tol.apply_override(t)?;
        }
        Ok(tol)
    }

    fn spec(&self) -> Result<DomainSpec, Failure> {
        match (&self.builtin, &self.domain) {
            (Some(name), None) => {
                let mut params = BTreeMap::new();
                for p in &self.params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| invalid(format!("parameter '{p}' is not KEY=VAL")))?;
                    let v: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("parameter '{p}' has a non-numeric value")))?;
                    params.insert(k.trim().to_string(), v);
                }
                Ok(DomainSpec::builtin(name, &params)?)
            }
            (None, Some(path)) => {
                if !self.params.is_empty() {
                    return Err(invalid("--param applies to builtin domains only"));
                }
                let text = std::fs::read_to_string(path)?;
                let spec: DomainSpec = serde_json::from_str(&text).map_err(Error::from)?;
                Ok(spec)
            }
            _ => Err(invalid("exactly one of --builtin or --domain is required")),
        }
    }

    fn build(&self) -> Result<Domain, Failure> {
        Ok(Domain::with_tolerances(self.spec()?, self.tolerances()?)?)
    }
}

impl OutputArgs {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(invalid("output format not supported by this command"))
        }
    }

    fn write(&self, bytes: &[u8]) -> CmdResult {
        match &self.out {
            Some(path) => std::fs::write(path, bytes)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

fn grid_values(domain: &Domain, h: f64) -> Result<(ridgekit::grid::Grid, Vec<f64>), Failure> {
    use rayon::prelude::*;
    let g = ridgekit::grid::Grid::for_domain(domain, h)?;
    let values = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let c = g.center_of(k);
            if domain.contains(c) {
                domain.distance(c).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            }
        })
        .collect();
    Ok((g, values))
}

fn distfield(cmd: &GridCmd) -> CmdResult {
    let domain = cmd.domain.build()?;
    if !cmd.points.is_empty() {
        let results = cmd
            .points
            .iter()
            .map(|s| Ok(domain.project(parse_point(s)?)?))
            .collect::<Result<Vec<_>, Failure>>()?;
        let text = match cmd.output.format(Format::Csv, &[Format::Csv, Format::Json])? {
            Format::Csv => export::projections_csv(&results),
            _ => to_json(&results)?,
        };
        return cmd.output.write(text.as_bytes());
    }
    let (g, values) = grid_values(&domain, cmd.grid_res)?;
    match cmd.output.format(Format::Csv, &[Format::Csv, Format::Pgm, Format::Json])? {
        Format::Csv => cmd.output.write(export::distance_csv(&g, &values).as_bytes()),
        Format::Pgm => cmd.output.write(&export::scalar_pgm(&g, &values)),
        _ => {
            let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
            let max = finite.iter().copied().fold(0.0, f64::max);
            let text = to_json(&json!({
                "grid": g,
                "interior_cells": finite.len(),
                "max_distance": max,
            }))?;
            cmd.output.write(text.as_bytes())
        }
    }
}

fn skeleton(cmd: &GridCmd) -> CmdResult {
    let domain = cmd.domain.build()?;
    let mask = detect_skeleton(&domain, cmd.grid_res)?;
    match cmd.output.format(Format::Pgm, &[Format::Pgm, Format::Csv, Format::Json])? {
        Format::Pgm => cmd.output.write(&export::mask_pgm(&mask)),
        Format::Csv => cmd.output.write(export::mask_csv(&mask).as_bytes()),
        _ => {
            let stats = if domain.is_c1() {
                let r = agreement_from_mask(&domain, &mask, 2.0 * cmd.grid_res)?;
                json!({
                    "agreement": r.agreement,
                    "n_cells": r.n_cells,
                    "disagreements": r.disagreements,
                    "flagged_cells": mask.flagged_count(),
                })
            } else {
                json!({ "flagged_cells": mask.flagged_count() })
            };
            cmd.output.write(to_json(&stats)?.as_bytes())
        }
    }
}

fn resolve_at(domain: &Domain, at: &str) -> Result<Point, Failure> {
    let kind = &domain.spec().kind;
    let p = match (at, kind) {
        ("vertex", DomainKind::Ellipse { a, .. }) => Point::new(*a, 0.0),
        ("vertex", DomainKind::Disc { radius }) => Point::new(*radius, 0.0),
        ("covertex", DomainKind::Ellipse { b, .. }) => Point::new(0.0, *b),
        ("covertex", DomainKind::Disc { radius }) => Point::new(0.0, *radius),
        ("corner", DomainKind::DiscHalfplane) => Point::new(1.0, 0.0),
        ("vertex" | "corner", DomainKind::Polyline { vertices }) => vertices[0],
        ("origin", _) => Point::ORIGIN,
        ("vertex" | "covertex" | "corner", _) => {
            return Err(invalid(format!("--at {at} is not defined for {}", kind.name())))
        }
        (xy, _) => parse_point(xy)?,
    };
    Ok(p)
}

fn rho(cmd: &RhoCmd) -> CmdResult {
    let domain = cmd.domain.build()?;
    let Some(at) = &cmd.at else {
        let text = match cmd.output.format(Format::Csv, &[Format::Csv, Format::Json])? {
            Format::Csv => export::rho_csv(&domain)?,
            _ => to_json(
                &domain
                    .rho_table()
                    .entries
                    .iter()
                    .map(|e| json!({"arc_param": e.arc, "point": e.sample.point, "rho": e.rho.radius}))
                    .collect::<Vec<_>>(),
            )?,
        };
        return cmd.output.write(text.as_bytes());
    };
    cmd.output.format(Format::Json, &[Format::Json])?;
    let p = resolve_at(&domain, at)?;
    let xi = domain.nearest_boundary_sample(p);
    let est = domain.rho(&xi);
    let rs = domain.rho_star(&xi, &domain.tolerances().env_radii)?;
    let from_curvature = match domain.rho_from_curvature(&xi) {
        Ok(r) => json!(r),
        Err(e) => json!({ "error": e.kind(), "message": e.to_string() }),
    };
    // at a corner, report the value for each one-sided normal
    let one_sided: Vec<_> = std::iter::once(xi)
        .chain(domain.corner_twin(&xi))
        .map(|s| json!({ "inner_normal": s.inner_normal, "rho": domain.rho(&s).radius }))
        .collect();
    let text = to_json(&json!({
        "point": xi.point,
        "one_sided": one_sided,
        "inner_normal": xi.inner_normal,
        "corner": xi.corner,
        "rho": est.radius,
        "rho_aggregated": domain.rho_aggregated(&xi),
        "locality_sensitive": est.locality_sensitive,
        "indeterminate": est.indeterminate,
        "rho_star": rs.radius,
        "rho_star_trace": rs.trace.iter().map(|(r, v)| json!({"env_radius": r, "inf": v})).collect::<Vec<_>>(),
        "rho_from_curvature": from_curvature,
    }))?;
    cmd.output.write(text.as_bytes())
}

fn classify_cmd(cmd: &ClassifyCmd) -> CmdResult {
    let domain = cmd.domain.build()?;
    cmd.output.format(Format::Json, &[Format::Json])?;
    let resolution = cmd.resolution.unwrap_or(domain.tolerances().resolution);
    let reports = cmd
        .points
        .iter()
        .map(|s| {
            let r = classify(&domain, parse_point(s)?, resolution)?;
            Ok(json!({
                "point": r.point,
                "classification": r.classification,
                "d": r.distance,
                "rho_star": r.rho_star,
                "projections": r.projections.iter().map(|p| p.point).collect::<Vec<_>>(),
                "resolution": r.resolution,
            }))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let text = if reports.len() == 1 {
        to_json(&reports[0])?
    } else {
        to_json(&reports)?
    };
    cmd.output.write(text.as_bytes())
}

fn eikonal(cmd: &GridCmd) -> CmdResult {
    let domain = cmd.domain.build()?;
    let field = solve(&domain, cmd.grid_res)?;
    match cmd.output.format(Format::Json, &[Format::Json, Format::Csv, Format::Pgm])? {
        Format::Csv => cmd.output.write(export::field_csv(&field).as_bytes()),
        Format::Pgm => cmd.output.write(&export::scalar_pgm(&field.grid, &field.values)),
        _ => {
            let mask = detect_skeleton(&domain, cmd.grid_res)?;
            let report = error_report(&field, &domain, &mask)?;
            cmd.output.write(to_json(&report)?.as_bytes())
        }
    }
}

fn verify(cmd: &VerifyCmd) -> CmdResult {
    let Some(name) = &cmd.domain.builtin else {
        return Err(invalid("verify runs on builtin domains (--builtin NAME)"));
    };
    if !cmd.domain.params.is_empty() {
        return Err(invalid("verify uses default builtin parameters"));
    }
    DomainSpec::builtin(name, &BTreeMap::new())?;
    let as_json = match cmd.output.format {
        None => false,
        Some(Format::Json) => true,
        Some(_) => return Err(invalid("verify prints text or --format json")),
    };
    let opts = VerifyOptions {
        seed: cmd.seed,
        h: cmd.grid_res,
        tolerances: cmd.domain.tolerances()?,
        ..VerifyOptions::default()
    };
    let report = verify_builtin(name, &opts)?;
    if as_json {
        cmd.output.write(to_json(&report)?.as_bytes())?;
    } else {
        let mut text = String::new();
        for c in &report.checks {
            let tag = c.criterion.map(|n| format!("[{n}]")).unwrap_or_else(|| "[-]".into());
            text += &format!(
                "{} {tag} {name} {}: {} ({:.2}s)\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail,
                c.seconds
            );
        }
        cmd.output.write(text.as_bytes())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn render(cmd: &GridCmd) -> CmdResult {
    let domain = cmd.domain.build()?;
    cmd.output.format(Format::Svg, &[Format::Svg])?;
    let mask = detect_skeleton(&domain, cmd.grid_res)?;
    cmd.output.write(render_svg(&domain, &mask)?.as_bytes())
}

fn report_invalid(kind: &str, message: &str) {
    let err = json!({ "error": kind, "message": message });
    eprintln!("{err}");
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("RIDGEKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_invalid("InvalidArgument", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Distfield(c) => distfield(c),
        Command::Skeleton(c) => skeleton(c),
        Command::Rho(c) => rho(c),
        Command::Classify(c) => classify_cmd(c),
        Command::Eikonal(c) => eikonal(c),
        Command::Verify(c) => verify(c),
        Command::Render(c) => render(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Invalid(e)) => {
            report_invalid(e.kind(), &e.to_string());
            ExitCode::from(2)
        }
    }
}
