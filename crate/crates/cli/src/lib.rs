//! The `eulerint` command line.
//!
//! Exit codes: 0 when the command succeeds and every check holds, 1 when a
//! check fails, 2 on usage or input errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use eulerint_core::cellcx::{betti_mod2, chi_c, integrate, integrate_all, semicharacteristic};
use eulerint_core::formulas::{applicable_formulas, check_local, check_named};
use eulerint_core::io::{load_complex, load_function, load_json, load_ledger, load_local_ledger, load_map, load_set, LoadError};
use eulerint_core::pushfwd::fubini_verify;
use eulerint_core::{CheckReport, DefinableSet};
use eulerint_geomlab::degree::{default_regular_value, gradient_degree, local_degree_1d, local_degree_2d, local_degree_nd, NewtonOptions};
use eulerint_geomlab::morin::morin_loci_2d;
use eulerint_geomlab::plmorse::{interval_ledger, morse_data, pl_morse_ledger, EmbeddedSurface, MorseError, SurfaceFile};
use eulerint_geomlab::poly::{int, parse_rat, PolyMap, Rat};
use eulerint_geomlab::svg::curves_svg;
use eulerint_geomlab::trace::{stable_fiber, trace_plane_fiber, GridSpec, PlaneBox};
use eulerint_geomlab::zoo::{run_zoo, GROUPS};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

pub const SEED_ENV: &str = "EULERINT_SEED";

#[derive(Debug, Parser)]
#[command(name = "eulerint", version, about = "Euler calculus and Euler-characteristic identities of stable maps")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// χ_c of a complex or a definable set.
    Chi(ChiArgs),
    /// Mod-2 Betti numbers of a closed set.
    Homology(ChiArgs),
    /// ∫ φ dχ, over a set or the whole complex.
    Integrate {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// f_*φ on the target complex.
    Pushforward {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// ∫ φ = ∫ f_*φ.
    Fubini {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// Run a checker (`f1`, `rmorin1`, ..., `all`, `local`) on a ledger.
    Verify {
        formula: String,
        #[arg(long)]
        ledger: PathBuf,
    },
    /// Trace a level curve of a plane polynomial.
    Trace(TraceArgs),
    /// Local degree at the origin.
    Degree {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "1")]
        radius: String,
        /// Degree of the gradient of a function germ.
        #[arg(long)]
        gradient: bool,
    },
    /// Fold curve and cusps of a plane map.
    Morin {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "box", default_value = "1")]
        half_width: String,
        #[arg(long, default_value_t = 64)]
        grid: u32,
    },
    /// PL Morse ledger of a height function on a surface.
    Morse(MorseArgs),
    /// Run the curated example zoo.
    Zoo {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(GROUPS))]
        only: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Level curves as SVG.
    Svg {
        #[arg(long)]
        map: PathBuf,
        /// Comma-separated levels.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        levels: String,
        #[arg(long = "box", default_value = "3")]
        half_width: String,
        #[arg(long, default_value_t = 200)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    #[arg(long, conflicts_with = "set", required_unless_present = "set")]
    pub complex: Option<PathBuf>,
    #[arg(long)]
    pub set: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub level: String,
    #[arg(long = "box", default_value = "25")]
    pub half_width: String,
    #[arg(long, default_value_t = 1000)]
    pub grid: u32,
    /// Print only the stable χ_c of the fiber.
    #[arg(long)]
    pub chi: bool,
}

#[derive(Debug, Args)]
pub struct MorseArgs {
    #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
    pub surface: Option<PathBuf>,
    #[arg(long, value_parser = ["octahedron", "tetrahedron", "torus"])]
    pub builtin: Option<String>,
    /// Height direction `a,b,c`.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "redraw")]
    pub direction: Option<String>,
    /// Draw a random integer direction from the seed until the heights are distinct.
    #[arg(long)]
    pub redraw: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also print the height-axis interval data.
    #[arg(long)]
    pub intervals: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

/// Text and JSON forms of a result, plus whether every check in it held.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, ok: true }
    }
}

fn seed_override(seed: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(seed),
    }
}

fn rat_arg(name: &str, s: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn load_polymap(path: &PathBuf) -> Result<PolyMap, CliError> {
    Ok(load_json::<PolyMap>(path)?)
}

fn reports_output(reports: Vec<CheckReport>) -> Output {
    let ok = reports.iter().all(|r| r.holds);
    let text = reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
    Output { text, json: json!(reports), ok }
}

fn set_arg(a: &ChiArgs) -> Result<DefinableSet, CliError> {
    match (&a.complex, &a.set) {
        (Some(c), _) => Ok(DefinableSet::full(load_complex(c)?)),
        (None, Some(s)) => Ok(load_set(s)?),
        (None, None) => Err(CliError::Usage("give --complex or --set".into())),
    }
}

fn surface_arg(a: &MorseArgs) -> Result<EmbeddedSurface, CliError> {
    match (&a.surface, a.builtin.as_deref()) {
        (Some(p), _) => load_json::<SurfaceFile>(p)?.try_into().map_err(compute),
        (None, Some("octahedron")) => Ok(EmbeddedSurface::octahedron()),
        (None, Some("tetrahedron")) => Ok(EmbeddedSurface::tetrahedron()),
        (None, Some("torus")) => Ok(EmbeddedSurface::torus()),
        _ => Err(CliError::Usage("give --surface or --builtin".into())),
    }
}

fn direction_arg(a: &MorseArgs, s: &EmbeddedSurface) -> Result<[Rat; 3], CliError> {
    if let Some(d) = &a.direction {
        let parts = d.split(',').map(|p| rat_arg("direction", p.trim())).collect::<Result<Vec<_>, _>>()?;
        let dir: [Rat; 3] = parts.try_into().map_err(|_| CliError::Usage("--direction needs three components".into()))?;
        match morse_data(s, &dir) {
            Err(MorseError::DegenerateDirection(..)) if a.redraw => {}
            _ => return Ok(dir),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed_override(a.seed)?);
    for _ in 0..100 {
        let dir = [(); 3].map(|_| int(rng.gen_range(-1000..=1000)));
        if morse_data(s, &dir).is_ok() {
            return Ok(dir);
        }
    }
    Err(CliError::Compute("no generic direction found in 100 draws".into()))
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Chi(a) => {
            let v = chi_c(&set_arg(a)?);
            Ok(Output::ok(v.to_string(), json!({ "chi_c": v })))
        }
        Command::Homology(a) => {
            let set = set_arg(a)?;
            let betti = betti_mod2(&set).map_err(compute)?;
            let psi = semicharacteristic(&set).ok();
            let text = betti.iter().enumerate().map(|(i, b)| format!("b{i} = {b}")).collect::<Vec<_>>().join("\n");
            Ok(Output::ok(text, json!({ "betti_mod2": betti, "semicharacteristic": psi })))
        }
        Command::Integrate { function, set } => {
            let phi = load_function(function)?;
            let v = match set {
                Some(s) => integrate(&phi, &load_set(s)?),
                None => integrate_all(&phi),
            }
            .map_err(compute)?;
            Ok(Output::ok(v.to_string(), json!({ "integral": v })))
        }
        Command::Pushforward { map, function } => {
            let f = load_map(map)?;
            let pushed = f.pushforward(&load_function(function)?).map_err(compute)?.to_map();
            let text = pushed.iter().map(|(c, v)| format!("{c}\t{v}")).collect::<Vec<_>>().join("\n");
            Ok(Output::ok(text, json!({ "values": pushed })))
        }
        Command::Fubini { map, function } => {
            let r = fubini_verify(&load_map(map)?, &load_function(function)?).map_err(compute)?;
            let text = format!(
                "source {}  target {}  {}",
                r.source_integral,
                r.target_integral,
                if r.holds { "ok" } else { "FAIL" }
            );
            Ok(Output { text, json: json!(r), ok: r.holds })
        }
        Command::Verify { formula, ledger } => match formula.as_str() {
            "local" => Ok(reports_output(check_local(&load_local_ledger(ledger)?).map_err(compute)?)),
            "all" => {
                let l = load_ledger(ledger)?;
                let names = applicable_formulas(&l);
                if names.is_empty() {
                    return Err(CliError::Compute("no checker applies to this ledger".into()));
                }
                let mut reports = Vec::new();
                for n in names {
                    reports.extend(check_named(n, &l).map_err(compute)?);
                }
                Ok(reports_output(reports))
            }
            name => Ok(reports_output(check_named(name, &load_ledger(ledger)?).map_err(compute)?)),
        },
        Command::Trace(a) => {
            let f = load_polymap(&a.map)?;
            let t = rat_arg("level", &a.level)?;
            let bx = PlaneBox::square(rat_arg("box", &a.half_width)?).map_err(compute)?;
            let grid = GridSpec::square(a.grid);
            if a.chi {
                let s = stable_fiber(&f, &t, &bx, grid).map_err(compute)?;
                return Ok(Output::ok(s.chi_c.to_string(), json!({ "level": a.level, "chi_c": s.chi_c })));
            }
            let c = trace_plane_fiber(&f, &t, &bx, grid).map_err(compute)?;
            let chi = eulerint_geomlab::curve_chi_c(&c);
            let text = format!("open arcs {}  circles {}  chi_c {}", c.open_count(), c.closed_count(), chi);
            Ok(Output::ok(text, json!({ "chi_c": chi, "curve": c })))
        }
        Command::Degree { map, radius, gradient } => {
            let f = load_polymap(map)?;
            let r = rat_arg("radius", radius)?;
            if *gradient {
                if f.p != 1 {
                    return Err(CliError::Usage("--gradient needs a function (p = 1)".into()));
                }
                let d = gradient_degree(&f.components[0], &r).map_err(compute)?;
                return Ok(Output::ok(d.degree.to_string(), json!(d)));
            }
            let d = match (f.n, f.p) {
                (1, 1) => local_degree_1d(&f, &r).map_err(compute)?,
                (2, 2) => local_degree_2d(&f, &r).map_err(compute)?,
                (n, p) if n == p => {
                    let y = default_regular_value(&f, &r);
                    local_degree_nd(&f, &r, &y, NewtonOptions::default()).map_err(compute)?.degree
                }
                (n, p) => return Err(CliError::Usage(format!("degree needs n = p, got {n} → {p}"))),
            };
            Ok(Output::ok(d.to_string(), json!({ "degree": d })))
        }
        Command::Morin { map, half_width, grid } => {
            let f = load_polymap(map)?;
            let bx = PlaneBox::square(rat_arg("box", half_width)?).map_err(compute)?;
            let l = morin_loci_2d(&f, &bx, GridSpec::square(*grid)).map_err(compute)?;
            let mut text = format!(
                "fold curve: {} open arcs, {} circles\ncusps: {}",
                l.fold_curve.open_count(),
                l.fold_curve.closed_count(),
                l.cusp_points.len()
            );
            for c in &l.cusp_points {
                text.push_str(&format!("\n  ({:.6}, {:.6}) A2{}", c.point[0], c.point[1], if c.sign > 0 { "+" } else { "-" }));
            }
            Ok(Output::ok(text, json!(l)))
        }
        Command::Morse(a) => {
            let s = surface_arg(a)?;
            let dir = direction_arg(a, &s)?;
            let ledger = pl_morse_ledger(&s, &dir).map_err(compute)?;
            let crit = morse_data(&s, &dir).map_err(compute)?.critical();
            let dir_text: Vec<String> = dir.iter().map(eulerint_geomlab::poly::rat_string).collect();
            let mut text = format!("direction {}\n", dir_text.join(","));
            for c in &crit {
                text.push_str(&format!("vertex {} at height {}: {:?}\n", c.vertex, c.height, c.kind));
            }
            text.push_str(&serde_json::to_string(&ledger).expect("ledger serializes"));
            let mut out = json!({ "direction": dir_text, "critical": crit, "ledger": ledger });
            if a.intervals {
                let iv = interval_ledger(&s, &dir).map_err(compute)?;
                text.push_str(&format!("\nsublevel chi {:?}\nsuspended {}", iv.sublevel_chi, serde_json::to_string(&iv.ledger).expect("ledger serializes")));
                out["intervals"] = json!(iv);
            }
            Ok(Output::ok(text, out))
        }
        Command::Zoo { only, seed } => {
            let report = run_zoo(only.as_deref(), seed_override(*seed)?);
            let mut text = String::new();
            for r in &report.rows {
                text.push_str(&format!(
                    "{:<12} {:<44} {:<22} {:>5} {:>5}  residual {:>2}  {}\n",
                    r.group,
                    r.item,
                    r.formula_id,
                    r.lhs,
                    r.rhs,
                    r.residual,
                    if r.holds { "ok" } else { "FAIL" }
                ));
            }
            for e in &report.errors {
                text.push_str(&format!("{:<12} {:<44} ERROR {}\n", e.group, e.item, e.error));
            }
            let failed = report.rows.iter().filter(|r| !r.holds).count() + report.errors.len();
            text.push_str(&format!("{} checks, {} failed", report.rows.len() + report.errors.len(), failed));
            Ok(Output { text, json: json!(report), ok: report.all_hold() })
        }
        Command::Svg { map, levels, half_width, grid, out } => {
            let f = load_polymap(map)?;
            let bx = PlaneBox::square(rat_arg("box", half_width)?).map_err(compute)?;
            let mut curves = Vec::new();
            for l in levels.split(',') {
                curves.push(trace_plane_fiber(&f, &rat_arg("levels", l.trim())?, &bx, GridSpec::square(*grid)).map_err(compute)?);
            }
            let svg = curves_svg(&bx, &curves);
            match out {
                Some(path) => {
                    fs::write(path, &svg).map_err(|source| CliError::Write { path: path.clone(), source })?;
                    Ok(Output::ok(format!("wrote {}", path.display()), json!({ "path": path, "curves": curves })))
                }
                None => Ok(Output::ok(svg.trim_end(), json!({ "svg": svg, "curves": curves }))),
            }
        }
    }
}

/// Runs one command line, writing results to `out` and diagnostics to `err`.
pub fn run_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("values serialize"))
            } else {
                writeln!(out, "{}", o.text)
            };
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = if cli.json {
                writeln!(err, "{}", json!({ "error": e.to_string() }))
            } else {
                writeln!(err, "error: {e}")
            };
            2
        }
    }
}

pub fn run(argv: Vec<String>) -> i32 {
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
