//! `adams`: minimal resolutions, connecting maps and the image-of-J charts
//! from the command line. Exit status 0 on success, 1 on a computation
//! mismatch, 2 on a usage or parse error.

use adams_core::chartio::{emit_json, emit_svg, emit_text, read_json, ChartConfig, ChartDoc};
use adams_core::connect::{compose_connecting, les_assemble, ExtMap, ResolvedSes, Route};
use adams_core::fpmod::{load_ses, parse_mod, realize, GradedModule, Ses};
use adams_core::jay::{self, ClosedPage, Variant, Window};
use adams_core::oracle::bar_ext_dims;
use adams_core::resolve::Resolution;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "adams", version, about = "Adams spectral sequence computations over finite sub-Hopf-algebras")]
struct Cli {
    /// TOML file with a [chart] section (window, products, style).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModuleArgs {
    /// Sub-Hopf-algebra, e.g. A(1), A(2), E(1); overrides the file's algebra line.
    #[arg(long)]
    algebra: Option<String>,
    /// Module presentation (.mod).
    #[arg(long)]
    module: PathBuf,
    #[arg(long)]
    smax: usize,
    #[arg(long)]
    tmax: i32,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Snake,
    Yoneda,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Route {
        match r {
            RouteArg::Snake => Route::Snake,
            RouteArg::Yoneda => Route::Yoneda,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimal resolution: generators per homological degree.
    Resolve {
        #[command(flatten)]
        m: ModuleArgs,
        /// Write the chart JSON to PATH (or stdout when PATH is omitted).
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Ext chart of a module as a text grid or JSON.
    Ext {
        #[command(flatten)]
        m: ModuleArgs,
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Connecting homomorphism of a short exact sequence, with the LES check.
    Delta {
        #[arg(long)]
        ses: PathBuf,
        #[arg(long)]
        smax: usize,
        #[arg(long)]
        tmax: i32,
        #[arg(long, value_enum, default_value = "snake")]
        route: RouteArg,
    },
    /// Composite δ_outer δ_inner of two sequences sharing a module.
    D2compose {
        #[arg(long)]
        inner: PathBuf,
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        smax: usize,
        #[arg(long)]
        tmax: i32,
        #[arg(long, value_enum, default_value = "snake")]
        route: RouteArg,
    },
    /// Image-of-J pipeline: E2 with d2, later pages and the abutment.
    Jay {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        variant: String,
        #[arg(long)]
        nmax: i32,
        #[arg(long)]
        smax: Option<usize>,
        /// Compare E3 and E_inf with the closed forms and homotopy orders.
        #[arg(long)]
        check: bool,
        /// Use the split extension for M_j (p = 2).
        #[arg(long)]
        split: bool,
        #[arg(long, value_enum, default_value = "snake")]
        route: RouteArg,
        /// Write the E_inf chart as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write E2, E3 and E_inf chart JSON into this directory.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare the bar-complex Ext with the minimal resolution.
    OracleCheck {
        #[command(flatten)]
        m: ModuleArgs,
    },
    /// Render a chart JSON file.
    Chart {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "text")]
        svg: Option<PathBuf>,
        #[arg(long)]
        text: bool,
    },
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Config {
    chart: ChartConfig,
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else { return Ok(Config::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Reads a .mod file, replacing (or supplying) its algebra line.
fn load_module(path: &Path, algebra: Option<&str>) -> Result<GradedModule, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let text = match algebra {
        None => text,
        Some(a) => {
            let mut lines: Vec<String> =
                text.lines().filter(|l| l.split_whitespace().next() != Some("algebra")).map(str::to_string).collect();
            let at = lines.iter().position(|l| l.split_whitespace().next() == Some("p")).map_or(0, |i| i + 1);
            lines.insert(at, format!("algebra {a}"));
            lines.join("\n")
        }
    };
    let mut pres = parse_mod(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if pres.name.is_empty() {
        pres.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    realize(&pres).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_out(target: &str, text: &str) -> Outcome {
    if target == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(target, text).map_err(|e| usage(format!("{target}: {e}")))
    }
}

fn resolve(m: &ModuleArgs) -> Result<Resolution, Failure> {
    let module = load_module(&m.module, m.algebra.as_deref())?;
    Ok(Resolution::new(module, m.smax, m.tmax))
}

fn cmd_resolve(m: &ModuleArgs, json: Option<&str>, cfg: &Config) -> Outcome {
    let res = resolve(m)?;
    res.verify().map_err(Failure::Mismatch)?;
    if let Some(target) = json {
        return write_out(target, &emit_json(&ChartDoc::from_resolution(&res, &cfg.chart.products, "E2")));
    }
    println!("# {} over {}, s <= {}, t <= {}", res.module().name(), res.algebra().name(), m.smax, m.tmax);
    for s in 0..=res.s_max() {
        let gens = res.gens(s);
        let degrees: Vec<String> = gens.iter().map(|t| t.to_string()).collect();
        println!("s={s}: {} generators [{}]", gens.len(), degrees.join(" "));
    }
    Ok(())
}

fn cmd_ext(m: &ModuleArgs, json: Option<&str>, cfg: &Config) -> Outcome {
    let res = resolve(m)?;
    let chart = cfg.chart.apply(&ChartDoc::from_resolution(&res, &cfg.chart.products, "E2"));
    match json {
        Some(target) => write_out(target, &emit_json(&chart)),
        None => write_out("-", &emit_text(&chart, cfg.chart.text_width).map_err(usage)?),
    }
}

fn print_ranks(label: &str, map: &ExtMap) {
    println!("# {label}: (s, t) -> rank, shifting s by {}", map.shift);
    for ((s, t), r) in map.ranks() {
        if r > 0 {
            println!("{s} {t} {r}");
        }
    }
}

fn cmd_delta(ses: &Path, smax: usize, tmax: i32, route: Route) -> Outcome {
    let ses = load_ses(ses).map_err(usage)?;
    let rs = ResolvedSes::new(ses, smax, tmax);
    let delta = rs.delta(route).map_err(|e| Failure::Mismatch(e.to_string()))?;
    print_ranks("delta", &delta);
    let les = les_assemble(&rs, route).map_err(|e| Failure::Mismatch(e.to_string()))?;
    match les.iter().find(|d| !d.exact) {
        Some(d) => Err(Failure::Mismatch(format!("long exact sequence fails at ({},{})", d.s, d.t))),
        None => {
            println!("# long exact sequence exact in {} bidegrees", les.len());
            Ok(())
        }
    }
}

fn same_module(a: &GradedModule, b: &GradedModule) -> bool {
    let lo = a.min_degree().min(b.min_degree());
    let hi = a.max_degree().max(b.max_degree());
    a.prime() == b.prime() && a.algebra().name() == b.algebra().name() && (lo..=hi).all(|t| a.dim(t) == b.dim(t))
}

fn cmd_d2compose(inner: &Path, outer: &Path, smax: usize, tmax: i32, route: Route) -> Outcome {
    let inner: Ses = load_ses(inner).map_err(usage)?;
    let outer: Ses = load_ses(outer).map_err(usage)?;
    if !same_module(&inner.quot, &outer.sub) {
        return Err(usage("the quotient of --inner must be the submodule of --outer"));
    }
    let r = |m: &GradedModule| Arc::new(Resolution::new(m.clone(), smax + 2, tmax));
    let shared = r(&inner.quot);
    let (a, b, c, d) = (r(&inner.sub), r(&inner.mid), r(&outer.mid), r(&outer.quot));
    let inner = ResolvedSes::with_resolutions(inner, a, b, shared.clone());
    let outer = ResolvedSes::with_resolutions(outer, shared, c, d);
    let map = compose_connecting(&inner, &outer, route).map_err(|e| Failure::Mismatch(e.to_string()))?;
    print_ranks("delta_outer delta_inner", &map);
    Ok(())
}

struct JayArgs<'a> {
    prime: u32,
    variant: &'a str,
    nmax: i32,
    smax: Option<usize>,
    check: bool,
    split: bool,
    route: Route,
    svg: Option<&'a Path>,
    json: Option<&'a Path>,
}

fn cmd_jay(a: JayArgs, cfg: &Config) -> Outcome {
    let variant = Variant::lookup(a.prime, a.variant)
        .ok_or_else(|| usage(format!("no variant {} at p = {}", a.variant, a.prime)))?;
    if a.split && a.prime != 2 {
        return Err(usage("--split needs p = 2"));
    }
    let mut window = Window::default_for(variant);
    window.n_max = a.nmax;
    if let Some(s) = a.smax {
        window.s_max = s;
    }
    let run = jay::run(variant, window, a.split, a.route).map_err(|e| Failure::Mismatch(e.to_string()))?;
    println!("# {} at p = {}, s <= {}, t-s <= {}", variant.name(), a.prime, window.s_max, window.n_max);
    println!("# stem  E2  E3  Einf  expected");
    for row in &run.abutment.rows {
        let expected = row.expected.map_or("Z".to_string(), |e| e.to_string());
        println!(
            "{:>5} {:>3} {:>3} {:>5}  {expected}{}",
            row.n,
            run.e2().stem_total(row.n),
            run.e3().stem_total(row.n),
            row.total,
            if row.pass { "" } else { "  MISMATCH" }
        );
    }
    let charts = run.charts();
    if let Some(dir) = a.json {
        std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
        for c in &charts {
            let path = dir.join(format!("{}-{}.json", variant.name(), c.metadata.page));
            std::fs::write(&path, emit_json(c)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        }
    }
    if let Some(path) = a.svg {
        let chart = cfg.chart.apply(charts.last().unwrap());
        std::fs::write(path, emit_svg(&chart, &cfg.chart.style)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    if !a.check {
        return Ok(());
    }
    let mut problems = Vec::new();
    for s in 0..=window.s_max {
        for n in 0..=window.n_max {
            let t = n + s as i32;
            for (label, page, which) in [("E3", run.e3(), ClosedPage::E3), ("Einf", run.einf(), ClosedPage::Infinity)] {
                match jay::closed_form(a.prime, variant, which, s, t) {
                    Ok(want) if want != page.dim(s, t) => {
                        problems.push(format!("{label} ({s},{t}): {} vs closed form {want}", page.dim(s, t)))
                    }
                    _ => {}
                }
            }
        }
    }
    problems.extend(run.abutment.failures().into_iter().map(|n| format!("abutment fails in stem {n}")));
    if problems.is_empty() {
        println!("# check passed");
        Ok(())
    } else {
        for p in &problems {
            eprintln!("{p}");
        }
        Err(Failure::Mismatch(format!("{} mismatches", problems.len())))
    }
}

fn cmd_oracle(m: &ModuleArgs) -> Outcome {
    let module = load_module(&m.module, m.algebra.as_deref())?;
    let bar = bar_ext_dims(&module, m.smax, m.tmax).map_err(usage)?;
    let res = Resolution::new(module, m.smax, m.tmax);
    let mut bad = 0;
    for s in 0..=m.smax {
        for t in res.t_min()..=m.tmax {
            let (a, b) = (bar.get(&(s, t)).copied().unwrap_or(0), res.gens_in_degree(s, t).len());
            if a != b {
                bad += 1;
                eprintln!("({s},{t}): bar {a}, minimal {b}");
            } else if a > 0 {
                println!("{s} {t} {a}");
            }
        }
    }
    if bad > 0 {
        return Err(Failure::Mismatch(format!("{bad} bidegrees differ")));
    }
    println!("# bar complex and minimal resolution agree");
    Ok(())
}

fn cmd_chart(input: &Path, svg: Option<&Path>, text: bool, cfg: &Config) -> Outcome {
    let raw = std::fs::read_to_string(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let chart = cfg.chart.apply(&read_json(&raw).map_err(usage)?);
    match svg {
        Some(path) => {
            std::fs::write(path, emit_svg(&chart, &cfg.chart.style)).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        None if text => write_out("-", &emit_text(&chart, cfg.chart.text_width).map_err(usage)?),
        None => Err(usage("chart needs --svg PATH or --text")),
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Resolve { m, json } => cmd_resolve(m, json.as_deref(), &cfg),
        Command::Ext { m, json } => cmd_ext(m, json.as_deref(), &cfg),
        Command::Delta { ses, smax, tmax, route } => cmd_delta(ses, *smax, *tmax, (*route).into()),
        Command::D2compose { inner, outer, smax, tmax, route } => cmd_d2compose(inner, outer, *smax, *tmax, (*route).into()),
        Command::Jay { prime, variant, nmax, smax, check, split, route, svg, json } => cmd_jay(
            JayArgs {
                prime: *prime,
                variant,
                nmax: *nmax,
                smax: *smax,
                check: *check,
                split: *split,
                route: (*route).into(),
                svg: svg.as_deref(),
                json: json.as_deref(),
            },
            &cfg,
        ),
        Command::OracleCheck { m } => cmd_oracle(m),
        Command::Chart { input, svg, text } => cmd_chart(input, svg.as_deref(), *text, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("adams: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("adams: mismatch: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("adams: {msg}");
            ExitCode::from(2)
        }
    }
}
