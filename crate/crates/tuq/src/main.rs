use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tuq::config::{ScenarioConfig, SystemConfig};
use tuq::core::contour::{banana_contour, coverage, gaussian_ellipse, projected_moments_from_tensors, whiten, SliceSpec};
use tuq::core::dynamics::{stm_propagate, System};
use tuq::core::flowmap::{build_da_map, build_dda_map, stretching_direction, DirectionFrame};
use tuq::study::{aerocapture_scenario, cr3bp_scenario, Scenario};
use tuq::{bench, io, report, study, Result, StageExt, TuqError};

#[derive(Parser)]
#[command(name = "tuq", version, about = "Nonlinear uncertainty propagation studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Override every Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    Da,
    Dda,
}

impl MapKind {
    fn label(self) -> &'static str {
        match self {
            MapKind::Da => "da",
            MapKind::Dda => "dda",
        }
    }
}

fn parse_slice(s: &str) -> std::result::Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts[..] {
        [a, b] => Ok([a.parse().map_err(|e| format!("{a}: {e}"))?, b.parse().map_err(|e| format!("{b}: {e}"))?]),
        _ => Err(format!("expected two indices like 0,1, got `{s}`")),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKind {
    Ellipse,
    Banana,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Run { scenario: PathBuf },
    /// Build a flow map for a scenario and serialize it with the reference trajectory.
    Map {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "da")]
        kind: MapKind,
        #[arg(long)]
        order: Option<u8>,
    },
    /// Turn a moments file into a contour CSV.
    Contour {
        moments: PathBuf,
        /// Two state indices, e.g. `0,1`.
        #[arg(long, value_parser = parse_slice, default_value = "0,1")]
        slice: [usize; 2],
        #[arg(long, default_value_t = 3.0)]
        k: f64,
        #[arg(long, value_enum, default_value = "banana")]
        kind: CurveKind,
        #[arg(long, default_value_t = tuq::core::contour::DEFAULT_CONTOUR_POINTS)]
        points: usize,
        /// `x,y` sample CSV to report coverage against.
        #[arg(long)]
        coverage_of: Option<PathBuf>,
    },
    /// Time Monte Carlo batches direct and through both maps.
    Bench {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [100, 1000, 10000])]
        counts: Vec<usize>,
    },
}

fn load(path: &Path, cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    cfg.apply_overrides(cli.seed, cli.out_dir.as_deref(), cli.samples)?;
    Ok(cfg)
}

fn write(path: PathBuf, text: &str) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| TuqError::io(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli, path: &Path) -> Result<()> {
    let cfg = load(path, cli)?;
    let r = study::run_scenario(&cfg)?;
    let dir = &cfg.output.dir;
    for f in &cfg.output.formats {
        for p in report::emit_report(&r, *f, dir)? {
            println!("wrote {}", p.display());
        }
    }
    for p in io::write_study_artifacts(&r, dir, cfg.output.moments_json)? {
        println!("wrote {}", p.display());
    }
    print!("{}", report::structured_text(&r));
    Ok(())
}

fn map_with<S: System + Clone>(cfg: &ScenarioConfig, sc: Scenario<S>, kind: MapKind, order: u8) -> Result<()> {
    let step = sc.system.default_fixed_step();
    let map = match kind {
        MapKind::Da => build_da_map(&sc.system, &sc.start, 0.0, sc.horizon, order, step).stage("da map")?,
        MapKind::Dda => {
            let (_, stm) = stm_propagate(&sc.system, &sc.start, 0.0, sc.horizon, step).stage("stm")?;
            let frame = DirectionFrame::new(&stretching_direction(&stm).stage("dda map")?).stage("dda map")?;
            build_dda_map(&sc.system, &sc.start, 0.0, sc.horizon, order, &frame, step).stage("dda map")?
        }
    };
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| TuqError::io(dir, e))?;
    let p = dir.join(format!("{}_{}_map.txt", cfg.name, kind.label()));
    io::write_map(&p, &map)?;
    println!("wrote {} ({} terms max per component)", p.display(), map.max_nonconstant_terms());
    let traj = io::reference_trajectory(&sc.system, &sc.start, sc.horizon, 201, &cfg.integration.adaptive())?;
    let p = dir.join(format!("{}_reference.csv", cfg.name));
    io::write_trajectory(&p, &traj)?;
    println!("wrote {}", p.display());
    Ok(())
}

fn map(cli: &Cli, path: &Path, kind: MapKind, order: Option<u8>) -> Result<()> {
    let mut cfg = load(path, cli)?;
    if let Some(o) = order {
        cfg.maps.order = o;
        cfg.validate()?;
    }
    let order = cfg.maps.order;
    match cfg.system {
        SystemConfig::Cr3bp { .. } => map_with(&cfg, cr3bp_scenario(&cfg)?, kind, order),
        SystemConfig::Aerocapture { .. } => map_with(&cfg, aerocapture_scenario(&cfg)?, kind, order),
    }
}

fn read_points(path: &Path) -> Result<Vec<[f64; 2]>> {
    let text = std::fs::read_to_string(path).map_err(|e| TuqError::io(path, e))?;
    let table = report::CsvTable::parse(&text)?;
    let (x, y) = (table.column_f64("x")?, table.column_f64("y")?);
    Ok(x.into_iter().zip(y).map(|(a, b)| [a, b]).collect())
}

#[allow(clippy::too_many_arguments)]
fn contour(
    cli: &Cli,
    path: &Path,
    slice: [usize; 2],
    k: f64,
    kind: CurveKind,
    points: usize,
    coverage_of: Option<&Path>,
) -> Result<()> {
    let file = io::read_moments(path)?;
    let m = file.to_moments()?;
    let spec = SliceSpec::new(slice[0], slice[1], k).map_err(|e| TuqError::config(e.to_string()))?;
    let (mu, sigma) = spec.mean_covariance(&m).map_err(|e| TuqError::config(e.to_string()))?;
    let curve = match (kind, &m.third, &m.fourth) {
        (CurveKind::Ellipse, _, _) => gaussian_ellipse(mu, &sigma, k, points).stage("ellipse")?,
        (CurveKind::Banana, Some(t3), Some(t4)) => {
            let frame = whiten(mu, &sigma).stage("banana")?;
            let pm = projected_moments_from_tensors(t3, t4, &spec, &frame).stage("banana")?;
            banana_contour(mu, &sigma, &pm, k, points).stage("banana")?
        }
        (CurveKind::Banana, _, _) => {
            return Err(TuqError::config("banana contour needs third and fourth moments in the moments file"))
        }
    };
    let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| TuqError::io(&dir, e))?;
    write(dir.join(format!("{}_{}.csv", file.label, curve.kind().label())), &io::contour_csv(&curve))?;
    if curve.fallback {
        println!("fourth moment degenerate; wrote the ellipse instead");
    }
    if let Some(p) = coverage_of {
        let pts = read_points(p)?;
        let c = coverage(&curve, &pts).stage("coverage")?;
        println!("coverage {:.2}% of {} samples", 100.0 * c, pts.len());
    }
    Ok(())
}

fn bench_cmd(cli: &Cli, path: &Path, counts: &[usize]) -> Result<()> {
    let cfg = load(path, cli)?;
    let counts = cli.samples.map_or_else(|| counts.to_vec(), |n| vec![n]);
    let b = bench::run_bench(&cfg, &counts)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| TuqError::io(dir, e))?;
    let table = b.to_table();
    write(dir.join(format!("{}_bench.csv", cfg.name)), &table.to_csv())?;
    print!("{}", table.to_csv());
    for (name, directional) in [("da", false), ("dda", true)] {
        match b.break_even(directional) {
            Some(n) => println!("{name} map pays for itself after {n:.0} samples"),
            None => println!("{name} map evaluation is not faster than direct propagation"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run { scenario } => run(&cli, scenario),
        Command::Map { scenario, kind, order } => map(&cli, scenario, *kind, *order),
        Command::Contour { moments, slice, k, kind, points, coverage_of } => {
            contour(&cli, moments, *slice, *k, *kind, *points, coverage_of.as_deref())
        }
        Command::Bench { scenario, counts } => bench_cmd(&cli, scenario, counts),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tuq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
