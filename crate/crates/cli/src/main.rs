//! `qbisect`: property suites, samplers, and certificates for bisectors in
//! quaternionic hyperbolic space.
//!
//! Exit codes: 0 on success, 1 on property failure or rejected certificate,
//! 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qbisect_core::bisector::Bisector;
use qbisect_core::fan::FanDecomposition;
use qbisect_core::harness::{self, certificate, sampler, Backend, Scenario};
use qbisect_core::model::BallPoint;
use qbisect_core::prng::SplitMix64;
use qbisect_core::scalar::Exact;
use qbisect_core::ProjectivePoint;

#[derive(Parser)]
#[command(name = "qbisect", version, about = "Bisectors, spines, slices, and fan decompositions in quaternionic hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ScenarioArgs {
    /// Scenario JSON file; explicit flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hyperbolic dimension n (1..=8).
    #[arg(long)]
    n: Option<usize>,
    /// Master seed for all sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Scalar backend.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Float-backend relative comparison tolerance τ.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Run the property suites and print the report JSON.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a deterministic point-cloud sample with membership residuals.
    Sample {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Which locus to sample.
        #[arg(long, value_enum, default_value = "bisector")]
        what: SampleWhat,
        /// Number of points.
        #[arg(long, default_value_t = 32)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a machine-checkable certificate (exact backend only).
    Certify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate transcript.
    Check {
        /// Path to the certificate JSON.
        certificate: PathBuf,
    },
    /// Walk through the standard example configuration.
    Demo,
    /// Build the bisector of two ball points and emit spine/slice/sample data.
    Bisector {
        /// First point: JSON n-array of quaternion 4-arrays.
        #[arg(long)]
        p1: String,
        /// Second point: JSON n-array of quaternion 4-arrays.
        #[arg(long)]
        p2: String,
        #[arg(long, value_enum, default_value = "spine")]
        emit: BisectorEmit,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build fan decompositions per a JSON config and report per-blade data.
    Fan {
        /// JSON config: {"n":2,"seed":1,"center":"midpoint","selectors":3,"trials":16}
        #[arg(long)]
        config: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleWhat {
    Bisector,
    Spine,
    Slice,
    Blade,
}

#[derive(Clone, Copy, ValueEnum)]
enum BisectorEmit {
    Spine,
    Slice,
    Samples,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn load_scenario(args: &ScenarioArgs) -> Result<Scenario, UsageError> {
    let mut scenario: Scenario = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| UsageError(format!("config: {e}")))?
        }
        None => Scenario::default(),
    };
    if let Some(n) = args.n {
        scenario.n = n;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(backend) = args.backend {
        scenario.backend = match backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        };
    }
    if let Some(tol) = args.tolerance {
        scenario.tolerance = tol;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn write_out(out: Option<PathBuf>, text: &str) -> Result<(), UsageError> {
    match out {
        Some(path) => fs::write(&path, text)
            .map_err(|e| UsageError(format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode, UsageError> {
    match cli.command {
        Command::Run { scenario, out } => {
            let scenario = load_scenario(&scenario)?;
            let start = Instant::now();
            let report = harness::run(&scenario)?;
            let elapsed = start.elapsed();
            for suite in &report.suites {
                eprintln!(
                    "suite {:<10} {:>6} trials  {:>6} passes  {:>3} failures  max residual {:.3e}",
                    suite.name, suite.trials, suite.passes, suite.failures, suite.max_residual
                );
                for v in &suite.violations {
                    eprintln!("    violation: {v}");
                }
            }
            eprintln!("wall time: {elapsed:?} (not part of the report)");
            write_out(out, &report.to_json())?;
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sample { scenario, what, count, out } => {
            let scenario = load_scenario(&scenario)?;
            if scenario.backend != Backend::Exact {
                return Err(UsageError("sample currently runs on the exact backend".into()));
            }
            let text = sample_cloud(&scenario, what, count)?;
            write_out(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { scenario, out } => {
            let scenario = load_scenario(&scenario)?;
            let cert = certificate::certify(&scenario)?;
            let text = serde_json::to_string_pretty(&cert).expect("certificate serializes");
            write_out(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { certificate: path } => {
            let text = fs::read_to_string(&path)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            let cert: certificate::Certificate = match serde_json::from_str(&text) {
                Ok(cert) => cert,
                Err(e) => {
                    eprintln!("rejected: malformed certificate: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            match certificate::check(&cert) {
                Ok(()) => {
                    eprintln!("accepted: {} entries verified", cert.entries.len());
                    Ok(ExitCode::SUCCESS)
                }
                Err(failure) => {
                    eprintln!("rejected: {failure}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Demo => {
            demo();
            Ok(ExitCode::SUCCESS)
        }
        Command::Bisector { p1, p2, emit, count, seed } => {
            let text = bisector_report(&p1, &p2, emit, count, seed)?;
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Fan { config } => {
            let text = fan_report(&config)?;
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn sample_cloud(scenario: &Scenario, what: SampleWhat, count: usize) -> Result<String, UsageError> {
    let mut rng = SplitMix64::new(scenario.seed).split_labeled("sample");
    let n = scenario.n;
    let b: Bisector<Exact> = sampler::bisector(&mut rng, n);
    let mut points = Vec::with_capacity(count);
    let label = match what {
        SampleWhat::Bisector => "bisector",
        SampleWhat::Spine => "spine",
        SampleWhat::Slice => "slice",
        SampleWhat::Blade => "blade",
    };
    match what {
        SampleWhat::Bisector => {
            for _ in 0..count {
                let p = sampler::bisector_point(&b, &mut rng);
                points.push(point_entry(&b, &p)?);
            }
        }
        SampleWhat::Spine => {
            for _ in 0..count {
                let p = sampler::sigma_point(&b, &mut rng);
                points.push(point_entry(&b, &p)?);
            }
        }
        SampleWhat::Slice => {
            let s = sampler::sigma_point(&b, &mut rng);
            let slice = b.slice_at(&s).map_err(|e| UsageError(e.to_string()))?;
            while points.len() < count {
                if let Some(p) = sampler::slice_point(&b, &slice, &mut rng) {
                    points.push(point_entry(&b, &p)?);
                }
            }
        }
        SampleWhat::Blade => {
            let fan = FanDecomposition::at_midpoint(b.clone())
                .map_err(|e| UsageError(e.to_string()))?;
            let blade = fan.blade(0, 0).map_err(|e| UsageError(e.to_string()))?;
            for p in blade.sample_points(&mut rng, count) {
                points.push(point_entry(&b, &p)?);
            }
        }
    }
    let doc = serde_json::json!({
        "schema": "qbisect/sample/v1",
        "what": label,
        "n": n,
        "seed": scenario.seed,
        "count": points.len(),
        "points": points,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("sample serializes"))
}

fn point_entry(
    b: &Bisector<Exact>,
    p: &ProjectivePoint<Exact>,
) -> Result<serde_json::Value, UsageError> {
    let ball = p.to_ball().map_err(|e| UsageError(e.to_string()))?;
    let residual = b.membership_residual(p).map_err(|e| UsageError(e.to_string()))?;
    Ok(serde_json::json!({
        "ball": ball,
        "residual": residual,
    }))
}

fn parse_ball(text: &str) -> Result<BallPoint<Exact>, UsageError> {
    serde_json::from_str(text).map_err(|e| UsageError(format!("ball point: {e}")))
}

fn bisector_report(
    p1: &str,
    p2: &str,
    emit: BisectorEmit,
    count: usize,
    seed: u64,
) -> Result<String, UsageError> {
    let a = parse_ball(p1)?;
    let bpt = parse_ball(p2)?;
    if a.n() != bpt.n() {
        return Err(UsageError("points live in different dimensions".into()));
    }
    let b = Bisector::new(&a.lift(), &bpt.lift()).map_err(|e| UsageError(e.to_string()))?;
    let mut rng = SplitMix64::new(seed).split_labeled("bisector-cli");
    let mut points = Vec::new();
    let what;
    match emit {
        BisectorEmit::Spine => {
            what = "spine";
            for _ in 0..count {
                let p = sampler::sigma_point(&b, &mut rng);
                points.push(point_entry(&b, &p)?);
            }
        }
        BisectorEmit::Slice => {
            what = "slice";
            let s = b.center.clone();
            let slice = b.slice_at(&s).map_err(|e| UsageError(e.to_string()))?;
            while points.len() < count {
                if let Some(p) = sampler::slice_point(&b, &slice, &mut rng) {
                    points.push(point_entry(&b, &p)?);
                }
            }
        }
        BisectorEmit::Samples => {
            what = "samples";
            for _ in 0..count {
                let p = sampler::bisector_point(&b, &mut rng);
                points.push(point_entry(&b, &p)?);
            }
        }
    }
    let center_ball = b.center.to_ball().map_err(|e| UsageError(e.to_string()))?;
    let doc = serde_json::json!({
        "schema": "qbisect/bisector/v1",
        "emit": what,
        "count": points.len(),
        "common_norm": b.rho.to_string(),
        "cross_product": b.cross.to_string(),
        "center": center_ball,
        "points": points,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("report serializes"))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FanConfig {
    #[serde(default = "two")]
    n: usize,
    #[serde(default = "one")]
    seed: u64,
    #[serde(default)]
    center: CenterSpec,
    #[serde(default = "three")]
    selectors: u64,
    #[serde(default = "sixteen")]
    trials: usize,
}

fn two() -> usize {
    2
}
fn one() -> u64 {
    1
}
fn three() -> u64 {
    3
}
fn sixteen() -> usize {
    16
}

#[derive(serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum CenterSpec {
    #[default]
    Midpoint,
    /// Spine parameters (μ, ν) as quaternion 4-arrays with |μ| = |ν|.
    #[serde(untagged)]
    Params {
        mu: qbisect_core::Quaternion<Exact>,
        nu: qbisect_core::Quaternion<Exact>,
    },
}

fn fan_report(config: &str) -> Result<String, UsageError> {
    let cfg: FanConfig = serde_json::from_str(config).map_err(|e| UsageError(format!("fan config: {e}")))?;
    let mut rng = SplitMix64::new(cfg.seed).split_labeled("fan-cli");
    let b: Bisector<Exact> = sampler::bisector(&mut rng, cfg.n);
    let center = match &cfg.center {
        CenterSpec::Midpoint => b.center.clone(),
        CenterSpec::Params { mu, nu } => {
            b.spine_point(mu, nu).map_err(|e| UsageError(e.to_string()))?
        }
    };
    let fan = FanDecomposition::new(b.clone(), center).map_err(|e| UsageError(e.to_string()))?;
    let mut blades = Vec::new();
    for sel in 0..cfg.selectors {
        let blade = fan.blade(sel, 0).map_err(|e| UsageError(e.to_string()))?;
        let mut inside = 0usize;
        let samples = blade.sample_points(&mut rng, cfg.trials);
        for p in &samples {
            if b.contains(p).map_err(|e| UsageError(e.to_string()))? {
                inside += 1;
            }
        }
        blades.push(serde_json::json!({
            "m_selector": sel,
            "meridian_selector": 0,
            "carrier_direction": blade.m_direction.as_quaternion().to_string(),
            "blade_direction": blade.n_direction.as_quaternion().to_string(),
            "samples": samples.len(),
            "samples_inside": inside,
        }));
    }
    // Pairwise distinctness across selectors.
    let mut distinct_pairs = 0usize;
    let mut shared_geodesic_pairs = 0usize;
    for i in 0..cfg.selectors {
        for jdx in i + 1..cfg.selectors {
            let (Ok(x), Ok(y)) = (fan.blade(i, 0), fan.blade(jdx, 0)) else { continue };
            if !x.same_set(&y) {
                distinct_pairs += 1;
                if x.intersection_is_spine_geodesic(&y, &b).unwrap_or(false) {
                    shared_geodesic_pairs += 1;
                }
            }
        }
    }
    let doc = serde_json::json!({
        "schema": "qbisect/fan/v1",
        "n": cfg.n,
        "seed": cfg.seed,
        "blades": blades,
        "distinct_pairs": distinct_pairs,
        "pairs_meeting_in_spine_geodesic": shared_geodesic_pairs,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("fan report serializes"))
}

fn demo() {
    use qbisect_core::Quaternion;
    let s = |num: i64, den: i64| <Exact as qbisect_core::Scalar>::from_ratio(num, den);
    println!("Bisector of ball(1/2, 0) and ball(-1/2, 0) in dimension 2");
    let p1 = BallPoint::new(vec![Quaternion::from_real(s(1, 2)), Quaternion::zero()])
        .unwrap()
        .lift();
    let p2 = BallPoint::new(vec![Quaternion::from_real(s(-1, 2)), Quaternion::zero()])
        .unwrap()
        .lift();
    let b = Bisector::new(&p1, &p2).unwrap();
    println!("  common lift norm ⟨P,P⟩      = {}", b.rho);
    println!("  cross product ⟨P₁,P₂⟩      = {}", b.cross);
    println!("  center (midpoint)          = origin: {}", b.center.to_ball().unwrap().coords()[0]);

    let on = BallPoint::new(vec![Quaternion::zero(), Quaternion::<Exact>::k().scale(&s(1, 2))])
        .unwrap()
        .lift();
    println!("  contains ball(0, k/2)      = {}", b.contains(&on).unwrap());

    let p = BallPoint::new(vec![
        Quaternion::<Exact>::j().scale(&s(1, 2)),
        Quaternion::<Exact>::k().scale(&s(1, 2)),
    ])
    .unwrap()
    .lift();
    let q = b.project_to_spine(&p).unwrap();
    let r = BallPoint::new(vec![Quaternion::from_real(s(1, 2)), Quaternion::zero()])
        .unwrap()
        .lift();
    let triple = qbisect_core::bisector::hermitian_triple(&p, &q, &r).unwrap();
    println!("  triple ⟨P,ΠP⟩⟨ΠP,R⟩⟨R,P⟩   = {triple}   (real)");

    let fan = FanDecomposition::at_midpoint(b.clone()).unwrap();
    let blade = fan.blade(0, 0).unwrap();
    println!(
        "  fan blade at the midpoint: carrier direction {}, blade direction {}",
        blade.m_direction.as_quaternion(),
        blade.n_direction.as_quaternion()
    );
    let mut rng = SplitMix64::new(7);
    let samples = blade.sample_points(&mut rng, 8);
    let inside = samples.iter().filter(|x| b.contains(x).unwrap()).count();
    println!("  blade samples inside the bisector: {inside}/{}", samples.len());

    let cert = qbisect_core::fan::starlike_certificate(&b, &b.center.clone(), &on).unwrap();
    println!(
        "  starlike certificate through ball(0, k/2): blade holds both endpoints = {}",
        cert.blade.contains(&on)
    );
}
