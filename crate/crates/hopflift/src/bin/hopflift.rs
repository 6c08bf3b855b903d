//! Command-line front end: generate point sets, evaluate energies, print
//! expected values, run seeded Monte Carlo estimates, and sweep parameters.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use hopflift::diamond::{build_diamond, build_lift_base, diamond_rj_ansatz, DiamondSpec};
use hopflift::dpp::{build_projection_kernel, hkpv_sample, EnsembleFamily};
use hopflift::energy::{hopf_lift, log_energy, log_energy_s2, EnergyError};
use hopflift::expectations::ExpectError;
use hopflift::geometry::{SurfacePoint2, SurfacePoint3};
use hopflift::harness::{
    mc_estimate_at, ExperimentConfig, Family, HarnessError, KRule, OutputFormat,
    RowWriter,
};
use hopflift::sampling::{
    antipodal_augment, sample_uniform_s2, sample_uniform_s3, SeededStream,
};
use hopflift::specfun::SpecFunError;

#[derive(Parser)]
#[command(
    name = "hopflift",
    version,
    about = "Random low-energy point families on the 2- and 3-sphere",
    long_about = "Builds random point families on the 3-sphere by lifting \
structured 2-sphere configurations through the Hopf fibration, evaluates \
their discrete logarithmic energy, and validates closed-form expected \
energies by seeded Monte Carlo. Thread count follows RAYON_NUM_THREADS."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one configuration and write its coordinates as headerless CSV.
    Generate(GenerateArgs),
    /// Evaluate the logarithmic energy of points read from a CSV file.
    Energy(EnergyArgs),
    /// Print a family's expected energy (closed form or quadrature).
    Expect(FamilySelect),
    /// Monte Carlo estimate: mean and standard error over seeded runs.
    Mc(McArgs),
    /// Sweep a family parameter, emitting one result row per value.
    Sweep(SweepArgs),
    /// Emit the standard diamond α-sweep series used in the figures.
    Figure(FigureArgs),
}

/// Flags that pick a family and its parameters. A JSON config file given
/// via --config overrides any overlapping flags.
#[derive(Args, Debug, Clone)]
struct FamilySelect {
    /// Family: uniform-s3 | antipodal-s3 | lifted-uniform | lifted-antipodal
    /// | lifted-spherical | lifted-harmonic | lifted-diamond | diamond-s2.
    #[arg(long)]
    family: Option<String>,
    /// Point count for uniform-s3/antipodal-s3; base-point count for
    /// lifted-uniform/lifted-antipodal.
    #[arg(long)]
    n: Option<u64>,
    /// Kernel rank r of the spherical ensemble.
    #[arg(long)]
    r: Option<u32>,
    /// Maximal degree L of the harmonic ensemble.
    #[arg(long)]
    degree: Option<u32>,
    /// Number of diamond parallels (uses the standard per-parallel counts).
    #[arg(long)]
    parallels: Option<u32>,
    /// File with one points-per-parallel integer per line (overrides
    /// --parallels).
    #[arg(long)]
    rj: Option<PathBuf>,
    /// Points per fibre (overrides the family's default k-rule).
    #[arg(long)]
    k: Option<u32>,
    /// Exponent for the diamond rule k = max(1, round(p^α)).
    #[arg(long)]
    alpha: Option<f64>,
    /// JSON config file; its fields override the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Optional JSON mirror of the family/run flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    family: Option<String>,
    n: Option<u64>,
    r: Option<u32>,
    degree: Option<u32>,
    parallels: Option<u32>,
    rj: Option<Vec<u32>>,
    k: Option<u32>,
    alpha: Option<f64>,
    runs: Option<u32>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    select: FamilySelect,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file (defaults to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    /// CSV file with one point per row: x,y,z for the 2-sphere or
    /// x,y,z,w for the 3-sphere.
    #[arg(long = "in")]
    input: PathBuf,
    /// Force the ambient dimension (3 or 4) instead of inferring it from
    /// the column count.
    #[arg(long)]
    dim: Option<u8>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    select: FamilySelect,
    /// Number of independent runs.
    #[arg(long, default_value_t = 100)]
    runs: u32,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file (defaults to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    select: FamilySelect,
    /// Comma-separated parameter values: parallels p for lifted-diamond,
    /// points-per-fibre k for lifted-uniform/lifted-antipodal, rank r for
    /// lifted-spherical, degree L for lifted-harmonic.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<u64>,
    /// Number of independent runs per value.
    #[arg(long, default_value_t = 5)]
    runs: u32,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file (defaults to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct FigureArgs {
    /// Diamond parallel counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![8u64, 12, 16, 20, 24, 27])]
    values: Vec<u64>,
    /// Sweep exponent for k = max(1, round(p^α)).
    #[arg(long, default_value_t = 1.2)]
    alpha: f64,
    /// Number of independent runs per value.
    #[arg(long, default_value_t = 5)]
    runs: u32,
    /// Master seed.
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// Output file (defaults to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 2 = validation problem, 3 = quadrature nonconvergence, 1 = anything else.
fn exit_code_for(err: &HarnessError) -> u8 {
    match err {
        HarnessError::InvalidConfig(_) | HarnessError::Diamond(_) => 2,
        HarnessError::Expect(ExpectError::Quadrature(SpecFunError::NonConvergence {
            ..
        })) => 3,
        HarnessError::Expect(_) => 2,
        HarnessError::Energy(EnergyError::CoincidentPoints { .. })
        | HarnessError::Energy(EnergyError::ZeroFibreCount)
        | HarnessError::Energy(EnergyError::Geometry(_)) => 2,
        HarnessError::Dpp(_) => 2,
        _ => 1,
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::InvalidConfig(msg.into())
}

/// The fully merged family/run options after applying --config.
#[derive(Debug, Clone)]
struct Resolved {
    family_name: String,
    n: Option<u64>,
    r: Option<u32>,
    degree: Option<u32>,
    rj: Option<Vec<u32>>,
    k: Option<u32>,
    alpha: Option<f64>,
    runs: Option<u32>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
}

fn load_config(path: &Path) -> Result<ConfigFile, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn read_rj_file(path: &Path) -> Result<Vec<u32>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rj = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: u32 = line.parse().map_err(|_| {
            invalid(format!(
                "{}:{}: expected one integer per line, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        rj.push(v);
    }
    if rj.is_empty() {
        return Err(invalid(format!("{}: no parallel counts found", path.display())));
    }
    Ok(rj)
}

impl FamilySelect {
    /// Merge flags with the optional JSON config (config wins).
    fn resolve(&self) -> Result<Resolved, HarnessError> {
        let cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        let rj_from_flag = match &self.rj {
            Some(path) => Some(read_rj_file(path)?),
            None => None,
        };
        let rj = cfg.rj.clone().or(rj_from_flag).or_else(|| {
            cfg.parallels
                .or(self.parallels)
                .map(|p| diamond_rj_ansatz(p.max(1)))
        });
        let format = match cfg.format.as_deref() {
            Some(s) => Some(s.parse::<OutputFormat>().map_err(invalid)?),
            None => None,
        };
        let family_name = cfg
            .family
            .clone()
            .or_else(|| self.family.clone())
            .ok_or_else(|| invalid("--family is required (or set it in --config)"))?;
        Ok(Resolved {
            family_name,
            n: cfg.n.or(self.n),
            r: cfg.r.or(self.r),
            degree: cfg.degree.or(self.degree),
            rj,
            k: cfg.k.or(self.k),
            alpha: cfg.alpha.or(self.alpha),
            runs: cfg.runs,
            seed: cfg.seed,
            out: cfg.out,
            format,
        })
    }
}

impl Resolved {
    fn need_n(&self) -> Result<u64, HarnessError> {
        self.n.ok_or_else(|| invalid("this family needs --n"))
    }

    fn family(&self) -> Result<Family, HarnessError> {
        match self.family_name.as_str() {
            "uniform-s3" => Ok(Family::UniformS3 { n: self.need_n()? }),
            "antipodal-s3" => Ok(Family::AntipodalS3 { n: self.need_n()? }),
            "lifted-uniform" => Ok(Family::LiftedUniform { base_points: self.need_n()? }),
            "lifted-antipodal" => {
                Ok(Family::LiftedAntipodal { base_points: self.need_n()? })
            }
            "lifted-spherical" => Ok(Family::LiftedSpherical {
                r: self.r.ok_or_else(|| invalid("lifted-spherical needs --r"))?,
            }),
            "lifted-harmonic" => Ok(Family::LiftedHarmonic {
                degree: self
                    .degree
                    .ok_or_else(|| invalid("lifted-harmonic needs --degree"))?,
            }),
            "lifted-diamond" => Ok(Family::LiftedDiamond {
                rj: self
                    .rj
                    .clone()
                    .ok_or_else(|| invalid("lifted-diamond needs --parallels or --rj"))?,
            }),
            other => Err(invalid(format!(
                "unknown family {other:?} (see --help for the list)"
            ))),
        }
    }

    /// Default k-rule: explicit --k wins; otherwise each lifted family gets
    /// its natural rule (uniform 4, antipodal 7, spherical/harmonic their
    /// optima, diamond the α-rule with α defaulting to 1.2).
    fn k_rule(&self, family: &Family) -> KRule {
        if let Some(k) = self.k {
            return KRule::Explicit { k };
        }
        match family {
            Family::LiftedUniform { .. } => KRule::Explicit { k: 4 },
            Family::LiftedAntipodal { .. } => KRule::Explicit { k: 7 },
            Family::LiftedSpherical { .. } => KRule::Spherical,
            Family::LiftedHarmonic { .. } => KRule::Harmonic,
            Family::LiftedDiamond { .. } => {
                KRule::Alpha { alpha: self.alpha.unwrap_or(1.2) }
            }
            _ => KRule::Explicit { k: 1 },
        }
    }

    fn experiment(&self, runs: u32, seed: u64) -> Result<ExperimentConfig, HarnessError> {
        let family = self.family()?;
        let k_rule = self.k_rule(&family);
        Ok(ExperimentConfig {
            family,
            k_rule,
            runs: self.runs.unwrap_or(runs),
            seed: self.seed.unwrap_or(seed),
        })
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Generate(args) => generate(&args),
        Command::Energy(args) => energy_from_csv(&args),
        Command::Expect(select) => expect(&select),
        Command::Mc(args) => mc(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Figure(args) => figure(&args),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn std::io::Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|source| HarnessError::Io {
            path: p.to_path_buf(),
            source,
        })?),
        None => Box::new(std::io::stdout()),
    })
}

fn write_coords(
    out: &mut dyn std::io::Write,
    rows: impl Iterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

fn generate(args: &GenerateArgs) -> Result<(), HarnessError> {
    let resolved = args.select.resolve()?;
    let seed = resolved.seed.unwrap_or(args.seed);
    let mut rng = SeededStream::new(seed, 0);
    let out_path = resolved.out.clone().or_else(|| args.out.clone());
    let mut out = open_out(out_path.as_deref())?;
    let io = |source| HarnessError::Io {
        path: out_path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    };

    // diamond-s2 is a generate-only family: the 2-sphere configuration
    // itself, poles included.
    if resolved.family_name == "diamond-s2" {
        let rj = resolved
            .rj
            .clone()
            .ok_or_else(|| invalid("diamond-s2 needs --parallels or --rj"))?;
        let spec = DiamondSpec::from_rj(rj)?;
        let pts = build_diamond(&spec, &mut rng);
        return write_coords(&mut *out, pts.iter().map(|p| p.coords().to_vec()))
            .map_err(io);
    }

    let family = resolved.family()?;
    let config = ExperimentConfig {
        family: family.clone(),
        k_rule: resolved.k_rule(&family),
        runs: 1,
        seed,
    };
    config.validate()?;
    let k = config.resolve_k()?;
    let points: Vec<SurfacePoint3> = match &family {
        Family::UniformS3 { n } => sample_uniform_s3(*n as usize, &mut rng),
        Family::AntipodalS3 { n } => {
            antipodal_augment(&sample_uniform_s3((*n / 2) as usize, &mut rng))
        }
        Family::LiftedUniform { base_points } => {
            let base = sample_uniform_s2(*base_points as usize, &mut rng);
            hopf_lift(&base, k, &mut rng)?
        }
        Family::LiftedAntipodal { base_points } => {
            let half = sample_uniform_s2((*base_points / 2) as usize, &mut rng);
            hopf_lift(&antipodal_augment(&half), k, &mut rng)?
        }
        Family::LiftedSpherical { r } => {
            let kernel = build_projection_kernel(EnsembleFamily::Spherical { r: *r });
            let base = hkpv_sample(&kernel, &mut rng)?;
            hopf_lift(&base, k, &mut rng)?
        }
        Family::LiftedHarmonic { degree } => {
            let kernel =
                build_projection_kernel(EnsembleFamily::Harmonic { degree: *degree });
            let base = hkpv_sample(&kernel, &mut rng)?;
            hopf_lift(&base, k, &mut rng)?
        }
        Family::LiftedDiamond { rj } => {
            let spec = DiamondSpec::from_rj(rj.clone())?;
            let base = build_lift_base(&spec, &mut rng);
            hopf_lift(&base, k, &mut rng)?
        }
    };
    write_coords(&mut *out, points.iter().map(|p| p.coords().to_vec())).map_err(io)
}

fn energy_from_csv(args: &EnergyArgs) -> Result<(), HarnessError> {
    let file = std::fs::File::open(&args.input).map_err(|source| HarnessError::Io {
        path: args.input.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row: Vec<f64> = record
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("bad coordinate {s:?}")))
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(invalid("no points in input"));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(invalid("rows have inconsistent column counts"));
    }
    let dim = match args.dim {
        Some(d) => usize::from(d),
        None => width,
    };
    if dim != width {
        return Err(invalid(format!(
            "--dim {dim} does not match the {width} columns in the file"
        )));
    }
    let energy = match dim {
        3 => {
            let pts: Vec<SurfacePoint2> = rows
                .iter()
                .map(|r| SurfacePoint2::new(r[0], r[1], r[2]))
                .collect::<Result<_, _>>()
                .map_err(EnergyError::Geometry)?;
            log_energy_s2(&pts)?
        }
        4 => {
            let pts: Vec<SurfacePoint3> = rows
                .iter()
                .map(|r| SurfacePoint3::new(r[0], r[1], r[2], r[3]))
                .collect::<Result<_, _>>()
                .map_err(EnergyError::Geometry)?;
            log_energy(&pts)?
        }
        other => return Err(invalid(format!("dimension must be 3 or 4, got {other}"))),
    };
    println!("{}", serde_json::json!({ "n": rows.len(), "energy": energy }));
    Ok(())
}

fn expect(select: &FamilySelect) -> Result<(), HarnessError> {
    let resolved = select.resolve()?;
    let config = resolved.experiment(1, 0)?;
    config.validate()?;
    let k = config.resolve_k()?;
    let n = config.total_points()?;
    let value = config
        .closed_form()?
        .expect("every implemented family has an expected energy");
    println!(
        "{}",
        serde_json::json!({
            "family": resolved.family_name,
            "N": n,
            "k": k,
            "expected_energy": value,
        })
    );
    Ok(())
}

fn mc(args: &McArgs) -> Result<(), HarnessError> {
    let resolved = args.select.resolve()?;
    let config = resolved.experiment(args.runs, args.seed)?;
    let row = mc_estimate_at(&config, 0)?;
    let out = resolved.out.clone().or_else(|| args.out.clone());
    let format = resolved.format.unwrap_or(args.format);
    let mut writer = RowWriter::create(out.as_deref(), format)?;
    writer.write_row(&row)?;
    writer.finish()
}

/// Build the per-value experiment list for `sweep`.
fn sweep_configs(
    resolved: &Resolved,
    values: &[u64],
    runs: u32,
    seed: u64,
) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let as_u32 = |v: u64, what: &str| -> Result<u32, HarnessError> {
        u32::try_from(v).map_err(|_| invalid(format!("{what} {v} is out of range")))
    };
    values
        .iter()
        .map(|&v| {
            let (family, k_rule) = match resolved.family_name.as_str() {
                "lifted-diamond" => (
                    Family::LiftedDiamond {
                        rj: diamond_rj_ansatz(as_u32(v, "parallel count")?.max(1)),
                    },
                    KRule::Alpha { alpha: resolved.alpha.unwrap_or(1.2) },
                ),
                "lifted-uniform" => (
                    Family::LiftedUniform { base_points: resolved.need_n()? },
                    KRule::Explicit { k: as_u32(v, "k")? },
                ),
                "lifted-antipodal" => (
                    Family::LiftedAntipodal { base_points: resolved.need_n()? },
                    KRule::Explicit { k: as_u32(v, "k")? },
                ),
                "lifted-spherical" => {
                    let family = Family::LiftedSpherical { r: as_u32(v, "rank")? };
                    let rule = match resolved.k {
                        Some(k) => KRule::Explicit { k },
                        None => KRule::Spherical,
                    };
                    (family, rule)
                }
                "lifted-harmonic" => {
                    let family =
                        Family::LiftedHarmonic { degree: as_u32(v, "degree")? };
                    let rule = match resolved.k {
                        Some(k) => KRule::Explicit { k },
                        None => KRule::Harmonic,
                    };
                    (family, rule)
                }
                other => {
                    return Err(invalid(format!(
                        "sweep supports the lifted families, not {other:?}"
                    )));
                }
            };
            Ok(ExperimentConfig {
                family,
                k_rule,
                runs: resolved.runs.unwrap_or(runs),
                seed: resolved.seed.unwrap_or(seed),
            })
        })
        .collect()
}

fn sweep(args: &SweepArgs) -> Result<(), HarnessError> {
    let resolved = args.select.resolve()?;
    let configs = sweep_configs(&resolved, &args.values, args.runs, args.seed)?;
    let out = resolved.out.clone().or_else(|| args.out.clone());
    let format = resolved.format.unwrap_or(args.format);
    stream_rows(&configs, out.as_deref(), format)
}

fn figure(args: &FigureArgs) -> Result<(), HarnessError> {
    let resolved = Resolved {
        family_name: "lifted-diamond".into(),
        n: None,
        r: None,
        degree: None,
        rj: None,
        k: None,
        alpha: Some(args.alpha),
        runs: None,
        seed: None,
        out: None,
        format: None,
    };
    let configs = sweep_configs(&resolved, &args.values, args.runs, args.seed)?;
    stream_rows(&configs, args.out.as_deref(), args.format)
}

/// Run each experiment in turn, writing and flushing its row immediately so
/// an interrupted sweep keeps its completed rows.
fn stream_rows(
    configs: &[ExperimentConfig],
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<(), HarnessError> {
    let mut writer = RowWriter::create(out, format)?;
    let mut offset = 0u64;
    for config in configs {
        let row = mc_estimate_at(config, offset)?;
        writer.write_row(&row)?;
        offset += u64::from(config.runs);
    }
    writer.finish()
}
