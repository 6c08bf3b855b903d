//! Experiment runner: seeded Monte Carlo estimation over independent
//! substreams, parameter sweeps (including the diamond α-sweep), and result
//! persistence as CSV or JSON with streaming row writes.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diamond::{build_lift_base, diamond_rj_ansatz, DiamondError, DiamondSpec};
use crate::dpp::{build_projection_kernel, hkpv_sample, DppError, EnsembleFamily};
use crate::energy::{hopf_lift, log_energy, EnergyError};
use crate::expectations::{
    expected_lifted_antipodal, expected_lifted_diamond_semianalytic,
    expected_lifted_dpp, expected_lifted_spherical_closed, expected_lifted_uniform,
    expected_uniform_s3, expected_uniform_s3_antipodal, harmonic_k_rule,
    normalized_series, ExpectError,
};
use crate::sampling::{antipodal_augment, sample_uniform_s2, sample_uniform_s3, SeededStream};
use crate::specfun::QuadratureSpec;
use crate::stats::mean_and_se;

/// Errors from experiment configuration, execution, or persistence.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration fails family-specific validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// An I/O failure, annotated with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        /// File the operation touched.
        path: PathBuf,
        /// Underlying I/O error.
        #[source]
        source: std::io::Error,
    },
    /// CSV serialization failure.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// JSON serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// Expectation-formula failure (quadrature included).
    #[error(transparent)]
    Expect(#[from] ExpectError),
    /// Energy-evaluation failure.
    #[error(transparent)]
    Energy(#[from] EnergyError),
    /// Determinantal-sampler failure.
    #[error(transparent)]
    Dpp(#[from] DppError),
    /// Diamond-construction failure.
    #[error(transparent)]
    Diamond(#[from] DiamondError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// The point family an experiment draws from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Family {
    /// `n` independent uniform points on the 3-sphere.
    UniformS3 {
        /// Total points.
        n: u64,
    },
    /// `n/2` uniform points on the 3-sphere plus their antipodes.
    AntipodalS3 {
        /// Total points (must be even).
        n: u64,
    },
    /// Lift of `base_points` independent uniform points on the 2-sphere.
    LiftedUniform {
        /// Number of base points.
        base_points: u64,
    },
    /// Lift of `base_points/2` uniform 2-sphere points plus their antipodes.
    LiftedAntipodal {
        /// Number of base points (must be even).
        base_points: u64,
    },
    /// Lift of one draw of the rank-`r` spherical determinantal ensemble.
    LiftedSpherical {
        /// Kernel rank.
        r: u32,
    },
    /// Lift of one draw of the degree-`L` harmonic determinantal ensemble.
    LiftedHarmonic {
        /// Maximal harmonic degree.
        degree: u32,
    },
    /// Lift of a diamond configuration (poles removed) with the given
    /// points-per-parallel counts.
    LiftedDiamond {
        /// Points on each parallel, north to south.
        rj: Vec<u32>,
    },
}

/// How the points-per-fibre count `k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum KRule {
    /// A fixed `k`.
    Explicit {
        /// Points per fibre.
        k: u32,
    },
    /// `k = max(1, round(p^α))` from the diamond parallel count `p`.
    Alpha {
        /// Sweep exponent.
        alpha: f64,
    },
    /// `k = max(1, round(√(64 r / 9π)))`, the spherical-family optimum.
    Spherical,
    /// `k = ⌊√r / log r⌋` from the kernel rank `r`.
    Harmonic,
}

/// A complete Monte Carlo experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Point family to draw.
    pub family: Family,
    /// Rule selecting points per fibre (ignored by the unlifted families).
    pub k_rule: KRule,
    /// Number of independent runs.
    pub runs: u32,
    /// Master seed; run `i` uses the substream `(seed, offset + i)`.
    pub seed: u64,
}

/// One emitted experiment result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Total number of points in each energy evaluation.
    #[serde(rename = "N")]
    pub n: u64,
    /// Points per fibre (1 for unlifted families).
    pub k: u32,
    /// Family parameter: `n` (uniform), base points (lifted uniform),
    /// rank `r` (spherical), degree `L` (harmonic), parallels `p` (diamond).
    pub param: f64,
    /// Monte Carlo mean energy.
    pub energy_mean: f64,
    /// Standard error of the mean.
    pub energy_se: f64,
    /// Closed-form or semianalytic expectation, when one exists.
    pub closed_form: Option<f64>,
    /// First normalized series value `(E + N²/4)/(N log N)`.
    pub n1: f64,
    /// Second normalized series value `(E + N²/4 + N log N/3)/N`.
    pub n2: f64,
    /// Wall-clock seconds spent on the Monte Carlo loop.
    pub wall_time_s: f64,
}

impl ExperimentConfig {
    /// Validate run count and family parameters.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs < 1 {
            return Err(HarnessError::InvalidConfig("runs must be >= 1".into()));
        }
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        match &self.family {
            Family::UniformS3 { n } if *n < 1 => bad("n must be >= 1".into()),
            Family::AntipodalS3 { n } if *n < 2 || n % 2 != 0 => {
                bad(format!("antipodal family needs an even n >= 2, got {n}"))
            }
            Family::LiftedUniform { base_points } if *base_points < 1 => {
                bad("base_points must be >= 1".into())
            }
            Family::LiftedAntipodal { base_points }
                if *base_points < 2 || base_points % 2 != 0 =>
            {
                bad(format!(
                    "antipodal lift needs an even base_points >= 2, got {base_points}"
                ))
            }
            Family::LiftedSpherical { r } if *r < 1 => bad("r must be >= 1".into()),
            Family::LiftedDiamond { rj } if rj.is_empty() => {
                bad("diamond needs at least one parallel".into())
            }
            Family::LiftedDiamond { rj } if rj.iter().any(|&r| r == 0) => {
                bad("diamond parallels must be non-empty".into())
            }
            _ => Ok(()),
        }?;
        // Resolving k exercises the k-rule/family compatibility checks.
        self.resolve_k().map(|_| ())
    }

    /// The family's scalar parameter as reported in result rows.
    #[must_use]
    pub fn param(&self) -> f64 {
        match &self.family {
            Family::UniformS3 { n } | Family::AntipodalS3 { n } => *n as f64,
            Family::LiftedUniform { base_points }
            | Family::LiftedAntipodal { base_points } => *base_points as f64,
            Family::LiftedSpherical { r } => f64::from(*r),
            Family::LiftedHarmonic { degree } => f64::from(*degree),
            Family::LiftedDiamond { rj } => rj.len() as f64,
        }
    }

    /// Resolve the points-per-fibre count from the configured rule.
    pub fn resolve_k(&self) -> Result<u32, HarnessError> {
        let k = match (&self.k_rule, &self.family) {
            (_, Family::UniformS3 { .. }) | (_, Family::AntipodalS3 { .. }) => 1,
            (KRule::Explicit { k }, _) => {
                if *k < 1 {
                    return Err(HarnessError::InvalidConfig("k must be >= 1".into()));
                }
                *k
            }
            (KRule::Alpha { alpha }, Family::LiftedDiamond { rj }) => {
                if !(*alpha > 0.0) {
                    return Err(HarnessError::InvalidConfig(
                        "alpha must be positive".into(),
                    ));
                }
                let p = rj.len() as f64;
                p.powf(*alpha).round().max(1.0) as u32
            }
            (KRule::Spherical, Family::LiftedSpherical { r }) => {
                let ks = 9.0 * std::f64::consts::PI / 64.0;
                (f64::from(*r) / ks).sqrt().round().max(1.0) as u32
            }
            (KRule::Harmonic, Family::LiftedHarmonic { degree }) => {
                let rank = u64::from(*degree + 1) * u64::from(*degree + 1);
                u32::try_from(harmonic_k_rule(rank)?).map_err(|_| {
                    HarnessError::InvalidConfig("k-rule overflowed u32".into())
                })?
            }
            (rule, family) => {
                return Err(HarnessError::InvalidConfig(format!(
                    "k-rule {rule:?} does not apply to family {family:?}"
                )));
            }
        };
        Ok(k)
    }

    /// Total points per energy evaluation once `k` is resolved.
    pub fn total_points(&self) -> Result<u64, HarnessError> {
        let k = u64::from(self.resolve_k()?);
        Ok(match &self.family {
            Family::UniformS3 { n } | Family::AntipodalS3 { n } => *n,
            Family::LiftedUniform { base_points }
            | Family::LiftedAntipodal { base_points } => base_points * k,
            Family::LiftedSpherical { r } => u64::from(*r) * k,
            Family::LiftedHarmonic { degree } => {
                u64::from(*degree + 1) * u64::from(*degree + 1) * k
            }
            Family::LiftedDiamond { rj } => {
                rj.iter().map(|&r| u64::from(r)).sum::<u64>() * k
            }
        })
    }

    /// The family's expected energy, when a closed or semianalytic form
    /// exists (it does for every implemented family).
    pub fn closed_form(&self) -> Result<Option<f64>, HarnessError> {
        let k = self.resolve_k()?;
        let quad = QuadratureSpec::default();
        let v = match &self.family {
            Family::UniformS3 { n } => expected_uniform_s3(*n),
            Family::AntipodalS3 { n } => expected_uniform_s3_antipodal(*n)?,
            Family::LiftedUniform { base_points } => {
                expected_lifted_uniform(*base_points, k)
            }
            Family::LiftedAntipodal { base_points } => {
                expected_lifted_antipodal(*base_points, k)?
            }
            Family::LiftedSpherical { r } => expected_lifted_spherical_closed(*r, k),
            Family::LiftedHarmonic { degree } => {
                let profile = crate::dpp::harmonic_profile(*degree);
                expected_lifted_dpp(&profile, k, &quad)?
            }
            Family::LiftedDiamond { rj } => {
                let spec = DiamondSpec::from_rj(rj.clone())?;
                expected_lifted_diamond_semianalytic(&spec, k, &quad)?
            }
        };
        Ok(Some(v))
    }
}

/// One independent energy draw on the substream `(seed, stream)`.
fn run_energy(family: &Family, k: u32, seed: u64, stream: u64) -> Result<f64, HarnessError> {
    let mut rng = SeededStream::new(seed, stream);
    let energy = match family {
        Family::UniformS3 { n } => {
            let pts = sample_uniform_s3(*n as usize, &mut rng);
            log_energy(&pts)?
        }
        Family::AntipodalS3 { n } => {
            let half = sample_uniform_s3((*n / 2) as usize, &mut rng);
            log_energy(&antipodal_augment(&half))?
        }
        Family::LiftedUniform { base_points } => {
            let base = sample_uniform_s2(*base_points as usize, &mut rng);
            log_energy(&hopf_lift(&base, k, &mut rng)?)?
        }
        Family::LiftedAntipodal { base_points } => {
            let half = sample_uniform_s2((*base_points / 2) as usize, &mut rng);
            let base = antipodal_augment(&half);
            log_energy(&hopf_lift(&base, k, &mut rng)?)?
        }
        Family::LiftedSpherical { r } => {
            let kernel = build_projection_kernel(EnsembleFamily::Spherical { r: *r });
            let base = hkpv_sample(&kernel, &mut rng)?;
            log_energy(&hopf_lift(&base, k, &mut rng)?)?
        }
        Family::LiftedHarmonic { degree } => {
            let kernel =
                build_projection_kernel(EnsembleFamily::Harmonic { degree: *degree });
            let base = hkpv_sample(&kernel, &mut rng)?;
            log_energy(&hopf_lift(&base, k, &mut rng)?)?
        }
        Family::LiftedDiamond { rj } => {
            let spec = DiamondSpec::from_rj(rj.clone())?;
            let base = build_lift_base(&spec, &mut rng);
            log_energy(&hopf_lift(&base, k, &mut rng)?)?
        }
    };
    Ok(energy)
}

/// Like [`mc_estimate`] but with run `i` on substream `(seed, offset + i)`,
/// so multi-row sweeps can keep every run independent. Runs execute in
/// parallel; the reduction is in run-index order, so the result is
/// bit-identical for any thread count.
pub fn mc_estimate_at(
    config: &ExperimentConfig,
    offset: u64,
) -> Result<ResultRow, HarnessError> {
    config.validate()?;
    let k = config.resolve_k()?;
    let n = config.total_points()?;
    let closed_form = config.closed_form()?;

    let start = Instant::now();
    let energies: Vec<f64> = (0..u64::from(config.runs))
        .into_par_iter()
        .map(|i| run_energy(&config.family, k, config.seed, offset + i))
        .collect::<Result<_, _>>()?;
    let wall_time_s = start.elapsed().as_secs_f64();

    let (energy_mean, energy_se) = mean_and_se(&energies);
    let (n1, n2) = if n >= 2 {
        normalized_series(energy_mean, n)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ResultRow {
        n,
        k,
        param: config.param(),
        energy_mean,
        energy_se,
        closed_form,
        n1,
        n2,
        wall_time_s,
    })
}

/// Monte Carlo estimate of the configured family's energy: mean and
/// standard error over `runs` independent substreams, plus the closed-form
/// expectation and normalized series values. Deterministic in
/// `(seed, runs)` for any thread count.
pub fn mc_estimate(config: &ExperimentConfig) -> Result<ResultRow, HarnessError> {
    mc_estimate_at(config, 0)
}

/// Diamond α-sweep: for each parallel count `p`, build the standard
/// parallel-count profile, lift with `k = max(1, round(p^α))`, and Monte
/// Carlo the energy. Substream indices accumulate across rows so every run
/// in the sweep is independent.
pub fn sweep_diamond_alpha(
    p_list: &[u32],
    alpha: f64,
    runs: u32,
    seed: u64,
) -> Result<Vec<ResultRow>, HarnessError> {
    if !(alpha > 0.0) {
        return Err(HarnessError::InvalidConfig("alpha must be positive".into()));
    }
    let mut rows = Vec::with_capacity(p_list.len());
    let mut offset = 0u64;
    for &p in p_list {
        if p < 1 {
            return Err(HarnessError::InvalidConfig("parallel count must be >= 1".into()));
        }
        let config = ExperimentConfig {
            family: Family::LiftedDiamond { rj: diamond_rj_ansatz(p) },
            k_rule: KRule::Alpha { alpha },
            runs,
            seed,
        };
        rows.push(mc_estimate_at(&config, offset)?);
        offset += u64::from(runs);
    }
    debug_assert!(rows.windows(2).all(|w| w[0].n < w[1].n));
    Ok(rows)
}

/// Sweep the points-per-fibre count over `k_list` for one lifted family;
/// substream indices accumulate across rows.
pub fn sweep_k(
    family: &Family,
    k_list: &[u32],
    runs: u32,
    seed: u64,
) -> Result<Vec<ResultRow>, HarnessError> {
    let mut rows = Vec::with_capacity(k_list.len());
    let mut offset = 0u64;
    for &k in k_list {
        let config = ExperimentConfig {
            family: family.clone(),
            k_rule: KRule::Explicit { k },
            runs,
            seed,
        };
        rows.push(mc_estimate_at(&config, offset)?);
        offset += u64::from(runs);
    }
    Ok(rows)
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Comma-separated values with a header row.
    Csv,
    /// A JSON array of row objects.
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

enum Sink {
    Csv(csv::Writer<Box<dyn Write + Send>>),
    Json {
        out: Box<dyn Write + Send>,
        any: bool,
    },
}

/// Streaming row writer: each row is serialized and flushed immediately, so
/// an interrupted experiment still leaves its completed rows on disk.
pub struct RowWriter {
    sink: Sink,
    path: PathBuf,
}

impl RowWriter {
    /// Open a writer on `path` (`None` writes to standard output).
    pub fn create(path: Option<&Path>, format: OutputFormat) -> Result<Self, HarnessError> {
        let display = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
        let out: Box<dyn Write + Send> = match path {
            Some(p) => Box::new(std::fs::File::create(p).map_err(io_err(p))?),
            None => Box::new(std::io::stdout()),
        };
        let sink = match format {
            OutputFormat::Csv => Sink::Csv(csv::Writer::from_writer(out)),
            OutputFormat::Json => Sink::Json { out, any: false },
        };
        Ok(Self { sink, path: display })
    }

    /// Serialize one row and flush it.
    pub fn write_row(&mut self, row: &ResultRow) -> Result<(), HarnessError> {
        match &mut self.sink {
            Sink::Csv(w) => {
                w.serialize(row)?;
                w.flush().map_err(io_err(&self.path))?;
            }
            Sink::Json { out, any } => {
                let lead = if *any { ",\n  " } else { "[\n  " };
                out.write_all(lead.as_bytes()).map_err(io_err(&self.path))?;
                serde_json::to_writer(&mut *out, row)?;
                out.flush().map_err(io_err(&self.path))?;
                *any = true;
            }
        }
        Ok(())
    }

    /// Terminate the output (closes the JSON array) and flush.
    pub fn finish(self) -> Result<(), HarnessError> {
        match self.sink {
            Sink::Csv(mut w) => w.flush().map_err(io_err(&self.path)),
            Sink::Json { mut out, any } => {
                let tail = if any { "\n]\n" } else { "[]\n" };
                out.write_all(tail.as_bytes()).map_err(io_err(&self.path))?;
                out.flush().map_err(io_err(&self.path))
            }
        }
    }
}

/// Write all rows to `path` in the given format.
pub fn emit(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<(), HarnessError> {
    let mut writer = RowWriter::create(Some(path), format)?;
    for row in rows {
        writer.write_row(row)?;
    }
    writer.finish()
}

/// Read rows back from a file produced by [`emit`].
pub fn read_rows(path: &Path, format: OutputFormat) -> Result<Vec<ResultRow>, HarnessError> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    match format {
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            let mut rows = Vec::new();
            for record in reader.deserialize() {
                rows.push(record?);
            }
            Ok(rows)
        }
        OutputFormat::Json => Ok(serde_json::from_reader(file)?),
    }
}
