//! Subcommand implementations behind the `dctlab` binary.
//!
//! Everything here is plain-function plumbing: resolve the transform
//! selection, read a corpus directory, call into `dctlab`, and write
//! artifacts under the output directory. Argument parsing lives in the
//! binary; this layer works from a merged [`RunConfig`] so runs are
//! scriptable from tests as well.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use dctlab::codec::{compress_image, CodecError, RetentionPolicy};
use dctlab::imageio::{read_pgm, write_pgm, PgmError};
use dctlab::metrics::{corpus_sweep, write_report_csv, MetricError};
use dctlab::spectral::{error_energy_report, write_energy_csv, write_sweep_csv};
use dctlab::transforms::{
    audit_cost, builtin_transform, builtin_transforms, frobenius_optimal_scale, load_comparator,
    orthogonalizer_diagonal, round_off_kernel, write_matrix_file, ArithmeticCost, TransformError,
    TransformSpec,
};
use dctlab::{GrayImage, Matrix8};

pub const DEFAULT_R_MIN: usize = 1;
pub const DEFAULT_R_MAX: usize = 45;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("{path}: {source}")]
    Pgm {
        path: PathBuf,
        #[source]
        source: PgmError,
    },
    #[error("unknown transform {name:?}; known: {known}")]
    UnknownTransform { name: String, known: String },
    #[error("transform name {0:?} used twice")]
    DuplicateTransform(String),
    #[error("retention range {min}..={max}; need 1 <= min <= max <= 64")]
    BadRange { min: usize, max: usize },
    #[error("this subcommand needs a corpus directory (--corpus)")]
    MissingCorpus,
    #[error("no .pgm files under {0}")]
    EmptyCorpus(PathBuf),
}

fn io_at(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// One source of settings; `None` means "not given here". The config
/// file and the command line each produce one of these.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub transforms: Option<Vec<String>>,
    pub r_min: Option<usize>,
    pub r_max: Option<usize>,
    pub corpus: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub comparators: Option<Vec<PathBuf>>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<PartialConfig, CliError> {
        let text = fs::read_to_string(path).map_err(io_at(path))?;
        toml::from_str(&text).map_err(|source| CliError::Config {
            path: path.to_owned(),
            source,
        })
    }

    /// Field-wise overlay; values in `self` win.
    pub fn or(self, fallback: PartialConfig) -> PartialConfig {
        PartialConfig {
            transforms: self.transforms.or(fallback.transforms),
            r_min: self.r_min.or(fallback.r_min),
            r_max: self.r_max.or(fallback.r_max),
            corpus: self.corpus.or(fallback.corpus),
            out: self.out.or(fallback.out),
            comparators: self.comparators.or(fallback.comparators),
        }
    }
}

/// Fully merged settings for one subcommand run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// `None` selects the whole registry: builtins plus comparators.
    pub transforms: Option<Vec<String>>,
    pub r_min: usize,
    pub r_max: usize,
    pub corpus: Option<PathBuf>,
    pub out: PathBuf,
    pub comparators: Vec<PathBuf>,
}

impl RunConfig {
    pub fn from_partial(p: PartialConfig) -> Result<RunConfig, CliError> {
        let cfg = RunConfig {
            transforms: p.transforms,
            r_min: p.r_min.unwrap_or(DEFAULT_R_MIN),
            r_max: p.r_max.unwrap_or(DEFAULT_R_MAX),
            corpus: p.corpus,
            out: p.out.unwrap_or_else(|| PathBuf::from("out")),
            comparators: p.comparators.unwrap_or_default(),
        };
        if cfg.r_min < 1 || cfg.r_max > 64 || cfg.r_min > cfg.r_max {
            return Err(CliError::BadRange {
                min: cfg.r_min,
                max: cfg.r_max,
            });
        }
        Ok(cfg)
    }

    fn r_range(&self) -> std::ops::RangeInclusive<usize> {
        self.r_min..=self.r_max
    }
}

/// Builds the registry (builtins, then comparator files in order) and
/// applies the selection list. Selection order is preserved; without a
/// selection the whole registry is returned.
pub fn resolve_transforms(cfg: &RunConfig) -> Result<Vec<TransformSpec>, CliError> {
    let mut registry = builtin_transforms();
    for path in &cfg.comparators {
        let spec = load_comparator(path)?;
        if registry.iter().any(|s| s.name() == spec.name()) {
            return Err(CliError::DuplicateTransform(spec.name().to_string()));
        }
        registry.push(spec);
    }
    let Some(names) = &cfg.transforms else {
        return Ok(registry);
    };
    let mut picked: Vec<TransformSpec> = Vec::with_capacity(names.len());
    for name in names {
        if picked.iter().any(|s| s.name() == name) {
            return Err(CliError::DuplicateTransform(name.clone()));
        }
        match registry.iter().find(|s| s.name() == name.as_str()) {
            Some(spec) => picked.push(spec.clone()),
            None => {
                return Err(CliError::UnknownTransform {
                    name: name.clone(),
                    known: registry
                        .iter()
                        .map(|s| s.name())
                        .collect::<Vec<_>>()
                        .join(", "),
                })
            }
        }
    }
    Ok(picked)
}

/// Reads every `.pgm` directly under `dir`, sorted by file name so the
/// result does not depend on directory enumeration order.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, GrayImage)>, CliError> {
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_at(dir))? {
        let path = entry.map_err(io_at(dir))?.path();
        if path.extension().is_some_and(|e| e == "pgm") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::EmptyCorpus(dir.to_owned()));
    }
    let mut corpus = Vec::with_capacity(paths.len());
    for path in paths {
        let img = read_pgm(&path).map_err(|source| CliError::Pgm {
            path: path.clone(),
            source,
        })?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        corpus.push((stem, img));
    }
    Ok(corpus)
}

fn create_out(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out).map_err(io_at(&cfg.out))
}

fn out_writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(io_at(path))?))
}

/// Writes every selected transform in the comparator file format, the
/// raw rounded kernel and its scaling diagonal, and `summary.txt` with
/// the least-squares scale and per-transform orthogonality residuals.
pub fn cmd_matrices(cfg: &RunConfig) -> Result<(), CliError> {
    let specs = resolve_transforms(cfg)?;
    create_out(cfg)?;
    for spec in &specs {
        let path = cfg.out.join(format!("{}.txt", spec.name()));
        let mut f = out_writer(&path)?;
        write_matrix_file(&mut f, spec.name(), spec.declared_cost(), spec.exact_matrix())
            .map_err(io_at(&path))?;
    }

    let path = cfg.out.join("roundoff_kernel.txt");
    let mut f = out_writer(&path)?;
    write_matrix_file(
        &mut f,
        "roundoff_kernel",
        ArithmeticCost::new(22, 0, 0),
        &round_off_kernel(),
    )
    .map_err(io_at(&path))?;

    let d = orthogonalizer_diagonal();
    let mut diag = Matrix8::ZERO;
    for (i, &v) in d.iter().enumerate() {
        diag.0[i][i] = v;
    }
    let path = cfg.out.join("orthogonalizer.txt");
    let mut f = out_writer(&path)?;
    write_matrix_file(&mut f, "orthogonalizer", ArithmeticCost::new(0, 8, 0), &diag)
        .map_err(io_at(&path))?;

    let path = cfg.out.join("summary.txt");
    let mut f = out_writer(&path)?;
    writeln!(f, "frobenius_scale {:.4}", frobenius_optimal_scale()).map_err(io_at(&path))?;
    for spec in &specs {
        writeln!(
            f,
            "orthogonality_residual {} {}",
            spec.name(),
            spec.orthogonality_residual()
        )
        .map_err(io_at(&path))?;
    }
    Ok(())
}

/// Writes `error_energy.csv` (per-row energies and totals) and
/// `spectral_sweep.csv` (deviation curves on the quadrature grid).
pub fn cmd_spectral(cfg: &RunConfig) -> Result<(), CliError> {
    let specs = resolve_transforms(cfg)?;
    create_out(cfg)?;
    let reports: Vec<_> = specs.iter().map(error_energy_report).collect();
    let path = cfg.out.join("error_energy.csv");
    write_energy_csv(&reports, &mut out_writer(&path)?).map_err(io_at(&path))?;
    let path = cfg.out.join("spectral_sweep.csv");
    write_sweep_csv(&specs, &mut out_writer(&path)?).map_err(io_at(&path))?;
    Ok(())
}

/// Reconstructs each corpus image through every selected transform at
/// every retention level, one PGM per combination.
pub fn cmd_compress(cfg: &RunConfig) -> Result<(), CliError> {
    let specs = resolve_transforms(cfg)?;
    let corpus = load_corpus(cfg.corpus.as_deref().ok_or(CliError::MissingCorpus)?)?;
    create_out(cfg)?;
    for (stem, img) in &corpus {
        for spec in &specs {
            for r in cfg.r_range() {
                let recon = compress_image(spec.exact_matrix(), img, &RetentionPolicy::new(r))?;
                let path = cfg.out.join(format!("{stem}_{}_r{r}.pgm", spec.name()));
                write_pgm(&path, &recon).map_err(|source| CliError::Pgm { path, source })?;
            }
        }
    }
    Ok(())
}

/// Runs the corpus sweep and writes `bench.csv`. The exact DCT is
/// always included so the reference rows are present in the output.
pub fn cmd_bench(cfg: &RunConfig) -> Result<(), CliError> {
    let mut specs = resolve_transforms(cfg)?;
    if !specs.iter().any(|s| s.name() == "dct") {
        specs.insert(0, builtin_transform("dct").expect("registry always has dct"));
    }
    let corpus = load_corpus(cfg.corpus.as_deref().ok_or(CliError::MissingCorpus)?)?;
    let images: Vec<GrayImage> = corpus.into_iter().map(|(_, img)| img).collect();
    let reports = corpus_sweep(&images, &specs, cfg.r_range())?;
    create_out(cfg)?;
    let path = cfg.out.join("bench.csv");
    write_report_csv(&reports, &mut out_writer(&path)?).map_err(io_at(&path))?;
    Ok(())
}

/// Writes `complexity.csv`: instrumented operation counts next to the
/// declared costs for every selected transform.
pub fn cmd_complexity(cfg: &RunConfig) -> Result<(), CliError> {
    let specs = resolve_transforms(cfg)?;
    create_out(cfg)?;
    let path = cfg.out.join("complexity.csv");
    let mut f = out_writer(&path)?;
    writeln!(
        f,
        "transform,audited_additions,audited_multiplications,audited_bit_shifts,audited_total,\
         declared_additions,declared_multiplications,declared_bit_shifts,declared_total"
    )
    .map_err(io_at(&path))?;
    for spec in &specs {
        let a = audit_cost(spec)?;
        let d = spec.declared_cost();
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            spec.name(),
            a.additions,
            a.multiplications,
            a.bit_shifts,
            a.total,
            d.additions,
            d.multiplications,
            d.bit_shifts,
            d.total
        )
        .map_err(io_at(&path))?;
    }
    Ok(())
}
