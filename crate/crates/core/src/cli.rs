//! The `wcfb` command-line front end.
//!
//! Settings come from an optional `key = value` file given with
//! `--config PATH`, overridden by `--key value` flags. Dashes and
//! underscores in keys are interchangeable. Output files go to `out_dir`,
//! which defaults to `$WCFB_OUT_DIR` and then to the working directory.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{
    compute_thresholds, dist_to_binary_set, distance_to_unit_sphere, rate_fit, recompute_zetas, sharpness_probe,
    SampleSpec,
};
use crate::error::Error;
use crate::functions::{BinaryPenalty, BinarySet, CompositeProblem, Penalty, SpherePenalty, SquaredDistance};
use crate::linalg::{write_matrix_market, Vector};
use crate::solver::{fmt_float, read_trajectory_csv, run_fb, Mode, SolverConfig, TrajectoryTable};
use crate::tomography::{
    build_projector, lsqr_solve, make_phantom, misclassification_rate, read_pgm, read_sinogram_csv,
    reconstruct_crbt, simulate_sinogram, threshold_to_binary, write_pgm, write_sinogram_csv, BinaryImage,
    CrbtOptions, PhantomKind, ScanGeometry, Sinogram, DEFAULT_LSQR_ITERATIONS,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WCFB_OUT_DIR";

pub const USAGE: &str = "\
usage: wcfb <command> [--config FILE] [--key value ...]

commands:
  phantom    write a synthetic binary phantom as PGM
             keys: kind (disk|bars|blob), size | width height, seed, out
  project    build the projector and a noisy sinogram
             keys: phantom keys or image, angles | n_angles, detectors, sigma, seed,
                   out_matrix, out_sinogram
  solve      CRBT reconstruction from a sinogram
             keys: sinogram (with size | width height) or phantom/project keys,
                   sigma, theta, alpha, lipschitz, max_iter, tol, truth, mu,
                   out_image, out_trajectory
  baseline   LSQR and thresholded LSQR reconstructions
             keys: as solve, plus lsqr_iter, out_lsqr, out_image
  diagnose   thresholds, sharpness probe, rate fit and contraction check
             keys: trajectory, mu, rho, alpha, eps, penalty (binary|sphere),
                   probe_dim, probe_samples, append
  demo-1d    forward-backward on |x^2 - 1| + (x - 1)^2 / 2
             keys: alpha, x0, eps, max_iter, tol, out

common keys: seed, out_dir
";

const COMMON_KEYS: &[&str] = &["seed", "out_dir"];
const PHANTOM_KEYS: &[&str] = &["kind", "size", "width", "height", "out"];
const PROJECT_KEYS: &[&str] = &[
    "kind", "size", "width", "height", "image", "angles", "n_angles", "detectors", "sigma", "out_matrix",
    "out_sinogram",
];
const SOLVE_KEYS: &[&str] = &[
    "kind", "size", "width", "height", "image", "angles", "n_angles", "detectors", "sigma", "sinogram", "theta",
    "alpha", "lipschitz", "max_iter", "tol", "truth", "mu", "out_image", "out_trajectory",
];
const BASELINE_KEYS: &[&str] = &[
    "kind", "size", "width", "height", "image", "angles", "n_angles", "detectors", "sigma", "sinogram", "truth",
    "lsqr_iter", "out_lsqr", "out_image",
];
const DIAGNOSE_KEYS: &[&str] = &[
    "trajectory", "mu", "rho", "alpha", "eps", "penalty", "probe_dim", "probe_samples", "append",
];
const DEMO_KEYS: &[&str] = &["alpha", "x0", "eps", "max_iter", "tol", "out"];

enum CliError {
    /// Bad invocation or configuration; exit 2.
    Config(String),
    /// Failure while running; exit 1.
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Parsed settings for one command.
struct Settings {
    values: BTreeMap<String, String>,
    out_dir: PathBuf,
}

fn normalise_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

impl Settings {
    fn parse(args: &[String], allowed: &[&str]) -> CliResult<Self> {
        let mut flags = BTreeMap::new();
        let mut config_path = None;
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(key) = arg.strip_prefix("--") else {
                return config_err(format!("unexpected argument {arg:?}"));
            };
            let (key, value) = match key.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => match it.next() {
                    Some(v) => (key.to_string(), v.clone()),
                    None => return config_err(format!("missing value for --{key}")),
                },
            };
            let key = normalise_key(&key);
            if key == "config" {
                config_path = Some(PathBuf::from(value));
            } else {
                flags.insert(key, value);
            }
        }

        let mut values = BTreeMap::new();
        if let Some(path) = config_path {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return config_err(format!("{}:{}: expected key = value", path.display(), i + 1));
                };
                values.insert(normalise_key(k), v.trim().to_string());
            }
        }
        let env_dir = std::env::var(OUT_DIR_ENV).ok().filter(|s| !s.is_empty());
        if let Some(dir) = env_dir {
            values.insert("out_dir".into(), dir);
        }
        values.extend(flags);

        for key in values.keys() {
            if !allowed.contains(&key.as_str()) && !COMMON_KEYS.contains(&key.as_str()) {
                return config_err(format!("unknown key {key:?}"));
            }
        }
        let out_dir = PathBuf::from(values.get("out_dir").map(String::as_str).unwrap_or("."));
        Ok(Self { values, out_dir })
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        match self.str(key) {
            None => Ok(None),
            Some(s) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => config_err(format!("{key} must be a finite number, got {s:?}")),
            },
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize(&self, key: &str) -> CliResult<Option<usize>> {
        match self.str(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{key} must be a non-negative integer, got {s:?}"))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        Ok(self.usize(key)?.unwrap_or(default))
    }

    fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(s) => config_err(format!("{key} must be true or false, got {s:?}")),
        }
    }

    fn seed(&self) -> CliResult<u64> {
        match self.str("seed") {
            None => Ok(0),
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Config(format!("seed must be a non-negative integer, got {s:?}"))),
        }
    }

    fn parsed<T: std::str::FromStr<Err = Error>>(&self, key: &str, default: &str) -> CliResult<T> {
        self.str(key)
            .unwrap_or(default)
            .parse()
            .map_err(|e: Error| CliError::Config(format!("{key}: {e}")))
    }

    fn input(&self, key: &str) -> CliResult<Option<PathBuf>> {
        match self.str(key) {
            None => Ok(None),
            Some(p) => {
                let path = PathBuf::from(p);
                if !path.is_file() {
                    return config_err(format!("{key}: no such file {p:?}"));
                }
                Ok(Some(path))
            }
        }
    }

    fn output(&self, key: &str, default: &str) -> CliResult<PathBuf> {
        let name = self.str(key).unwrap_or(default);
        fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }

    fn dims(&self, default: usize) -> CliResult<(usize, usize)> {
        let size = self.usize("size")?;
        let w = self.usize("width")?.or(size).unwrap_or(default);
        let h = self.usize("height")?.or(size).unwrap_or(default);
        if w == 0 || h == 0 {
            return config_err("image dimensions must be positive");
        }
        Ok((w, h))
    }

    fn geometry(&self, width: usize, height: usize) -> CliResult<ScanGeometry> {
        let detectors = self.usize_or("detectors", (((width * width + height * height) as f64).sqrt().ceil()) as usize)?;
        if detectors == 0 {
            return config_err("detectors must be >= 1");
        }
        let geometry = match (self.str("angles"), self.usize("n_angles")?) {
            (Some(_), Some(_)) => return config_err("give either angles or n_angles, not both"),
            (_, Some(n)) => {
                if n == 0 {
                    return config_err("n_angles must be >= 1");
                }
                ScanGeometry::uniform(n, detectors)
            }
            (list, None) => {
                let list = list.unwrap_or("0,50,100,150");
                let angles = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| CliError::Config(format!("angles must be a comma-separated list, got {list:?}")))?;
                ScanGeometry::new(angles, detectors)
            }
        };
        geometry.map_err(|e| CliError::Config(e.to_string()))
    }

    /// Ground-truth image from `image` (PGM) or a generated phantom.
    fn phantom(&self, default_size: usize) -> CliResult<BinaryImage> {
        if let Some(path) = self.input("image")? {
            return Ok(read_pgm(BufReader::new(File::open(path)?))?);
        }
        let kind: PhantomKind = self.parsed("kind", "disk")?;
        let (w, h) = self.dims(default_size)?;
        make_phantom(kind, w, h, self.seed()?).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// A reconstruction task: projector, measured data and optional truth.
struct Scan {
    width: usize,
    height: usize,
    geometry: ScanGeometry,
    matrix: crate::linalg::CsrMatrix,
    sinogram: Sinogram,
    truth: Option<BinaryImage>,
}

fn load_scan(s: &Settings) -> CliResult<Scan> {
    let seed = s.seed()?;
    let sigma = s.f64_or("sigma", 0.01)?;
    if sigma < 0.0 {
        return config_err("sigma must be >= 0");
    }
    let truth_file = match s.input("truth")? {
        Some(p) => Some(read_pgm(BufReader::new(File::open(p)?))?),
        None => None,
    };
    if let Some(path) = s.input("sinogram")? {
        let (values, geometry) = read_sinogram_csv(BufReader::new(File::open(path)?))?;
        let (width, height) = match (&truth_file, s.str("size").or(s.str("width"))) {
            (Some(t), None) => (t.width(), t.height()),
            (_, Some(_)) => s.dims(0)?,
            (None, None) => return config_err("a sinogram input needs size (or width and height) or truth"),
        };
        let matrix = build_projector(width, height, &geometry)?;
        return Ok(Scan {
            width,
            height,
            geometry,
            matrix,
            sinogram: Sinogram { values, sigma, seed },
            truth: truth_file,
        });
    }
    let truth = match truth_file {
        Some(t) => t,
        None => s.phantom(16)?,
    };
    let (width, height) = (truth.width(), truth.height());
    let geometry = s.geometry(width, height)?;
    let matrix = build_projector(width, height, &geometry)?;
    let sinogram = simulate_sinogram(&matrix, &truth, sigma, seed)?;
    Ok(Scan {
        width,
        height,
        geometry,
        matrix,
        sinogram,
        truth: Some(truth),
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_phantom(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let img = s.phantom(64)?;
    let path = s.output("out", "phantom.pgm")?;
    write_pgm(&img, create(&path)?)?;
    writeln!(out, "phantom {}x{} ({} foreground pixels) -> {}", img.width(), img.height(), img.count_positive(), path.display())?;
    Ok(())
}

fn cmd_project(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let img = s.phantom(16)?;
    let geometry = s.geometry(img.width(), img.height())?;
    let sigma = s.f64_or("sigma", 0.01)?;
    if sigma < 0.0 {
        return config_err("sigma must be >= 0");
    }
    let a = build_projector(img.width(), img.height(), &geometry)?;
    let sino = simulate_sinogram(&a, &img, sigma, s.seed()?)?;
    let mtx = s.output("out_matrix", "projector.mtx")?;
    write_matrix_market(&a, create(&mtx)?)?;
    let csv_path = s.output("out_sinogram", "sinogram.csv")?;
    write_sinogram_csv(create(&csv_path)?, &sino.values, &geometry)?;
    writeln!(out, "projector {}x{} ({} nonzeros) -> {}", a.n_rows(), a.n_cols(), a.nnz(), mtx.display())?;
    writeln!(out, "sinogram ({} angles x {} detectors, sigma {}) -> {}", geometry.n_angles(), geometry.n_detectors(), sigma, csv_path.display())?;
    Ok(())
}

fn cmd_solve(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let scan = load_scan(s)?;
    let mu = s.f64("mu")?;
    if mu.is_some_and(|m| m <= 0.0) {
        return config_err("mu must be > 0");
    }
    let options = CrbtOptions {
        theta: s.f64("theta")?,
        alpha: s.f64("alpha")?,
        lipschitz: s.f64("lipschitz")?,
        max_iterations: s.usize_or("max_iter", 2000)?,
        step_tolerance: s.f64_or("tol", 1e-10)?,
        x0: None,
        reference: scan.truth.as_ref().map(BinaryImage::to_vector),
        sharpness: mu,
    };
    let run = reconstruct_crbt(&scan.matrix, &scan.sinogram, &scan.geometry, scan.width, scan.height, &options)?;
    let img_path = s.output("out_image", "reconstruction.pgm")?;
    write_pgm(&run.image, create(&img_path)?)?;
    let mut extra = vec![
        ("theta".to_string(), fmt_float(run.theta)),
        ("seed".to_string(), s.seed()?.to_string()),
        ("sigma".to_string(), fmt_float(scan.sinogram.sigma)),
    ];
    let rate = match &scan.truth {
        Some(t) => Some(misclassification_rate(&run.image, t)?),
        None => None,
    };
    if let Some(r) = rate {
        extra.push(("misclassification".to_string(), fmt_float(r)));
    }
    let traj_path = s.output("out_trajectory", "trajectory.csv")?;
    run.trajectory.write_csv(create(&traj_path)?, &extra)?;
    writeln!(
        out,
        "crbt: {} iterations, objective {:.6e}, alpha {:.6e}, L_g {:.6e}, theta {:.6e}",
        run.trajectory.iterations(),
        run.trajectory.last().objective,
        run.alpha,
        run.lipschitz,
        run.theta
    )?;
    if !run.trajectory.descent_violations.is_empty() {
        writeln!(out, "warning: {} descent violations", run.trajectory.descent_violations.len())?;
    }
    if let Some(r) = rate {
        writeln!(out, "misclassification {r}")?;
    }
    writeln!(out, "reconstruction -> {}", img_path.display())?;
    writeln!(out, "trajectory -> {}", traj_path.display())?;
    Ok(())
}

fn cmd_baseline(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let scan = load_scan(s)?;
    let iters = s.usize_or("lsqr_iter", DEFAULT_LSQR_ITERATIONS)?;
    let x = lsqr_solve(&scan.matrix, &scan.sinogram.values, iters)?;
    let img = threshold_to_binary(&x, scan.width, scan.height)?;
    let lsqr_path = s.output("out_lsqr", "lsqr.csv")?;
    let mut w = csv::Writer::from_writer(create(&lsqr_path)?);
    w.write_record(["pixel", "value"]).map_err(Error::from)?;
    for (i, v) in x.iter().enumerate() {
        w.write_record([i.to_string(), fmt_float(*v)]).map_err(Error::from)?;
    }
    w.flush()?;
    let img_path = s.output("out_image", "tlsqr.pgm")?;
    write_pgm(&img, create(&img_path)?)?;
    let residual = scan.matrix.matvec(&x)?.distance(&scan.sinogram.values);
    writeln!(out, "lsqr: {iters} iterations, residual {residual:.6e} -> {}", lsqr_path.display())?;
    if let Some(t) = &scan.truth {
        writeln!(out, "tlsqr misclassification {}", misclassification_rate(&img, t)?)?;
    }
    writeln!(out, "tlsqr -> {}", img_path.display())?;
    Ok(())
}

fn summary_f64(table: &TrajectoryTable, key: &str) -> CliResult<Option<f64>> {
    match table.summary_value(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Runtime(Error::Parse(format!("trajectory summary {key}: {v:?}")))),
    }
}

fn cmd_diagnose(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let traj_path = s.input("trajectory")?;
    let table = match &traj_path {
        Some(p) => Some(read_trajectory_csv(BufReader::new(File::open(p)?))?),
        None => None,
    };
    let pick = |key: &str, default: Option<f64>| -> CliResult<Option<f64>> {
        if let Some(v) = s.f64(key)? {
            return Ok(Some(v));
        }
        if let Some(t) = &table {
            if let Some(v) = summary_f64(t, key)? {
                return Ok(Some(v));
            }
        }
        Ok(default)
    };
    let mu = pick("mu", Some(1.0))?.unwrap_or(1.0);
    let rho = pick("rho", Some(2.0))?.unwrap_or(2.0);
    let alpha = pick("alpha", Some(0.25))?.unwrap_or(0.25);
    let eps = pick("eps", Some(0.0))?.unwrap_or(0.0);
    let mode = if eps > 0.0 { Mode::Inexact } else { Mode::Exact };
    let mut rows: Vec<(String, String)> = Vec::new();

    writeln!(out, "parameters: mu={mu} rho={rho} alpha={alpha} eps={eps}")?;
    let thresholds = match compute_thresholds(mu, rho, alpha, eps) {
        Ok(th) => {
            writeln!(
                out,
                "thresholds: E-={} E+={} tau1={} tau2={} ordered={}",
                fmt_float(th.e_minus),
                fmt_float(th.e_plus),
                fmt_float(th.tau1),
                fmt_float(th.tau2),
                th.ordered()
            )?;
            rows.push(("diag_e_minus".into(), fmt_float(th.e_minus)));
            rows.push(("diag_e_plus".into(), fmt_float(th.e_plus)));
            rows.push(("diag_tau1".into(), fmt_float(th.tau1)));
            rows.push(("diag_tau2".into(), fmt_float(th.tau2)));
            Some(th)
        }
        Err(e) => {
            writeln!(out, "thresholds: unavailable ({e})")?;
            None
        }
    };

    let dim = s.usize_or("probe_dim", 2)?;
    let samples = s.usize_or("probe_samples", 10_000)?;
    if dim == 0 || samples == 0 {
        return config_err("probe_dim and probe_samples must be >= 1");
    }
    let penalty = s.str("penalty").unwrap_or("binary");
    let sampler = SampleSpec::UniformBox { dim, lo: -3.0, hi: 3.0 };
    let report = match penalty {
        "binary" => {
            let f = BinaryPenalty::standard(dim);
            sharpness_probe(|x| f.value(x).unwrap_or(f64::NAN), 0.0, |x| dist_to_binary_set(x, -1.0, 1.0).0, &sampler, samples, f.sharpness(), s.seed()?)?
        }
        "sphere" => {
            let f = SpherePenalty::new(dim)?;
            sharpness_probe(|x| f.value(x).unwrap_or(f64::NAN), 0.0, distance_to_unit_sphere, &sampler, samples, f.sharpness(), s.seed()?)?
        }
        other => return config_err(format!("penalty must be binary or sphere, got {other:?}")),
    };
    writeln!(
        out,
        "sharpness ({penalty}, n={dim}, {samples} samples): min_ratio={} violations={}",
        fmt_float(report.min_ratio),
        report.violations
    )?;
    rows.push(("diag_sharpness_min_ratio".into(), fmt_float(report.min_ratio)));
    rows.push(("diag_sharpness_violations".into(), report.violations.to_string()));

    if let Some(table) = &table {
        let distances = table.distances();
        match rate_fit(&distances) {
            Ok(fit) => {
                writeln!(out, "rate fit: factor={} r_squared={} points={}", fmt_float(fit.factor), fmt_float(fit.r_squared), fit.points)?;
                rows.push(("diag_rate_factor".into(), fmt_float(fit.factor)));
                rows.push(("diag_rate_r_squared".into(), fmt_float(fit.r_squared)));
            }
            Err(e) => writeln!(out, "rate fit: unavailable ({e})")?,
        }
        if let Some(th) = thresholds {
            let zetas = recompute_zetas(&distances, mu, rho, alpha, th.e_minus, mode);
            let mut max_dev: f64 = 0.0;
            let mut compared = 0;
            for (row, z) in table.rows.iter().zip(&zetas) {
                if let (Some(logged), Some(z)) = (row.zeta, z) {
                    max_dev = max_dev.max((logged - z).abs());
                    compared += 1;
                }
            }
            writeln!(out, "zeta reproduction: {compared} values, max deviation {}", fmt_float(max_dev))?;
            rows.push(("diag_zeta_compared".into(), compared.to_string()));
            rows.push(("diag_zeta_max_deviation".into(), fmt_float(max_dev)));
        }
    }

    if s.bool_or("append", false)? {
        let Some(path) = &traj_path else {
            return config_err("append needs a trajectory file");
        };
        let mut file = fs::OpenOptions::new().append(true).open(path)?;
        for (k, v) in &rows {
            writeln!(file, "#summary,{k},{v}")?;
        }
        writeln!(out, "appended {} summary rows to {}", rows.len(), path.display())?;
    }
    Ok(())
}

fn cmd_demo(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let alpha = s.f64_or("alpha", 0.3)?;
    let x0 = s.f64_or("x0", 0.5)?;
    let eps = s.f64_or("eps", 0.0)?;
    let problem = CompositeProblem::new(
        Box::new(BinaryPenalty::standard(1)),
        Box::new(SquaredDistance::new(Vector::filled(1, 1.0))),
        2.0,
        1.0,
    )?
    .with_sharpness(1.0)?
    .with_solution_set(BinarySet { a: -1.0, b: 1.0 });
    let mut config = if eps > 0.0 {
        SolverConfig::inexact(alpha, eps)
    } else {
        SolverConfig::exact(alpha)
    };
    config.max_iterations = s.usize_or("max_iter", 100)?;
    config.step_tolerance = s.f64_or("tol", 1e-10)?;
    config.keep_iterates = true;
    let traj = match run_fb(&problem, &config, &[x0]) {
        Err(Error::ParameterConditions(reasons)) => return config_err(reasons.join("; ")),
        other => other?,
    };
    writeln!(out, "t,x,objective,step_norm")?;
    let points = traj.iterates.clone().unwrap_or_default();
    for (r, x) in traj.records.iter().zip(&points) {
        writeln!(
            out,
            "{},{},{},{}",
            r.t,
            fmt_float(x[0]),
            fmt_float(r.objective),
            r.step_norm.map(fmt_float).unwrap_or_default()
        )?;
    }
    writeln!(out, "# converged to x = {} after {} iterations", traj.final_point[0], traj.iterations())?;
    if let Some(name) = s.str("out") {
        let path = s.output("out", name)?;
        traj.write_csv(create(&path)?, &[("x0".into(), fmt_float(x0))])?;
        writeln!(out, "# trajectory -> {}", path.display())?;
    }
    Ok(())
}

/// Runs one command and returns the process exit status: 0 on success, 2 on
/// configuration errors (with usage on `stderr`), 1 on runtime errors.
pub fn run_cli(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some((command, rest)) = args.split_first() else {
        let _ = write!(stderr, "{USAGE}");
        return 2;
    };
    let (allowed, handler): (&[&str], fn(&Settings, &mut dyn Write) -> CliResult<()>) = match command.as_str() {
        "phantom" => (PHANTOM_KEYS, cmd_phantom),
        "project" => (PROJECT_KEYS, cmd_project),
        "solve" => (SOLVE_KEYS, cmd_solve),
        "baseline" => (BASELINE_KEYS, cmd_baseline),
        "diagnose" => (DIAGNOSE_KEYS, cmd_diagnose),
        "demo-1d" => (DEMO_KEYS, cmd_demo),
        "help" | "--help" | "-h" => {
            let _ = write!(stdout, "{USAGE}");
            return 0;
        }
        other => {
            let _ = writeln!(stderr, "error: unknown command {other:?}\n");
            let _ = write!(stderr, "{USAGE}");
            return 2;
        }
    };
    let result = Settings::parse(rest, allowed).and_then(|s| handler(&s, stdout));
    match result {
        Ok(()) => 0,
        Err(CliError::Config(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n");
            let _ = write!(stderr, "{USAGE}");
            2
        }
        Err(CliError::Runtime(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
