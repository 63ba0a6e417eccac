//! Iterated-logarithm path experiments: log-permanent trajectories along the
//! nested minors of one seeded stream, the edge-count comparison identity,
//! distributional checks at fixed n, and running suprema.
//!
//! The almost-sure limit itself is asymptotic; nothing here asserts it. The
//! operations produce the finite-n identities and trajectory data, and the
//! test suites pin down only exact relations and pilot-frozen envelopes.

use crate::asymptotics::{lil_centering, lil_scale};
use crate::error::{Error, Result};
use crate::models::{edge_stats, fork_seed, NestedMatrixStream};
use crate::numeric::{fmt_g12, ks_distance_std_normal, linear_fit, pearson};
use crate::perm::log_permanent;
use rayon::prelude::*;

/// Per-dimension record along one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub n: usize,
    pub edges: u32,
    /// standardized edge count (E_n - p n^2)/sqrt(p(1-p) n^2)
    pub e_star: f64,
    /// log X_n; None when the permanent is 0
    pub y: Option<f64>,
    /// log(n! p^n)
    pub centering: f64,
    /// sqrt(2 log log n) sqrt((1-p)/p); None below n = 4
    pub scale: Option<f64>,
    /// (y - centering)/sqrt((1-p)/p)
    pub deviation: Option<f64>,
    /// log log n; None when undefined (n = 1)
    pub loglog_n: Option<f64>,
    /// log log n^2; None when undefined (n = 1)
    pub loglog_n2: Option<f64>,
    /// deviation / sqrt(2 log log n); None below n = 4 or when y is absent
    pub normalized: Option<f64>,
    /// deviation - e_star, the finite-n stand-in for the O(1) error term
    pub residual: Option<f64>,
}

/// Path configuration: one seed, one density, an ascending dimension list.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub p: f64,
    pub dims: Vec<usize>,
}

impl ExperimentConfig {
    pub fn new(seed: u64, p: f64, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Domain("dimension list is empty".into()));
        }
        if dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("dimensions must be strictly ascending".into()));
        }
        if *dims.last().unwrap() > crate::perm::EXACT_DIM_LIMIT {
            return Err(Error::DimensionTooLarge {
                n: *dims.last().unwrap(),
                max: crate::perm::EXACT_DIM_LIMIT,
            });
        }
        if dims[0] == 0 {
            return Err(Error::Domain("dimensions must be >= 1".into()));
        }
        Ok(Self { seed, p, dims })
    }

    /// Geometric subsequence c^1, c^2, ... clipped to [n_min, n_max].
    pub fn geometric(seed: u64, p: f64, c: u64, n_min: usize, n_max: usize) -> Result<Self> {
        if c < 2 {
            return Err(Error::Domain("subsequence base c must be >= 2".into()));
        }
        let mut dims = Vec::new();
        let mut v: u128 = 1;
        loop {
            v *= c as u128;
            if v > n_max as u128 {
                break;
            }
            if v >= n_min as u128 {
                dims.push(v as usize);
            }
        }
        Self::new(seed, p, dims)
    }
}

fn build_record(stream: &NestedMatrixStream, n: usize) -> Result<PathRecord> {
    let p = stream.p();
    let minor = stream.minor(n)?;
    let stats = edge_stats(&minor, p);
    let y = log_permanent(&minor)?;
    let centering = lil_centering(n as u64, p);
    let scale = lil_scale(n as u64, p);
    let ratio = ((1.0 - p) / p).sqrt();
    let deviation = y.map(|y| (y - centering) / ratio);
    let nf = n as f64;
    let loglog_n = if n >= 2 { Some(nf.ln().ln()) } else { None };
    let loglog_n2 = if n >= 2 { Some((2.0 * nf.ln()).ln()) } else { None };
    let normalized = match (deviation, n >= 4) {
        (Some(d), true) => Some(d / (2.0 * nf.ln().ln()).sqrt()),
        _ => None,
    };
    let residual = deviation.map(|d| d - stats.e_star);
    Ok(PathRecord {
        n,
        edges: stats.e,
        e_star: stats.e_star,
        y,
        centering,
        scale,
        deviation,
        loglog_n,
        loglog_n2,
        normalized,
        residual,
    })
}

/// Runs one nested path: every dimension is a minor of the same stream, so
/// consecutive records are coupled exactly as the theory requires.
pub fn run_path(config: &ExperimentConfig) -> Result<Vec<PathRecord>> {
    let stream = NestedMatrixStream::new(config.seed, config.p);
    config
        .dims
        .iter()
        .map(|&n| build_record(&stream, n))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSummary {
    pub count: usize,
    pub max_abs: f64,
    /// least-squares slope of |residual| against log n, with its stderr
    pub slope: Option<(f64, f64)>,
}

/// Extracts (n, residual) pairs, skipping absent records, and summarizes.
pub fn comparison_residuals(path: &[PathRecord]) -> (Vec<(usize, f64)>, ResidualSummary) {
    let pairs: Vec<(usize, f64)> = path
        .iter()
        .filter_map(|r| r.residual.map(|res| (r.n, res)))
        .collect();
    summarize_residuals(&pairs)
}

/// Pools residual pairs (possibly across seeds) into one summary.
pub fn summarize_residuals(pairs: &[(usize, f64)]) -> (Vec<(usize, f64)>, ResidualSummary) {
    let max_abs = pairs.iter().map(|&(_, r)| r.abs()).fold(0.0f64, f64::max);
    let xs: Vec<f64> = pairs.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|&(_, r)| r.abs()).collect();
    let slope = linear_fit(&xs, &ys).map(|(_, b, se)| (b, se));
    (
        pairs.to_vec(),
        ResidualSummary {
            count: pairs.len(),
            max_abs,
            slope,
        },
    )
}

/// One replicate of the fixed-n distributional experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CltPoint {
    pub replicate: u64,
    pub deviation: Option<f64>,
    pub e_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltSample {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub points: Vec<CltPoint>,
    /// Pearson correlation of (deviation, e_star); None for a single point
    pub correlation: Option<f64>,
    /// KS distance of the e_star sample from N(0,1); None for a single point
    pub ks_e_star: Option<f64>,
}

/// Independent (NOT nested) samples at one fixed n: fresh randomness per
/// replicate, keyed by replicate index.
pub fn clt_sample(n: usize, p: f64, replicates: u64, seed: u64) -> Result<CltSample> {
    if n > crate::moments::MC_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            n,
            max: crate::moments::MC_DIM_LIMIT,
        });
    }
    if replicates == 0 {
        return Err(Error::Domain("replicate budget must be >= 1".into()));
    }
    let points: Vec<CltPoint> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let stream = NestedMatrixStream::new(fork_seed(seed, rep), p);
            let record = build_record(&stream, n).expect("dimension checked");
            CltPoint {
                replicate: rep,
                deviation: record.deviation,
                e_star: record.e_star,
            }
        })
        .collect();

    let (correlation, ks_e_star) = if replicates >= 2 {
        let paired: Vec<(f64, f64)> = points
            .iter()
            .filter_map(|pt| pt.deviation.map(|d| (d, pt.e_star)))
            .collect();
        let xs: Vec<f64> = paired.iter().map(|&(d, _)| d).collect();
        let ys: Vec<f64> = paired.iter().map(|&(_, e)| e).collect();
        let all_e: Vec<f64> = points.iter().map(|pt| pt.e_star).collect();
        (pearson(&xs, &ys), ks_distance_std_normal(&all_e))
    } else {
        (None, None)
    };

    Ok(CltSample {
        n,
        p,
        seed,
        points,
        correlation,
        ks_e_star,
    })
}

/// Prefix maxima of the normalized column; absent records are skipped.
pub fn running_sup(path: &[PathRecord]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for r in path {
        if let Some(v) = r.normalized {
            best = best.max(v);
            out.push((r.n, best));
        }
    }
    out
}

pub const PATH_CSV_HEADER: &str =
    "seed,p,n,edges,e_star,y_present,y,centering,deviation,loglog_n,loglog_n2,normalized,residual,running_sup";

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g12).unwrap_or_default()
}

/// Renders a whole path in the documented CSV schema; absent values are
/// empty fields, running_sup is the prefix maximum of normalized.
pub fn render_path_csv(seed: u64, p: f64, path: &[PathRecord]) -> String {
    let mut out = String::from(PATH_CSV_HEADER);
    out.push('\n');
    let mut best: Option<f64> = None;
    for r in path {
        if let Some(v) = r.normalized {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            seed,
            fmt_g12(p),
            r.n,
            r.edges,
            fmt_g12(r.e_star),
            if r.y.is_some() { 1 } else { 0 },
            opt(r.y),
            fmt_g12(r.centering),
            opt(r.deviation),
            opt(r.loglog_n),
            opt(r.loglog_n2),
            opt(r.normalized),
            opt(r.residual),
            opt(best),
        ));
    }
    out
}
