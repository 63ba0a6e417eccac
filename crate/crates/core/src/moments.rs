//! Moment concentration lab: Monte Carlo k-th moments of the matching count
//! of G(n,n,m), exhaustive enumeration on tiny instances, the exact k-tuple
//! census M(a), and checks of the counting bounds they feed.

use crate::asymptotics::{log_expected_matchings_exact, log_moment_bound, ModelParams, MomentBoundVariant};
use crate::error::{Error, Result};
use crate::models::{fork_seed, sample_gnnm, SplitMix64};
use crate::numeric::{fmt_g12, wilson_interval, LogSumExp};
use crate::perm::{permanent_bruteforce, permanent_ryser, SquareBitMatrix};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

/// Monte Carlo permanents are kept exact, so each replicate costs about
/// 2^n * n word operations; 28 keeps a replicate under a second.
pub const MC_DIM_LIMIT: usize = 28;
/// Enumeration budget for exhaustive moments: C(n^2, m) subsets.
pub const EXHAUSTIVE_BUDGET: u128 = 10_000_000;
/// Enumeration budget for the census: (n!)^k ordered tuples.
pub const CENSUS_BUDGET: u128 = 100_000_000;

/// Monte Carlo estimate of E X_{n,m}^k in log-domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    /// log of the estimated mean of X^k; -inf when every replicate had X = 0.
    pub log_mean: f64,
    /// standard error of the log of the mean (delta method).
    pub stderr: f64,
    pub replicates: u64,
    pub seed: u64,
}

/// Exact census a -> M(a) over ordered k-tuples of perfect matchings of
/// K_{n,n}; a = kn - |union of edge sets|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleCensus {
    pub n: usize,
    pub k: u32,
    /// counts[a] = M(a) for 0 <= a <= (k-1) n.
    pub counts: Vec<u64>,
}

impl TupleCensus {
    pub fn total(&self) -> BigUint {
        self.counts.iter().map(|&c| BigUint::from(c)).sum()
    }
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

fn matching_count(g: &SquareBitMatrix) -> BigUint {
    let per = if g.n() <= crate::perm::BRUTEFORCE_DIM_LIMIT {
        permanent_bruteforce(g)
    } else {
        permanent_ryser(g)
    };
    per.expect("dimension checked by caller").0
}

/// Monte Carlo mean of X_{n,m}^k over independent G(n,n,m) samples.
///
/// Replicates are keyed by (seed, index) and folded in index order, so the
/// result is bit-identical regardless of thread count. Zero-permanent
/// samples contribute X^k = 0 (for k >= 1) and are never discarded.
pub fn estimate_kth_moment(
    n: usize,
    m: usize,
    k: u32,
    replicates: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    if n > MC_DIM_LIMIT {
        return Err(Error::DimensionTooLarge { n, max: MC_DIM_LIMIT });
    }
    if m > n * n {
        return Err(Error::EdgeCountOutOfRange { n, m, max: n * n });
    }
    if replicates == 0 {
        return Err(Error::Domain("replicate budget must be >= 1".into()));
    }

    if k == 0 {
        // zeroth moment: X^0 = 1 for every sample, including X = 0
        return Ok(MomentEstimate {
            n,
            m,
            k,
            log_mean: 0.0,
            stderr: 0.0,
            replicates,
            seed,
        });
    }

    let log_values: Vec<Option<f64>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = SplitMix64::new(fork_seed(seed, rep));
            let g = sample_gnnm(n, m, &mut rng).expect("m range checked");
            crate::numeric::ln_biguint(&matching_count(&g))
        })
        .collect();

    // deterministic sequential fold in replicate order
    let mut lse_k = LogSumExp::new();
    let mut lse_2k = LogSumExp::new();
    for lv in &log_values {
        match lv {
            Some(lx) => {
                lse_k.push(k as f64 * lx);
                lse_2k.push(2.0 * k as f64 * lx);
            }
            None => {
                lse_k.push(f64::NEG_INFINITY);
                lse_2k.push(f64::NEG_INFINITY);
            }
        }
    }
    let log_r = (replicates as f64).ln();
    let log_m1 = lse_k.log_sum() - log_r;
    let log_m2 = lse_2k.log_sum() - log_r;
    let stderr = if log_m1 == f64::NEG_INFINITY {
        0.0
    } else {
        let gap = 2.0 * log_m1 - log_m2;
        if gap >= 0.0 {
            0.0
        } else {
            // log Var = log m2 + log(1 - exp(2 log m1 - log m2))
            let log_var = log_m2 + (-(gap.exp())).ln_1p();
            let log_se_mean = 0.5 * (log_var - log_r);
            (log_se_mean - log_m1).exp()
        }
    };

    Ok(MomentEstimate {
        n,
        m,
        k,
        log_mean: log_m1,
        stderr,
        replicates,
        seed,
    })
}

/// Exact E X_{n,m}^k by enumerating every m-subset of the n^2 cells.
pub fn exhaustive_kth_moment_exact(n: usize, m: usize, k: u32) -> Result<BigRational> {
    if n > crate::perm::EXACT_DIM_LIMIT {
        return Err(Error::DimensionTooLarge { n, max: crate::perm::EXACT_DIM_LIMIT });
    }
    let cells = n * n;
    if m > cells {
        return Err(Error::EdgeCountOutOfRange { n, m, max: cells });
    }
    let total = binomial_u128(cells as u128, m as u128)
        .filter(|&t| t <= EXHAUSTIVE_BUDGET)
        .ok_or(Error::BudgetExceeded {
            need: u128::MAX,
            limit: EXHAUSTIVE_BUDGET,
        })?;
    if total > EXHAUSTIVE_BUDGET {
        return Err(Error::BudgetExceeded { need: total, limit: EXHAUSTIVE_BUDGET });
    }

    // lexicographic successor of an m-combination of 0..cells
    fn next_combination(comb: &mut [usize], cells: usize) -> bool {
        let m = comb.len();
        let mut i = m;
        while i > 0 {
            i -= 1;
            if comb[i] != i + cells - m {
                comb[i] += 1;
                for j in i + 1..m {
                    comb[j] = comb[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    let mut sum = BigUint::zero();
    let mut graphs = 0u128;
    let mut comb: Vec<usize> = (0..m).collect();
    loop {
        let mut g = SquareBitMatrix::zeros(n);
        for &c in &comb {
            g.set(c / n, c % n, true);
        }
        sum += matching_count(&g).pow(k);
        graphs += 1;
        if !next_combination(&mut comb, cells) {
            break;
        }
    }
    debug_assert_eq!(graphs, total.max(1));
    let denom = BigUint::from(total.max(1));
    Ok(BigRational::new(sum.into(), denom.into()))
}

/// f64 view of [`exhaustive_kth_moment_exact`].
pub fn exhaustive_kth_moment(n: usize, m: usize, k: u32) -> Result<f64> {
    Ok(exhaustive_kth_moment_exact(n, m, k)?
        .to_f64()
        .expect("moment fits f64 on enumerable instances"))
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut items: Vec<u8> = (0..n as u8).collect();
    fn heap(items: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(items, k - 1, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(&mut items, n, &mut out);
    out
}

/// Exact census of ordered k-tuples of perfect matchings of K_{n,n}.
pub fn census_tuples(n: usize, k: u32) -> Result<TupleCensus> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("census requires n >= 1 and k >= 1".into()));
    }
    if n * n > 64 {
        return Err(Error::DimensionTooLarge { n, max: 8 });
    }
    let fact: u128 = (1..=n as u128).product();
    let need = fact.checked_pow(k).unwrap_or(u128::MAX);
    if need > CENSUS_BUDGET {
        return Err(Error::BudgetExceeded { need, limit: CENSUS_BUDGET });
    }

    // edge mask of each permutation over the n^2 cell grid
    let masks: Vec<u64> = permutations(n)
        .iter()
        .map(|perm| {
            perm.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &j)| acc | 1u64 << (i * n + j as usize))
        })
        .collect();

    let mut counts = vec![0u64; (k as usize - 1) * n + 1];
    fn walk(masks: &[u64], depth: u32, k: u32, union: u64, n: usize, counts: &mut [u64]) {
        if depth == k {
            let a = k as usize * n - union.count_ones() as usize;
            counts[a] += 1;
            return;
        }
        for &m in masks {
            walk(masks, depth + 1, k, union | m, n, counts);
        }
    }
    walk(&masks, 0, k, 0, n, &mut counts);
    Ok(TupleCensus { n, k, counts })
}

/// One row of a bound-domination report.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound1Row {
    pub a: usize,
    pub m_a: u64,
    /// log M(a); None when M(a) = 0.
    pub log_m_a: Option<f64>,
    pub log_bound: f64,
    /// log_bound - log M(a); infinite when M(a) = 0.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bound1Report {
    pub n: usize,
    pub k: u32,
    pub rows: Vec<Bound1Row>,
    pub ok: bool,
}

/// Checks log M(a) <= log of the basic multinomial bound for every a.
pub fn verify_bound1(census: &TupleCensus) -> Result<Bound1Report> {
    let mut rows = Vec::with_capacity(census.counts.len());
    let mut ok = true;
    for (a, &m_a) in census.counts.iter().enumerate() {
        let log_bound = log_moment_bound(
            census.n as u64,
            census.k as u64,
            a as u64,
            MomentBoundVariant::Basic,
        )?;
        let log_m_a = if m_a == 0 { None } else { Some((m_a as f64).ln()) };
        let slack = match log_m_a {
            Some(lm) => log_bound - lm,
            None => f64::INFINITY,
        };
        // equality (slack 0) is legal; only a strict violation fails
        if slack < -1e-9 {
            ok = false;
        }
        rows.push(Bound1Row { a, m_a, log_m_a, log_bound, slack });
    }
    Ok(Bound1Report { n: census.n, k: census.k, rows, ok })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedReport {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_diff: f64,
    pub ok: bool,
}

fn falling_factorial_big(n: u64, l: u64) -> BigUint {
    if l > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..l {
        acc *= BigUint::from(n - i);
    }
    acc
}

/// Verifies E X_{n,m}^k = sum_a M(a) (m)_{kn-a} / (n^2)_{kn-a} by computing
/// both sides as exact rationals.
pub fn verify_rearranged(n: usize, m: usize, k: u32) -> Result<RearrangedReport> {
    let lhs = exhaustive_kth_moment_exact(n, m, k)?;
    let census = census_tuples(n, k)?;
    let mut rhs = BigRational::zero();
    for (a, &m_a) in census.counts.iter().enumerate() {
        if m_a == 0 {
            continue;
        }
        let l = k as u64 * n as u64 - a as u64;
        let num = falling_factorial_big(m as u64, l);
        if num.is_zero() {
            continue;
        }
        let den = falling_factorial_big((n * n) as u64, l);
        rhs += BigRational::new((BigUint::from(m_a) * num).into(), den.into());
    }
    let lhs_f = lhs.to_f64().unwrap_or(f64::NAN);
    let rhs_f = rhs.to_f64().unwrap_or(f64::NAN);
    let rel_diff = if lhs == rhs {
        0.0
    } else {
        let denom = lhs_f.abs().max(rhs_f.abs()).max(f64::MIN_POSITIVE);
        (lhs_f - rhs_f).abs() / denom
    };
    Ok(RearrangedReport {
        n,
        m,
        k,
        lhs: lhs_f,
        rhs: rhs_f,
        rel_diff,
        ok: rel_diff <= 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub n: usize,
    pub m: usize,
    pub k_factor: f64,
    pub exceed: u64,
    pub replicates: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Empirical frequency of X >= K * E X with a Wilson 95% interval.
pub fn tail_probability(
    n: usize,
    m: usize,
    k_factor: f64,
    replicates: u64,
    seed: u64,
) -> Result<TailReport> {
    if n > MC_DIM_LIMIT {
        return Err(Error::DimensionTooLarge { n, max: MC_DIM_LIMIT });
    }
    if m > n * n {
        return Err(Error::EdgeCountOutOfRange { n, m, max: n * n });
    }
    let log_threshold = match log_expected_matchings_exact(ModelParams::new(n as u64, m as u64)) {
        Some(log_ex) => k_factor.ln() + log_ex,
        // E X = 0: the threshold is 0, every sample (including X = 0) exceeds
        None => f64::NEG_INFINITY,
    };
    let exceed: u64 = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = SplitMix64::new(fork_seed(seed, rep));
            let g = sample_gnnm(n, m, &mut rng).expect("m range checked");
            let lx = crate::numeric::ln_biguint(&matching_count(&g));
            let hit = match lx {
                Some(lx) => lx >= log_threshold,
                None => log_threshold == f64::NEG_INFINITY,
            };
            hit as u64
        })
        .sum();
    let frequency = if replicates == 0 {
        0.0
    } else {
        exceed as f64 / replicates as f64
    };
    let (ci_low, ci_high) = wilson_interval(exceed, replicates, 1.96);
    Ok(TailReport { n, m, k_factor, exceed, replicates, frequency, ci_low, ci_high })
}

pub const MOMENT_CSV_HEADER: &str = "n,m,k,log_mean,stderr,replicates,seed";

pub fn moment_csv_row(e: &MomentEstimate) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        e.n,
        e.m,
        e.k,
        fmt_g12(e.log_mean),
        fmt_g12(e.stderr),
        e.replicates,
        e.seed
    )
}

pub const CENSUS_CSV_HEADER: &str = "n,k,a,M_a,log_bound_basic,slack";

pub fn census_csv_rows(report: &Bound1Report) -> Vec<String> {
    report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                report.n,
                report.k,
                r.a,
                r.m_a,
                fmt_g12(r.log_bound),
                fmt_g12(r.slack)
            )
        })
        .collect()
}
