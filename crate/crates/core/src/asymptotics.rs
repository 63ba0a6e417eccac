//! Closed-form quantities and bounds in log-domain: falling factorials,
//! expected matching counts, iterated-logarithm centering and scale, the
//! k-tuple count bounds, Stirling brackets, and the degree-ratio refinement
//! factor.

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use statrs::function::gamma::ln_gamma;

/// log s! via log-gamma.
pub fn ln_factorial(s: u64) -> f64 {
    ln_gamma(s as f64 + 1.0)
}

/// Parameters of the fixed-edge-count model; p_m = m/n^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: u64,
    pub m: u64,
}

impl ModelParams {
    pub fn new(n: u64, m: u64) -> Self {
        Self { n, m }
    }

    pub fn p_m(&self) -> f64 {
        self.m as f64 / (self.n * self.n) as f64
    }
}

/// log of the falling factorial (N)_l = N(N-1)...(N-l+1), exact term-by-term
/// with compensated summation. None when l > N (the product is 0).
pub fn log_falling_factorial_exact(n: u64, l: u64) -> Option<f64> {
    if l > n {
        return None;
    }
    let mut acc = KahanSum::new();
    for i in 0..l {
        acc.add(((n - i) as f64).ln());
    }
    Some(acc.value())
}

/// Second-order approximation l*log N - l(l-1)/(2N); the dropped remainder
/// is O(l^3/N^2).
pub fn log_falling_factorial_approx(n: u64, l: u64) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let (nf, lf) = (n as f64, l as f64);
    lf * nf.ln() - lf * (lf - 1.0) / (2.0 * nf)
}

/// log E X_{n,m} = log n! + log (m)_n - log (n^2)_n; None when m < n
/// (the expectation is 0).
pub fn log_expected_matchings_exact(params: ModelParams) -> Option<f64> {
    let ModelParams { n, m } = params;
    let num = log_falling_factorial_exact(m, n)?;
    let den = log_falling_factorial_exact(n * n, n).expect("n <= n^2");
    Some(ln_factorial(n) + num - den)
}

/// Asymptotic form log n! + n log p_m + (p_m - 1)/(2 p_m), dropping the
/// O(1/n) remainder.
pub fn log_expected_matchings_approx(params: ModelParams) -> f64 {
    let p_m = params.p_m();
    ln_factorial(params.n) + params.n as f64 * p_m.ln() + (p_m - 1.0) / (2.0 * p_m)
}

/// Centering term log(n! p^n).
pub fn lil_centering(n: u64, p: f64) -> f64 {
    ln_factorial(n) + n as f64 * p.ln()
}

/// Scale sqrt(2 log log n) * sqrt((1-p)/p); None below n = 4, where
/// log log n is not safely positive.
pub fn lil_scale(n: u64, p: f64) -> Option<f64> {
    if n < 4 {
        return None;
    }
    let ll = (n as f64).ln().ln();
    Some((2.0 * ll).sqrt() * ((1.0 - p) / p).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentBoundVariant {
    /// (n!)^k C(k,2)^a / a!
    Basic,
    /// 2^k exp(-k(k-1)/2) (n!)^k C(k,2)^a / a!, valid only for ka = o(n);
    /// the implementation insists on ka <= n/10.
    Refined,
}

/// log of the upper bound on M(a), the number of ordered k-tuples of perfect
/// matchings whose union misses a edge slots.
pub fn log_moment_bound(n: u64, k: u64, a: u64, variant: MomentBoundVariant) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("moment order k={k} must be >= 2")));
    }
    if a > (k - 1) * n {
        return Err(Error::Domain(format!(
            "a={a} exceeds the maximum (k-1)n = {}",
            (k - 1) * n
        )));
    }
    let choose2 = (k * (k - 1) / 2) as f64;
    let basic = k as f64 * ln_factorial(n) + a as f64 * choose2.ln() - ln_factorial(a);
    match variant {
        MomentBoundVariant::Basic => Ok(basic),
        MomentBoundVariant::Refined => {
            if k * a * 10 > n {
                return Err(Error::Domain(format!(
                    "refined bound requires ka <= n/10 (ka = {}, n = {n})",
                    k * a
                )));
            }
            Ok(basic + k as f64 * 2f64.ln() - (k * (k - 1)) as f64 / 2.0)
        }
    }
}

/// Stirling sandwich: log sqrt(2 pi s) + s log s - s bounds log s! from
/// below; adding 1/(12 s) bounds it from above.
pub fn stirling_log_bounds(s: u64) -> (f64, f64) {
    assert!(s >= 1);
    let sf = s as f64;
    let lower = 0.5 * (2.0 * std::f64::consts::PI * sf).ln() + sf * sf.ln() - sf;
    (lower, lower + 1.0 / (12.0 * sf))
}

/// Exact log of [(d!)^{1/d} / (D!)^{1/D}]^{n-ka} with d = n - l_t - (t-1)
/// and D = n - l_t; converges to -(t-1) as n grows.
pub fn refinement_factor(n: u64, k: u64, a: u64, t: u64, l_t: u64) -> Result<f64> {
    if t < 1 {
        return Err(Error::Domain("t must be >= 1".into()));
    }
    if l_t + (t - 1) + 1 > n {
        return Err(Error::Domain(format!(
            "d = n - l_t - (t-1) must be >= 1 (n={n}, l_t={l_t}, t={t})"
        )));
    }
    if k * a * 10 > n {
        return Err(Error::Domain(format!(
            "refinement requires ka <= n/10 (ka = {}, n = {n})",
            k * a
        )));
    }
    let d = n - l_t - (t - 1);
    let big_d = n - l_t;
    let exponent = (n - k * a) as f64;
    Ok(exponent * (ln_factorial(d) / d as f64 - ln_factorial(big_d) / big_d as f64))
}
