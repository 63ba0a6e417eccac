//! Shared numeric helpers: compensated summation, streaming log-sum-exp,
//! logs of big integers, and small statistics routines.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// log(exp(a) + exp(b)) without overflow.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Streaming log-sum-exp with a running maximum; terms arrive as logs.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    // sum of exp(term - max), compensated
    scaled: KahanSum,
    count: u64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: KahanSum::new(),
            count: 0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, log_term: f64) {
        self.count += 1;
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.max {
            // rescale the accumulated sum to the new maximum
            let old = self.scaled.value();
            let shift = (self.max - log_term).exp();
            self.scaled = KahanSum::new();
            self.scaled.add(old * shift);
            self.max = log_term;
        }
        self.scaled.add((log_term - self.max).exp());
    }

    /// log of the sum of all pushed terms; -inf when every term was -inf.
    pub fn log_sum(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.max + self.scaled.value().ln()
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Natural log of a positive big integer, accurate to ~1e-15 relative.
///
/// Uses the top 53 bits as a mantissa so values far beyond f64 range stay
/// representable in log-domain.
pub fn ln_biguint(v: &BigUint) -> Option<f64> {
    use num_traits::Zero;
    if v.is_zero() {
        return None;
    }
    let bits = v.bits();
    if bits <= 53 {
        return Some(v.to_f64().unwrap().ln());
    }
    let shift = bits - 53;
    let top = (v >> shift).to_f64().unwrap();
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Pearson correlation; None when either variance degenerates or fewer than
/// two points are given.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Ordinary least squares y = a + b x; returns (intercept, slope, slope_stderr).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut rss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - intercept - slope * x;
        rss += r * r;
    }
    let se = (rss / (nf - 2.0) / sxx).sqrt();
    Some((intercept, slope, se))
}

/// One-sample Kolmogorov–Smirnov distance against the standard normal.
pub fn ks_distance_std_normal(sample: &[f64]) -> Option<f64> {
    let n = sample.len();
    if n == 0 {
        return None;
    }
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = std_normal_cdf(x);
        d = d.max((((i + 1) as f64) / nf - cdf).abs());
        d = d.max((cdf - (i as f64) / nf).abs());
    }
    Some(d)
}

/// Formats a float with 12 significant digits, printf-%g style.
///
/// Output is a pure function of the bit pattern, so identical values render
/// to identical bytes on every platform.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    // {:.11e} rounds half-to-even on the exact decimal expansion
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().unwrap();
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{}e{}", m, exp);
    }
    // fixed notation: 12 significant digits means 11 - exp decimals
    let decimals = (11 - exp).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    if fixed.contains('.') {
        fixed
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        fixed
    }
}
