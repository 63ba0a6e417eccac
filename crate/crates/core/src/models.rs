//! Random bipartite-graph models: the seeded infinite Bernoulli matrix with
//! nested minors, and the fixed-edge-count model G(n,n,m).
//!
//! Entry generation is counter-based: entry (i, j) is a pure hash of
//! (seed, i, j), so the minor at dimension n is always the leading block of
//! the minor at any larger dimension. A stateful stream generator would not
//! have this property.

use crate::error::{Error, Result};
use crate::perm::SquareBitMatrix;

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

/// SplitMix64 finalizer; the mixing primitive behind both the counter-based
/// entries and the stateful shuffle generator.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed, e.g. one per Monte Carlo replicate.
pub fn fork_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(index.wrapping_add(0x5851F42D4C957F2D)))
}

/// Minimal stateful generator for shuffles; splitmix64 sequence.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, bound) by rejection; unbiased and deterministic.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}

/// The seeded infinite Bernoulli(p) matrix; immutable and shareable.
#[derive(Debug, Clone)]
pub struct NestedMatrixStream {
    seed: u64,
    p: f64,
    threshold: u64,
}

impl NestedMatrixStream {
    pub fn new(seed: u64, p: f64) -> Self {
        assert!(p > 0.0 && p < 1.0, "edge probability must be in (0,1)");
        // floor(p * 2^64); bias below 2^-64 is accepted
        let threshold = {
            let t = p * 18446744073709551616.0;
            if t >= 18446744073709551615.0 {
                u64::MAX
            } else {
                t as u64
            }
        };
        Self { seed, p, threshold }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Entry (i, j), zero-based; a pure function of (seed, i, j).
    pub fn entry(&self, i: u64, j: u64) -> bool {
        let word = mix64(mix64(mix64(self.seed) ^ i) ^ mix64(j ^ 0xA5A5A5A5A5A5A5A5));
        word < self.threshold
    }

    /// The leading n×n principal minor of the infinite matrix.
    pub fn minor(&self, n: usize) -> Result<SquareBitMatrix> {
        if n > crate::perm::EXACT_DIM_LIMIT {
            return Err(Error::DimensionTooLarge {
                n,
                max: crate::perm::EXACT_DIM_LIMIT,
            });
        }
        Ok(SquareBitMatrix::from_fn(n, |i, j| {
            self.entry(i as u64, j as u64)
        }))
    }
}

/// Uniform sample from G(n,n,m): exactly m of the n^2 cells set.
///
/// Partial Fisher-Yates over the cell indices; exact uniformity for every m.
pub fn sample_gnnm(n: usize, m: usize, rng: &mut SplitMix64) -> Result<SquareBitMatrix> {
    let cells = n * n;
    if m > cells {
        return Err(Error::EdgeCountOutOfRange { n, m, max: cells });
    }
    let mut idx: Vec<u32> = (0..cells as u32).collect();
    let mut out = SquareBitMatrix::zeros(n);
    for t in 0..m {
        let r = t + rng.below((cells - t) as u64) as usize;
        idx.swap(t, r);
        let cell = idx[t] as usize;
        out.set(cell / n, cell % n, true);
    }
    Ok(out)
}

/// Edge-count statistics of a matrix under the Bernoulli(p) model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCountStats {
    pub n: usize,
    pub e: u32,
    pub p: f64,
    /// (e - p n^2) / sqrt(p (1-p) n^2)
    pub e_star: f64,
}

pub fn edge_stats(m: &SquareBitMatrix, p: f64) -> EdgeCountStats {
    assert!(p > 0.0 && p < 1.0);
    let n = m.n();
    let e = m.edge_count();
    let n2 = (n * n) as f64;
    let e_star = (e as f64 - p * n2) / (p * (1.0 - p) * n2).sqrt();
    EdgeCountStats { n, e, p, e_star }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minors_nest() {
        let s = NestedMatrixStream::new(7, 0.5);
        let m5 = s.minor(5).unwrap();
        let m3 = s.minor(3).unwrap();
        assert_eq!(m5.leading_minor(3), m3);
    }

    #[test]
    fn entries_are_reproducible() {
        let a = NestedMatrixStream::new(42, 0.3);
        let b = NestedMatrixStream::new(42, 0.3);
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(a.entry(i, j), b.entry(i, j));
            }
        }
    }

    #[test]
    fn seed_zero_density_is_plausible() {
        let s = NestedMatrixStream::new(0, 0.5);
        let m = s.minor(30).unwrap();
        let mean = m.edge_count() as f64 / 900.0;
        assert!((0.4..=0.6).contains(&mean), "mean {mean}");
    }

    #[test]
    fn distinct_seeds_differ() {
        let a = NestedMatrixStream::new(1, 0.5).minor(10).unwrap();
        let b = NestedMatrixStream::new(2, 0.5).minor(10).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn gnnm_edge_count_exact() {
        let mut rng = SplitMix64::new(11);
        for m in [0usize, 3, 9] {
            let g = sample_gnnm(3, m, &mut rng).unwrap();
            assert_eq!(g.edge_count() as usize, m);
        }
        assert_eq!(
            sample_gnnm(3, 9, &mut rng).unwrap(),
            SquareBitMatrix::ones(3)
        );
        assert_eq!(
            sample_gnnm(3, 0, &mut rng).unwrap(),
            SquareBitMatrix::zeros(3)
        );
    }

    #[test]
    fn gnnm_rejects_overfull() {
        let mut rng = SplitMix64::new(1);
        assert!(matches!(
            sample_gnnm(3, 10, &mut rng),
            Err(Error::EdgeCountOutOfRange { .. })
        ));
    }

    #[test]
    fn edge_stats_examples() {
        let s = edge_stats(&SquareBitMatrix::ones(10), 0.5);
        assert_eq!(s.e, 100);
        assert!((s.e_star - 10.0).abs() < 1e-12);

        // n=2, p=1/2, 3 ones: (3-2)/1 = 1
        let mut m = SquareBitMatrix::ones(2);
        m.set(0, 0, false);
        let s = edge_stats(&m, 0.5);
        assert!((s.e_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gnnm_is_uniform_over_two_edge_graphs() {
        // n=2, m=2: six graphs, chi-square with 5 dof at the 1e-6 quantile
        let mut rng = SplitMix64::new(2024);
        let mut counts = std::collections::HashMap::new();
        let trials = 60_000;
        for _ in 0..trials {
            let g = sample_gnnm(2, 2, &mut rng).unwrap();
            *counts.entry(g.rows().to_vec()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = trials as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // quantile of chi-square(5) at 1 - 1e-6
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let threshold = ChiSquared::new(5.0).unwrap().inverse_cdf(1.0 - 1e-6);
        assert!(chi2 < threshold, "chi2 {chi2} >= {threshold}");
        for &c in counts.values() {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn conditional_equivalence_at_n2() {
        // G(2,2,p) conditioned on edge count 2 should match G(2,2,2)
        let trials = 100_000u64;
        let mut cond_counts = std::collections::HashMap::new();
        let mut kept = 0u64;
        for rep in 0..trials {
            let s = NestedMatrixStream::new(fork_seed(99, rep), 0.5);
            let g = s.minor(2).unwrap();
            if g.edge_count() == 2 {
                kept += 1;
                *cond_counts.entry(g.rows().to_vec()).or_insert(0u64) += 1;
            }
        }
        assert_eq!(cond_counts.len(), 6);
        let expected = kept as f64 / 6.0;
        let chi2: f64 = cond_counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let threshold = ChiSquared::new(5.0).unwrap().inverse_cdf(1.0 - 1e-6);
        assert!(chi2 < threshold, "chi2 {chi2} >= {threshold}");
    }
}
