//! Seeded Monte-Carlo averages over `(0, eta)`.
//!
//! Nodes are generated in fixed-size chunks; chunk `c` draws from a ChaCha8
//! stream selected by `(seed, c)`. Chunks may run on any thread, and their
//! partial results are merged in chunk order, so every estimate is
//! bit-identical for a given seed regardless of the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Nodes per chunk. Even, so stratum pairs never straddle chunks.
pub const CHUNK: usize = 4096;

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Uniform draw from the open interval `(0, 1)`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn chunks(n: usize) -> impl IndexedParallelIterator<Item = (usize, std::ops::Range<usize>)> {
    let count = n.div_ceil(CHUNK);
    (0..count)
        .into_par_iter()
        .map(move |c| (c, c * CHUNK..((c + 1) * CHUNK).min(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratifiedEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub nodes: usize,
    /// Nodes whose value was not finite; they are left out of the mean.
    pub non_finite: usize,
    pub max_abs: f64,
    /// Largest `|re f|`; differs from `max_abs` when the imaginary part
    /// carries a weight.
    pub max_abs_re: f64,
}

#[derive(Default, Clone, Copy)]
struct StratPartial {
    sum: Complex64,
    pair_sq: f64,
    valid: usize,
    non_finite: usize,
    max_abs: f64,
    max_abs_re: f64,
}

/// `(1/eta) * integral_0^eta f` from `n` equal strata with one uniform node
/// each. The standard error is estimated from adjacent stratum pairs,
/// `sqrt(sum |f_a - f_b|^2) / n`, which is conservative.
pub fn stratified_mean<F>(f: F, eta: f64, n: usize, seed: u64) -> StratifiedEstimate
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let n = n.max(2);
    let width = eta / n as f64;
    let partials: Vec<StratPartial> = chunks(n)
        .map(|(c, range)| {
            let mut rng = chunk_rng(seed, c);
            let mut p = StratPartial::default();
            let mut prev: Option<Complex64> = None;
            for k in range {
                let eps = (k as f64 + open_unit(&mut rng)) * width;
                let v = f(eps);
                let ok = v.re.is_finite() && v.im.is_finite();
                if ok {
                    p.sum += v;
                    p.valid += 1;
                    p.max_abs = p.max_abs.max(v.norm());
                    p.max_abs_re = p.max_abs_re.max(v.re.abs());
                } else {
                    p.non_finite += 1;
                }
                if k % 2 == 0 {
                    prev = ok.then_some(v);
                } else if let (Some(a), true) = (prev.take(), ok) {
                    p.pair_sq += (a - v).norm_sqr();
                }
            }
            p
        })
        .collect();

    let total = partials.iter().fold(StratPartial::default(), |acc, p| StratPartial {
        sum: acc.sum + p.sum,
        pair_sq: acc.pair_sq + p.pair_sq,
        valid: acc.valid + p.valid,
        non_finite: acc.non_finite + p.non_finite,
        max_abs: acc.max_abs.max(p.max_abs),
        max_abs_re: acc.max_abs_re.max(p.max_abs_re),
    });
    let valid = total.valid.max(1) as f64;
    StratifiedEstimate {
        mean: total.sum / valid,
        stderr: total.pair_sq.sqrt() / valid,
        nodes: n,
        non_finite: total.non_finite,
        max_abs: total.max_abs,
        max_abs_re: total.max_abs_re,
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct Welford {
    pub count: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise merge. Exact for constant data.
    pub fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        Welford {
            count: n,
            mean: if d == 0.0 { self.mean } else { self.mean + d * w },
            m2: self.m2 + other.m2 + d * d * self.count as f64 * w,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformEstimate {
    pub stats: Welford,
    /// Draws whose value was not finite, dropped from `stats`.
    pub dropped: usize,
    pub draws: usize,
}

/// Plain Monte Carlo with `n` i.i.d. uniform draws from `(0, eta)`.
///
/// `f` returns `None` for draws it cannot evaluate; those are counted as
/// dropped. When `trace` is set the per-draw `(eps, value)` pairs are
/// returned in draw order as well.
pub fn uniform_mean<F>(f: F, eta: f64, n: usize, seed: u64, trace: bool) -> (UniformEstimate, Vec<(f64, f64)>)
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    let parts: Vec<(Welford, usize, Vec<(f64, f64)>)> = chunks(n)
        .map(|(c, range)| {
            let mut rng = chunk_rng(seed, c);
            let mut w = Welford::default();
            let mut dropped = 0;
            let mut points = Vec::new();
            for _ in range {
                let eps = open_unit(&mut rng) * eta;
                match f(eps).filter(|v| v.is_finite()) {
                    Some(v) => {
                        w.push(v);
                        if trace {
                            points.push((eps, v));
                        }
                    }
                    None => dropped += 1,
                }
            }
            (w, dropped, points)
        })
        .collect();

    let mut stats = Welford::default();
    let mut dropped = 0;
    let mut points = Vec::new();
    for (w, d, p) in parts {
        stats = stats.merge(&w);
        dropped += d;
        points.extend(p);
    }
    (
        UniformEstimate {
            stats,
            dropped,
            draws: n,
        },
        points,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_exact() {
        let s = stratified_mean(|_| Complex64::new(7.0, 0.0), 0.3, 10_000, 1);
        assert_eq!(s.mean.re, 7.0);
        assert_eq!(s.stderr, 0.0);
        let (u, _) = uniform_mean(|_| Some(0.1), 1e-3, 10_000, 4, false);
        assert_eq!(u.stats.mean, 0.1);
        assert_eq!(u.stats.m2, 0.0);
    }

    #[test]
    fn linear_integrand() {
        // (1/eta) * integral of t over (0, eta) = eta / 2
        let s = stratified_mean(|t| Complex64::new(t, 0.0), 2.0, 100_000, 9);
        assert!((s.mean.re - 1.0).abs() < 1e-6);
        let (u, _) = uniform_mean(|t| Some(t), 2.0, 100_000, 9, false);
        assert!((u.stats.mean - 1.0).abs() < 5.0 * u.stats.stderr());
    }

    #[test]
    fn seeded_determinism_and_streams() {
        let f = |t: f64| Some((1.0 / t).sin().abs());
        let (a, _) = uniform_mean(f, 1e-3, 20_000, 5, false);
        let (b, _) = uniform_mean(f, 1e-3, 20_000, 5, false);
        assert_eq!(a, b);
        let (c, _) = uniform_mean(f, 1e-3, 20_000, 6, false);
        assert_ne!(a.stats.mean, c.stats.mean);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let f = |t: f64| Some((1.0 / t).cos());
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| uniform_mean(f, 1e-2, 50_000, 11, false).0)
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn dropped_draws_are_counted() {
        let (u, trace) = uniform_mean(|t| (t > 0.5).then_some(1.0), 1.0, 10_000, 2, true);
        assert!(u.dropped > 4000 && u.dropped < 6000);
        assert_eq!(u.stats.count + u.dropped, 10_000);
        assert_eq!(trace.len(), u.stats.count);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Welford::default();
        xs.iter().for_each(|x| whole.push(*x));
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..313].iter().for_each(|x| a.push(*x));
        xs[313..].iter().for_each(|x| b.push(*x));
        let m = a.merge(&b);
        assert!((m.mean - whole.mean).abs() < 1e-12);
        assert!((m.variance() - whole.variance()).abs() < 1e-10);
    }
}
