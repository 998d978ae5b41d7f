//! Deterministic tangent-sample lattices and seeded random samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FinslerMetricSpec, TangentSample};
use crate::error::{FinslerError, Result};

/// How unit directions in each fiber are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionSet {
    /// Halton points on the cube, radially projected; `seed` skips a prefix.
    LowDiscrepancy { seed: u64 },
    /// Icosahedron vertices for n = 3, signed coordinate and diagonal
    /// directions otherwise.
    Symmetric,
}

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    acc
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= norm);
}

impl DirectionSet {
    pub fn directions(&self, n: usize, count: usize) -> Vec<Vec<f64>> {
        match *self {
            DirectionSet::LowDiscrepancy { seed } => {
                assert!(n <= PRIMES.len(), "dimension too large for Halton directions");
                let mut out = Vec::with_capacity(count);
                let mut i = seed + 1;
                while out.len() < count {
                    let mut v: Vec<f64> = (0..n)
                        .map(|d| 2.0 * radical_inverse(i, PRIMES[d]) - 1.0)
                        .collect();
                    i += 1;
                    let r2: f64 = v.iter().map(|c| c * c).sum();
                    // keep the ball so projected directions are uniform
                    if r2 > 1.0 || r2 < 1e-2 {
                        continue;
                    }
                    normalize(&mut v);
                    out.push(v);
                }
                out
            }
            DirectionSet::Symmetric => {
                let mut all = if n == 3 {
                    let g = (1.0 + 5f64.sqrt()) / 2.0;
                    let mut v = Vec::new();
                    for a in [-1.0, 1.0] {
                        for b in [-g, g] {
                            v.push(vec![0.0, a, b]);
                            v.push(vec![a, b, 0.0]);
                            v.push(vec![b, 0.0, a]);
                        }
                    }
                    v
                } else {
                    let mut v = Vec::new();
                    for i in 0..n {
                        for sgn in [1.0, -1.0] {
                            let mut e = vec![0.0; n];
                            e[i] = sgn;
                            v.push(e);
                        }
                    }
                    for i in 0..n {
                        for j in i + 1..n {
                            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                                let mut e = vec![0.0; n];
                                e[i] = si;
                                e[j] = sj;
                                v.push(e);
                            }
                        }
                    }
                    v
                };
                all.iter_mut().for_each(|d| normalize(d));
                all.truncate(count);
                all
            }
        }
    }
}

/// Grid base points × unit directions, filtered by admissibility.
///
/// Sample ids are assigned after filtering, in lattice order.
pub fn sample_lattice(
    spec: &FinslerMetricSpec,
    ydirs_per_point: usize,
    dirs: DirectionSet,
) -> Result<Vec<TangentSample>> {
    let n = spec.dim();
    if ydirs_per_point < n + 1 {
        return Err(FinslerError::InvalidArgument(format!(
            "need at least n + 1 = {} directions per point, got {ydirs_per_point}",
            n + 1
        )));
    }
    let directions = dirs.directions(n, ydirs_per_point);
    let mut out = Vec::new();
    for x in spec.chart.base_points() {
        let before = out.len();
        for d in &directions {
            let s = spec.checked_sample(out.len(), x.clone(), d.clone());
            if s.admissible {
                out.push(s);
            }
        }
        if out.len() == before {
            return Err(FinslerError::EmptyFiber(x));
        }
    }
    Ok(out)
}

/// `count` admissible samples with uniform base points in the box, uniform
/// directions and lengths in `[0.5, 2]`.
pub fn random_samples(spec: &FinslerMetricSpec, count: usize, seed: u64) -> Vec<TangentSample> {
    let n = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 1000 * (count + 10),
            "could not draw {count} admissible samples for {}",
            spec.name
        );
        let x: Vec<f64> = spec
            .chart
            .bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r2: f64 = y.iter().map(|c| c * c).sum();
        if r2 > 1.0 || r2 < 1e-2 {
            continue;
        }
        normalize(&mut y);
        let len = rng.gen_range(0.5..=2.0);
        y.iter_mut().for_each(|c| *c *= len);
        let s = spec.checked_sample(out.len(), x, y);
        if s.admissible {
            out.push(s);
        }
    }
    out
}
