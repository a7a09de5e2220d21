//! Random graph generators: Erdős–Rényi `G(n, p)` and configuration-model
//! graphs built from Pareto or Weibull degree sequences.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Rewiring budget per edge used when the caller does not pick one.
pub const DEFAULT_REWIRE_FACTOR: usize = 100;

/// Heavy-tailed degree laws. Integer degrees are obtained by rounding a
/// continuous draw up, so `P(k) = S(k - 1) - S(k)` where `S` is the
/// survival function, renormalized over `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeDistribution {
    /// Pareto with unit scale, density `~ x^-gamma` for `x >= 1`.
    Pareto { gamma: f64, k_min: usize, k_max: usize },
    /// Weibull with shape `a` and scale `c`.
    Weibull { a: f64, c: f64, k_min: usize, k_max: usize },
}

impl DegreeDistribution {
    pub fn bounds(&self) -> (usize, usize) {
        match *self {
            Self::Pareto { k_min, k_max, .. } | Self::Weibull { k_min, k_max, .. } => (k_min, k_max),
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match *self {
            Self::Pareto { gamma, .. } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(1.0 - gamma)
                }
            }
            Self::Weibull { a, c, .. } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-(x / c).powf(a)).exp()
                }
            }
        }
    }

    /// Probability of integer degree `k` before truncation.
    pub fn raw_mass(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (self.survival(k as f64 - 1.0) - self.survival(k as f64)).max(0.0)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (k_min, k_max) = self.bounds();
        match *self {
            Self::Pareto { gamma, .. } if !(gamma > 1.0 && gamma.is_finite()) => {
                return Err(Error::InvalidParameter(format!("pareto exponent must exceed 1, got {gamma}")))
            }
            Self::Weibull { a, c, .. } if !(a > 0.0 && c > 0.0 && a.is_finite() && c.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "weibull shape and scale must be positive, got a={a} c={c}"
                )))
            }
            _ => {}
        }
        if k_min < 1 || k_min > k_max || k_max >= n {
            return Err(Error::InvalidParameter(format!(
                "degree bounds need 1 <= k_min <= k_max < n, got [{k_min}, {k_max}] with n={n}"
            )));
        }
        Ok(())
    }

    /// Mass of `[k_min, k_max]` before renormalization. The per-degree
    /// masses telescope, so nothing is allocated.
    pub fn support_mass(&self) -> f64 {
        let (k_min, k_max) = self.bounds();
        (self.survival(k_min as f64 - 1.0) - self.survival(k_max as f64)).max(0.0)
    }

    /// Fails when `[k_min, k_max]` carries no probability.
    pub fn check_support(&self) -> Result<()> {
        let (k_min, k_max) = self.bounds();
        if self.support_mass() > 0.0 {
            Ok(())
        } else {
            Err(Error::EmptySupport { k_min, k_max })
        }
    }

    /// Normalized probability mass over `[k_min, k_max]`.
    pub fn truncated_pmf(&self) -> Result<Vec<(usize, f64)>> {
        let (k_min, k_max) = self.bounds();
        let raw: Vec<(usize, f64)> = (k_min..=k_max).map(|k| (k, self.raw_mass(k))).collect();
        let total: f64 = raw.iter().map(|&(_, p)| p).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::EmptySupport { k_min, k_max });
        }
        Ok(raw.into_iter().map(|(k, p)| (k, p / total)).collect())
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(self.truncated_pmf()?.iter().map(|&(k, p)| k as f64 * p).sum())
    }
}

pub fn generate_er(n: usize, mean_degree: f64, seed: u64) -> Result<Graph> {
    if n < 2 || !(mean_degree > 0.0 && mean_degree < (n - 1) as f64) {
        return Err(Error::InvalidParameter(format!(
            "ER mean degree must lie in (0, n-1), got {mean_degree} with n={n}"
        )));
    }
    let p = mean_degree / (n - 1) as f64;
    let mut rng = seed::rng(seed::derive(seed, "er", 0));
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::with_capacity((mean_degree * n as f64 / 2.0 * 1.1) as usize);
    // Geometric skipping over the pairs (w, v), w < v, in row order.
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges.sort_unstable();
    Ok(Graph::from_canonical(n, edges))
}

pub fn sample_degree_sequence(dist: &DegreeDistribution, n: usize, seed: u64) -> Result<Vec<usize>> {
    dist.validate(n)?;
    let pmf = dist.truncated_pmf()?;
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &(_, p) in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seed::rng(seed::derive(seed, "degree-sequence", 0));
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(pmf.len() - 1);
            pmf[idx].0
        })
        .collect();

    if degrees.iter().sum::<usize>() % 2 == 1 {
        let (k_min, k_max) = dist.bounds();
        let raisable: Vec<usize> = (0..n).filter(|&v| degrees[v] < k_max).collect();
        if let Some(&v) = raisable.choose(&mut rng) {
            degrees[v] += 1;
        } else {
            let lowerable: Vec<usize> = (0..n).filter(|&v| degrees[v] > k_min).collect();
            let &v = lowerable
                .choose(&mut rng)
                .ok_or_else(|| Error::InvalidParameter("cannot make degree sum even within bounds".into()))?;
            degrees[v] -= 1;
        }
    }
    Ok(degrees)
}

/// Erdős–Gallai test.
pub fn is_graphical(degrees: &[usize]) -> bool {
    let n = degrees.len();
    if degrees.iter().sum::<usize>() % 2 == 1 || degrees.iter().any(|&d| d >= n) {
        return false;
    }
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let mut suffix = vec![0usize; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + d[i];
    }
    let mut lhs = 0;
    for k in 1..=n {
        lhs += d[k - 1];
        // Tail entries >= k contribute k each, the rest contribute themselves.
        let split = k + d[k..].partition_point(|&x| x >= k);
        let rhs = k * (k - 1) + k * (split - k) + suffix[split];
        if lhs > rhs {
            return false;
        }
    }
    true
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Simple graph with exactly the given degrees: random stub matching,
/// then degree-preserving double-edge swaps to remove self-loops and
/// repeated edges.
pub fn generate_configuration_model(
    degrees: &[usize],
    seed: u64,
    max_rewire_attempts: usize,
) -> Result<Graph> {
    let n = degrees.len();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        return Err(Error::InvalidParameter("degree sum is odd".into()));
    }
    if !is_graphical(degrees) {
        return Err(Error::NonGraphical);
    }
    let mut rng = seed::rng(seed::derive(seed, "configuration-model", 0));
    let mut stubs: Vec<usize> =
        degrees.iter().enumerate().flat_map(|(v, &d)| std::iter::repeat(v).take(d)).collect();
    stubs.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();

    let mut count: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.len());
    for &(a, b) in &edges {
        *count.entry(key(a, b)).or_default() += 1;
    }
    let is_bad =
        |count: &HashMap<(usize, usize), usize>, (a, b): (usize, usize)| a == b || count[&key(a, b)] > 1;
    let mut pending: Vec<usize> = (0..edges.len()).filter(|&i| is_bad(&count, edges[i])).collect();

    let mut attempts = 0;
    while let Some(&bad) = pending.last() {
        if !is_bad(&count, edges[bad]) {
            pending.pop();
            continue;
        }
        if attempts >= max_rewire_attempts || edges.len() < 2 {
            return Err(Error::RewireExhausted { attempts: max_rewire_attempts });
        }
        attempts += 1;
        let other = rng.gen_range(0..edges.len());
        if other == bad {
            continue;
        }
        let (u, v) = edges[bad];
        let (mut x, mut y) = edges[other];
        if rng.gen::<bool>() {
            std::mem::swap(&mut x, &mut y);
        }
        if u == x || v == y {
            continue;
        }
        let (new_a, new_b) = (key(u, x), key(v, y));
        let taken = |k: (usize, usize)| count.get(&k).copied().unwrap_or(0) > 0;
        if taken(new_a) || taken(new_b) {
            continue;
        }
        for old in [key(u, v), key(x, y)] {
            let c = count.get_mut(&old).unwrap();
            *c -= 1;
            if *c == 0 {
                count.remove(&old);
            }
        }
        *count.entry(new_a).or_default() += 1;
        *count.entry(new_b).or_default() += 1;
        edges[bad] = (u, x);
        edges[other] = (v, y);
        pending.pop();
        // Two self-loops can only be split into a doubled edge first.
        if new_a == new_b {
            pending.push(other);
        }
    }

    let mut canon: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| key(a, b)).collect();
    canon.sort_unstable();
    Ok(Graph::from_canonical(n, canon))
}
