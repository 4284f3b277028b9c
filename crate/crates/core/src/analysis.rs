//! Distributions extracted from walker states and the measurements taken on them.
//!
//! Every logarithm is natural, so entropies and divergences are in nats.

use std::collections::BTreeMap;

use crate::error::{Result, WalkError};
use crate::scalar::Real;
use crate::walk::{CoinMode, CoinSpec, InitialSpec, Walk, WalkerState, DEFAULT_STEP_CAP};

/// Reporting threshold below which a site counts as unoccupied.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;

/// `q` below this (absolute) is taken as zero by [`kl_divergence`].
pub const KL_ZERO: f64 = 1e-300;

/// A finite outcome space with one probability per key.
pub trait Outcomes<T: Real> {
    type Key: Ord + Copy;

    fn prob(&self, key: Self::Key) -> T;

    /// Stored (key, probability) pairs in key order.
    fn entries(&self) -> Vec<(Self::Key, T)>;
}

/// Probability per lattice position.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: BTreeMap<i64, T>,
}

impl<T: Real> Distribution<T> {
    /// Validates non-negativity and normalization (within [`Real::norm_tol`]).
    pub fn new(probs: BTreeMap<i64, T>) -> Result<Self> {
        Self::with_tolerance(probs, T::norm_tol())
    }

    pub fn with_tolerance(probs: BTreeMap<i64, T>, tol: T) -> Result<Self> {
        if let Some((n, p)) = probs.iter().find(|(_, p)| !(**p >= T::zero()) || !p.is_finite()) {
            return Err(WalkError::invalid(format!("probability at {n} is {p}")));
        }
        let total = probs.values().fold(T::zero(), |a, &b| a + b);
        if (total - T::one()).abs() > tol {
            return Err(WalkError::invalid(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Point mass at `position`.
    pub fn point(position: i64) -> Self {
        Self { probs: BTreeMap::from([(position, T::one())]) }
    }

    pub fn get(&self, position: i64) -> T {
        self.probs.get(&position).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.probs.iter().map(|(&n, &p)| (n, p))
    }

    pub fn as_map(&self) -> &BTreeMap<i64, T> {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Lowest and highest stored position.
    pub fn span(&self) -> Option<(i64, i64)> {
        Some((*self.probs.keys().next()?, *self.probs.keys().next_back()?))
    }

    /// Position of the largest probability (lowest position on ties).
    pub fn argmax(&self) -> Option<(i64, T)> {
        self.iter().fold(None, |best, (n, p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((n, p)),
        })
    }

    /// Largest entrywise absolute difference, over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let keys: std::collections::BTreeSet<i64> = self.probs.keys().chain(other.probs.keys()).copied().collect();
        keys.into_iter().map(|n| (self.get(n) - other.get(n)).abs()).fold(T::zero(), T::max)
    }
}

impl<T: Real> Outcomes<T> for Distribution<T> {
    type Key = i64;

    fn prob(&self, key: i64) -> T {
        self.get(key)
    }

    fn entries(&self) -> Vec<(i64, T)> {
        self.iter().collect()
    }
}

/// Coin-space marginal `(P_0, P_1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMarginal<T> {
    pub p0: T,
    pub p1: T,
}

impl<T: Real> Outcomes<T> for CoinMarginal<T> {
    type Key = u8;

    fn prob(&self, key: u8) -> T {
        match key {
            0 => self.p0,
            1 => self.p1,
            _ => T::zero(),
        }
    }

    fn entries(&self) -> Vec<(u8, T)> {
        vec![(0, self.p0), (1, self.p1)]
    }
}

/// KL divergence value; `Infinite` when `p` has mass where `q` has none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Divergence<T> {
    pub fn value(self) -> T {
        match self {
            Self::Finite(d) => d,
            Self::Infinite => T::infinity(),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

pub fn position_distribution<T: Real>(state: &WalkerState<T>) -> Distribution<T> {
    let mut probs: BTreeMap<i64, T> = state.iter().map(|(n, s)| (n, s.norm_sqr())).collect();
    let total = probs.values().fold(T::zero(), |a, &b| a + b);
    if total > T::zero() {
        probs.values_mut().for_each(|p| *p = *p / total);
    }
    Distribution { probs }
}

pub fn coin_marginal<T: Real>(state: &WalkerState<T>) -> CoinMarginal<T> {
    let (p0, p1) =
        state.iter().fold((T::zero(), T::zero()), |(p0, p1), (_, s)| (p0 + s.a0.norm_sqr(), p1 + s.a1.norm_sqr()));
    let total = p0 + p1;
    CoinMarginal { p0: p0 / total, p1: p1 / total }
}

/// `−Σ p ln p`, with `0 ln 0 = 0`.
pub fn shannon_entropy<T: Real, P: Outcomes<T>>(dist: &P) -> T {
    dist.entries().into_iter().filter(|&(_, p)| p > T::zero()).fold(T::zero(), |acc, (_, p)| acc - p * p.ln())
}

/// `Σ_{p>0} p ln(p/q)`.
pub fn kl_divergence<T: Real, P: Outcomes<T>>(p: &P, q: &P) -> Divergence<T> {
    let zero_cut = T::lit(KL_ZERO);
    let mut d = T::zero();
    for (k, pk) in p.entries() {
        if pk <= T::zero() {
            continue;
        }
        let qk = q.prob(k);
        if qk <= T::zero() || qk < zero_cut {
            return Divergence::Infinite;
        }
        d = d + pk * (pk / qk).ln();
    }
    Divergence::Finite(d)
}

/// KL divergence against `q` mixed with `epsilon` mass on every key of either support.
///
/// Always finite for `epsilon > 0`; meant for plotting, not for measurement.
pub fn kl_divergence_smoothed<T: Real, P: Outcomes<T>>(p: &P, q: &P, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(WalkError::invalid("smoothing epsilon must be positive"));
    }
    let mut keys: Vec<P::Key> = p.entries().into_iter().chain(q.entries()).map(|(k, _)| k).collect();
    keys.sort();
    keys.dedup();
    let norm = T::one() + epsilon * T::from_int(keys.len() as i64);
    Ok(keys.into_iter().fold(T::zero(), |acc, k| {
        let pk = p.prob(k);
        if pk > T::zero() {
            acc + pk * (pk / ((q.prob(k) + epsilon) / norm)).ln()
        } else {
            acc
        }
    }))
}

/// `(Σ √(p q))²`.
pub fn fidelity<T: Real, P: Outcomes<T>>(p: &P, q: &P) -> T {
    let overlap = p.entries().into_iter().map(|(k, pk)| (pk * q.prob(k)).sqrt()).fold(T::zero(), |a, b| a + b);
    (overlap * overlap).min(T::one())
}

/// Number of positions with probability at least `threshold` (and nonzero).
pub fn support_count<T: Real>(dist: &Distribution<T>, threshold: T) -> Result<usize> {
    if !(threshold >= T::zero()) {
        return Err(WalkError::invalid(format!("support threshold must be non-negative, got {threshold}")));
    }
    Ok(dist.iter().filter(|&(_, p)| p > T::zero() && p >= threshold).count())
}

/// Position moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub mean: T,
    pub variance: T,
    pub stddev: T,
    /// Second moment about the origin, `⟨x²⟩`.
    pub mean_square: T,
}

pub fn moments<T: Real>(dist: &Distribution<T>) -> Moments<T> {
    let mean = dist.iter().fold(T::zero(), |a, (n, p)| a + p * T::from_int(n));
    let (variance, mean_square) = dist.iter().fold((T::zero(), T::zero()), |(v, m2), (n, p)| {
        let x = T::from_int(n);
        (v + p * (x - mean) * (x - mean), m2 + p * x * x)
    });
    let variance = variance.max(T::zero());
    Moments { mean, variance, stddev: variance.sqrt(), mean_square }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRecord<T> {
    pub step: usize,
    pub position: T,
    pub coin: T,
}

pub type EntropySeries<T> = Vec<EntropyRecord<T>>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRecord<T> {
    pub step: usize,
    pub position: Divergence<T>,
    pub coin: Divergence<T>,
}

pub type DivergenceSeries<T> = Vec<DivergenceRecord<T>>;

fn check_series_len(max_steps: usize) -> Result<()> {
    if max_steps == 0 {
        return Err(WalkError::invalid("series needs at least one step"));
    }
    if max_steps > DEFAULT_STEP_CAP {
        return Err(WalkError::StepCap { requested: max_steps, cap: DEFAULT_STEP_CAP });
    }
    Ok(())
}

/// `S_P` and `S_C` for steps `0..=max_steps`.
pub fn entropy_series<T: Real>(
    init: &InitialSpec<T>,
    spec: &CoinSpec<T>,
    max_steps: usize,
) -> Result<EntropySeries<T>> {
    check_series_len(max_steps)?;
    Ok(Walk::new(init, spec)?
        .take(max_steps + 1)
        .map(|s| EntropyRecord {
            step: s.step(),
            position: shannon_entropy(&position_distribution(&s)),
            coin: shannon_entropy(&coin_marginal(&s)),
        })
        .collect())
}

/// `D_P` and `D_C` of the step-dependent walk against the step-independent one, steps `0..=max_steps`.
pub fn divergence_series<T: Real>(init: &InitialSpec<T>, theta: T, max_steps: usize) -> Result<DivergenceSeries<T>> {
    check_series_len(max_steps)?;
    let sdc = Walk::new(init, &CoinSpec::new(theta, CoinMode::StepDependent))?;
    let sic = Walk::new(init, &CoinSpec::new(theta, CoinMode::StepIndependent))?;
    Ok(sdc
        .zip(sic)
        .take(max_steps + 1)
        .map(|(p, q)| DivergenceRecord {
            step: p.step(),
            position: kl_divergence(&position_distribution(&p), &position_distribution(&q)),
            coin: kl_divergence(&coin_marginal(&p), &coin_marginal(&q)),
        })
        .collect())
}
