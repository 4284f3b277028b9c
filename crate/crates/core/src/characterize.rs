//! Gaussian fits, walk classification and the `θ' = θ(1 + j/10)` sweep.
//!
//! The class boundaries are explicit rules over measured features (support
//! per step, peak structure, support growth), all thresholds in
//! [`ClassifierConfig`]. The decision order is:
//!
//! 1. one site at every step: free if the site drifts monotonically, bounded otherwise;
//! 2. support never above `splitting_max_support` and unit-probability steps recur: periodic splitting;
//! 3. exactly one prominent peak at the horizon: compact classical if the support count
//!    stopped growing by half the horizon, classical otherwise;
//! 4. global maximum within `center_window` sites of the origin with at least
//!    `min_secondary_peaks` other peaks: semi-classical/quantum;
//! 5. anything else: quantum like.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{position_distribution, support_count, Distribution, SUPPORT_THRESHOLD};
use crate::error::{Result, WalkError};
use crate::scalar::Real;
use crate::walk::{evolve, CoinSpec, InitialSpec, Walk};

/// Normal density `exp(−(x−μ)²/2σ²) / √(2πσ²)`.
pub fn gaussian_pdf<T: Real>(x: T, mu: T, sigma: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(WalkError::invalid(format!("standard deviation must be positive, got {sigma}")));
    }
    let var = sigma * sigma;
    let d = x - mu;
    Ok((-(d * d) / (T::lit(2.0) * var)).exp() / (T::lit(2.0) * T::PI() * var).sqrt())
}

/// Coordinate system a fit is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitFrame {
    /// Raw lattice positions `n`.
    Position,
    /// 1-based index `k = (n + T)/2 + 1` over the sites reachable at step `T`,
    /// i.e. unit spacing between neighbouring occupied sites.
    Sites { step: usize },
}

impl FitFrame {
    fn coordinate<T: Real>(self, n: i64) -> Result<T> {
        match self {
            Self::Position => Ok(T::from_int(n)),
            Self::Sites { step } => {
                let t = step as i64;
                if n.abs() > t || (n + t).rem_euclid(2) != 0 {
                    return Err(WalkError::invalid(format!("position {n} is not on the step-{step} lattice")));
                }
                Ok(T::from_int((n + t) / 2 + 1))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit<T> {
    pub mu: T,
    pub sigma: T,
    /// RMS gap between the fitted pdf (renormalized over the occupied sites) and the data.
    pub residual: T,
}

/// Moment-matched Gaussian over the occupied sites of `dist`.
pub fn fit_gaussian<T: Real>(dist: &Distribution<T>, frame: FitFrame) -> Result<GaussianFit<T>> {
    let points: Vec<(T, T)> = dist
        .iter()
        .filter(|&(_, p)| p > T::zero())
        .map(|(n, p)| frame.coordinate(n).map(|x| (x, p)))
        .collect::<Result<_>>()?;
    if points.len() < 2 {
        return Err(WalkError::DegenerateFit(format!("{} occupied site(s), need at least 2", points.len())));
    }
    let mu = points.iter().fold(T::zero(), |a, &(x, p)| a + p * x);
    let var = points.iter().fold(T::zero(), |a, &(x, p)| a + p * (x - mu) * (x - mu));
    let sigma = var.sqrt();
    if !(sigma > T::zero()) {
        return Err(WalkError::DegenerateFit("zero spread".into()));
    }
    let model: Vec<T> = points.iter().map(|&(x, _)| gaussian_pdf(x, mu, sigma)).collect::<Result<_>>()?;
    let total = model.iter().fold(T::zero(), |a, &b| a + b);
    let sq = points.iter().zip(&model).fold(T::zero(), |a, (&(_, p), &g)| a + (g / total - p) * (g / total - p));
    Ok(GaussianFit { mu, sigma, residual: (sq / T::from_int(points.len() as i64)).sqrt() })
}

/// Distribution classes, one per row of the classification table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WalkClass {
    LocalizedFree,
    LocalizedBounded,
    LocalizedPeriodicSplitting,
    CompactClassical,
    Classical,
    SemiClassicalQuantum,
    QuantumLike,
}

impl WalkClass {
    pub fn label(self) -> &'static str {
        match self {
            Self::LocalizedFree => "Localized: free",
            Self::LocalizedBounded => "Localized: bounded",
            Self::LocalizedPeriodicSplitting => "Localized: bounded with periodic splitting",
            Self::CompactClassical => "Compact classical like",
            Self::Classical => "Classical like",
            Self::SemiClassicalQuantum => "Semi-classical/quantum like",
            Self::QuantumLike => "Quantum like",
        }
    }
}

impl fmt::Display for WalkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Reference angles (as multiples of π) with their expected classes.
pub const TABLE_ONE: [(&str, f64, WalkClass); 9] = [
    ("0", 0.0, WalkClass::LocalizedFree),
    ("pi/2", 0.5, WalkClass::LocalizedBounded),
    ("pi/4", 0.25, WalkClass::LocalizedPeriodicSplitting),
    ("pi/6", 1.0 / 6.0, WalkClass::LocalizedPeriodicSplitting),
    ("pi/12", 1.0 / 12.0, WalkClass::CompactClassical),
    ("3.59pi/5", 3.59 / 5.0, WalkClass::Classical),
    ("pi/5", 0.2, WalkClass::SemiClassicalQuantum),
    ("2pi/5", 0.4, WalkClass::SemiClassicalQuantum),
    ("pi/3", 1.0 / 3.0, WalkClass::QuantumLike),
];

pub const DEFAULT_HORIZON: usize = 30;
pub const MIN_HORIZON: usize = 12;

/// Thresholds of the classification rules. Every key is optional in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Probability at or above which a site counts as occupied.
    pub support_threshold: f64,
    /// Largest support a periodically splitting walk may reach.
    pub splitting_max_support: usize,
    /// Minimum prominence of a local maximum to count as a peak.
    pub peak_prominence: f64,
    /// Distance from the origin, in lattice sites (2 positions each), that still counts as central.
    pub center_window: usize,
    /// Peaks besides the global maximum needed for the semi-classical class.
    pub min_secondary_peaks: usize,
    /// Optional cap on the site-frame Gaussian residual for the classical classes.
    pub gaussian_residual_max: Option<f64>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            support_threshold: SUPPORT_THRESHOLD,
            splitting_max_support: 3,
            peak_prominence: 0.02,
            center_window: 1,
            min_secondary_peaks: 2,
            gaussian_residual_max: None,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.support_threshold)
            || !ok(self.peak_prominence)
            || self.gaussian_residual_max.is_some_and(|r| !ok(r))
        {
            return Err(WalkError::invalid("classifier thresholds must be finite and non-negative"));
        }
        Ok(())
    }
}

/// A local maximum and its topographic prominence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub index: usize,
    pub value: T,
    pub prominence: T,
}

/// Local maxima of `values` (zero-padded at both ends) with prominence of at least `min_prominence`.
pub fn find_peaks<T: Real>(values: &[T], min_prominence: T) -> Vec<Peak<T>> {
    let at = |i: isize| if i < 0 || i as usize >= values.len() { T::zero() } else { values[i as usize] };
    let mut peaks = Vec::new();
    let mut i = 0usize;
    while i < values.len() {
        let v = values[i];
        // plateaus count once, at their left end
        let mut end = i;
        while end + 1 < values.len() && values[end + 1] == v {
            end += 1;
        }
        if v > at(i as isize - 1) && v > at(end as isize + 1) {
            let mut left_min = v;
            let mut k = i as isize - 1;
            loop {
                let w = at(k);
                left_min = left_min.min(w);
                if k < 0 || w > v {
                    break;
                }
                k -= 1;
            }
            let mut right_min = v;
            let mut k = end as isize + 1;
            loop {
                let w = at(k);
                right_min = right_min.min(w);
                if k as usize >= values.len() || w > v {
                    break;
                }
                k += 1;
            }
            let prominence = v - left_min.max(right_min);
            if prominence >= min_prominence {
                peaks.push(Peak { index: i, value: v, prominence });
            }
        }
        i = end + 1;
    }
    peaks
}

/// Measured features the decision rules run on.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkFeatures {
    pub horizon: usize,
    /// Occupied-site count per step, `0..=horizon`.
    pub support: Vec<usize>,
    /// Peak positions at the horizon.
    pub peak_positions: Vec<i64>,
    /// Position of the global maximum at the horizon.
    pub argmax: i64,
    pub fit: Option<GaussianFit<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub theta: f64,
    pub class: WalkClass,
    pub features: WalkFeatures,
}

/// Classifies the step-dependent walk from `|0⟩_C ⊗ |0⟩_P` with default thresholds.
pub fn classify(theta: f64, horizon: usize) -> Result<WalkClass> {
    Ok(classify_with(theta, horizon, &ClassifierConfig::default())?.class)
}

pub fn classify_with(theta: f64, horizon: usize, config: &ClassifierConfig) -> Result<Classification> {
    config.validate()?;
    if horizon < MIN_HORIZON {
        return Err(WalkError::invalid(format!("classification horizon must be at least {MIN_HORIZON}")));
    }
    let spec = CoinSpec::step_dependent(theta);
    let mut support = Vec::with_capacity(horizon + 1);
    let mut single_sites = Vec::new();
    let mut last = Distribution::point(0);
    for state in Walk::new(&InitialSpec::zero(), &spec)?.take(horizon + 1) {
        let d = position_distribution(&state);
        let n = support_count(&d, config.support_threshold)?;
        if n == 1 {
            single_sites.push(d.argmax().expect("nonempty").0);
        }
        support.push(n);
        last = d;
    }

    let h = horizon as i64;
    let lattice: Vec<f64> = (-h..=h).step_by(2).map(|n| last.get(n)).collect();
    let peaks = find_peaks(&lattice, config.peak_prominence);
    let peak_positions: Vec<i64> = peaks.iter().map(|p| -h + 2 * p.index as i64).collect();
    let argmax = last.argmax().expect("nonempty").0;
    let fit = fit_gaussian(&last, FitFrame::Sites { step: horizon }).ok();
    let features = WalkFeatures { horizon, support: support.clone(), peak_positions, argmax, fit };
    let done = |class| Ok(Classification { theta, class, features: features.clone() });

    if support.iter().all(|&n| n == 1) {
        let steps: Vec<i64> = single_sites.windows(2).map(|w| w[1] - w[0]).collect();
        let monotone = steps.iter().all(|&d| d > 0) || steps.iter().all(|&d| d < 0);
        return done(if monotone { WalkClass::LocalizedFree } else { WalkClass::LocalizedBounded });
    }

    let max_support = *support.iter().max().expect("nonempty");
    let relocalizations = support.iter().skip(1).filter(|&&n| n == 1).count();
    if max_support <= config.splitting_max_support && relocalizations >= 2 {
        return done(WalkClass::LocalizedPeriodicSplitting);
    }

    let residual_ok = match (config.gaussian_residual_max, fit) {
        (None, _) => true,
        (Some(cap), Some(f)) => f.residual < cap,
        (Some(_), None) => false,
    };
    if peaks.len() == 1 && residual_ok {
        let early = *support[..=horizon / 2].iter().max().expect("nonempty");
        return done(if early >= max_support { WalkClass::CompactClassical } else { WalkClass::Classical });
    }

    if argmax.unsigned_abs() <= 2 * config.center_window as u64 && peaks.len() > config.min_secondary_peaks {
        return done(WalkClass::SemiClassicalQuantum);
    }
    done(WalkClass::QuantumLike)
}

/// `θ(1 + j/10)`.
pub fn sweep_angle<T: Real>(theta_base: T, j: u32) -> Result<T> {
    if j > 10 {
        return Err(WalkError::invalid(format!("sweep index j must lie in 0..=10, got {j}")));
    }
    Ok(theta_base * (T::one() + T::from_int(j as i64) / T::lit(10.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub j: u32,
    pub theta: f64,
    pub distribution: Distribution<f64>,
    pub class: WalkClass,
}

/// Distribution after `steps` and class (at the default horizon) for `θ' = θ(1 + j/10)`.
pub fn sweep(theta_base: f64, j: u32, steps: usize) -> Result<SweepPoint> {
    sweep_with(theta_base, j, steps, &ClassifierConfig::default())
}

pub fn sweep_with(theta_base: f64, j: u32, steps: usize, config: &ClassifierConfig) -> Result<SweepPoint> {
    let theta = sweep_angle(theta_base, j)?;
    let state = evolve(&InitialSpec::zero(), &CoinSpec::step_dependent(theta), steps)?;
    let class = classify_with(theta, DEFAULT_HORIZON.max(steps), config)?.class;
    Ok(SweepPoint { j, theta, distribution: position_distribution(&state), class })
}

/// Discretized normal distribution on `positions`, renormalized; test and demo helper.
pub fn discretized_gaussian(
    positions: impl IntoIterator<Item = i64>,
    mu: f64,
    sigma: f64,
) -> Result<Distribution<f64>> {
    let raw: BTreeMap<i64, f64> =
        positions.into_iter().map(|n| gaussian_pdf(n as f64, mu, sigma).map(|p| (n, p))).collect::<Result<_>>()?;
    let total: f64 = raw.values().sum();
    Distribution::new(raw.into_iter().map(|(n, p)| (n, p / total)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, PI};

    #[test]
    fn pdf_values() {
        let (mu, sigma) = (1.5, 0.7);
        let peak = 1.0 / (2.0 * PI * sigma * sigma).sqrt();
        assert!((gaussian_pdf(mu, mu, sigma).unwrap() - peak).abs() < 1e-15);
        for x in [mu - sigma, mu + sigma] {
            assert!((gaussian_pdf(x, mu, sigma).unwrap() - peak * (-0.5f64).exp()).abs() < 1e-15);
        }
        assert!(gaussian_pdf(0.0, 0.0, 0.0).is_err());
        assert!(gaussian_pdf(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        // composite Simpson over μ ± 12σ
        let (mu, sigma) = (0.3, 1.7);
        let (a, b, n) = (mu - 12.0 * sigma, mu + 12.0 * sigma, 20_000);
        let hstep = (b - a) / n as f64;
        let f = |x: f64| gaussian_pdf(x, mu, sigma).unwrap();
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * hstep / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fit_recovers_discretized_gaussian() {
        let d = discretized_gaussian(-10..=10, 0.0, 2.0).unwrap();
        let fit = fit_gaussian(&d, FitFrame::Position).unwrap();
        assert!(fit.mu.abs() < 0.01);
        assert!((fit.sigma - 2.0).abs() < 0.02);
        assert!(fit.residual < 1e-3);
    }

    #[test]
    fn fit_rejects_point_mass() {
        assert!(matches!(
            fit_gaussian(&Distribution::<f64>::point(4), FitFrame::Position),
            Err(WalkError::DegenerateFit(_))
        ));
    }

    #[test]
    fn site_frame_rejects_off_lattice_positions() {
        let d = Distribution::new(BTreeMap::from([(0, 0.5), (1, 0.5)])).unwrap();
        assert!(fit_gaussian(&d, FitFrame::Sites { step: 2 }).is_err());
    }

    #[test]
    fn pi_over_12_fit_at_step_6() {
        let d = position_distribution(&evolve(&InitialSpec::zero(), &CoinSpec::step_dependent(PI / 12.0), 6).unwrap());
        let fit = fit_gaussian(&d, FitFrame::Sites { step: 6 }).unwrap();
        assert!((fit.mu - 5.0).abs() < 0.15, "{fit:?}");
        assert!((fit.sigma - 0.5).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn peaks() {
        let v = [0.0_f64, 0.1, 0.5, 0.1, 0.3, 0.29, 0.0];
        let p = find_peaks(&v, 0.02);
        assert_eq!(p.iter().map(|p| p.index).collect::<Vec<_>>(), vec![2, 4]);
        assert!((p[0].prominence - 0.5).abs() < 1e-15);
        assert!((p[1].prominence - 0.2).abs() < 1e-15);
        // plateau counted once; edge peak against zero padding
        assert_eq!(find_peaks(&[0.4, 0.4, 0.1], 0.02).len(), 1);
        assert_eq!(find_peaks(&[0.1, 0.11, 0.1], 0.02).len(), 1);
        let small = find_peaks(&[0.5, 0.1, 0.11, 0.1, 0.5], 0.02);
        assert_eq!(small.iter().map(|p| p.index).collect::<Vec<_>>(), vec![0, 4]);
    }

    #[test]
    fn table_rows() {
        for (name, k, class) in TABLE_ONE {
            assert_eq!(classify(k * PI, DEFAULT_HORIZON).unwrap(), class, "θ = {name}");
        }
    }

    #[test]
    fn mirror_angles_share_class() {
        for k in 0..=30 {
            let theta = k as f64 * PI / 30.0;
            assert_eq!(classify(theta, 20).unwrap(), classify(PI - theta, 20).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn short_horizon_rejected() {
        assert!(classify(0.3, 11).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = ClassifierConfig { peak_prominence: -1.0, ..Default::default() };
        assert!(classify_with(0.3, 20, &bad).is_err());
        let bad = ClassifierConfig { gaussian_residual_max: Some(f64::NAN), ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sweep_fixtures() {
        assert!(sweep_angle(1.0, 11).is_err());
        assert!((sweep_angle(FRAC_PI_3, 5).unwrap() - PI / 2.0).abs() < 1e-15);
        let j0 = sweep(FRAC_PI_3, 0, 12).unwrap();
        let j10 = sweep(FRAC_PI_3, 10, 12).unwrap();
        assert!(j0.distribution.max_abs_diff(&j10.distribution) < 1e-10);
        assert_eq!(j0.class, j10.class);
        let a = sweep(FRAC_PI_3, 2, 12).unwrap();
        let b = sweep(FRAC_PI_3, 8, 12).unwrap();
        assert!(a.distribution.max_abs_diff(&b.distribution) < 1e-10);
        // j = 5 is θ' = π/2: a single site, at −1 on odd steps
        let p = sweep(FRAC_PI_3, 5, 7).unwrap();
        assert_eq!(support_count(&p.distribution, SUPPORT_THRESHOLD).unwrap(), 1);
        assert!((p.distribution.get(-1) - 1.0).abs() < 1e-12);
    }
}
