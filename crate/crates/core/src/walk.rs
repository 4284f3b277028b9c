//! Pure-state evolution of the coined walk on the integer line.
//!
//! The walker lives in coin ⊗ position space. One step applies the coin
//! `C(α) = [[cos α, sin α], [sin α, −cos α]]` to every site's spinor and then
//! the conditional shift, moving the coin-0 component one site right and the
//! coin-1 component one site left. With a step-dependent coin the transition
//! into step `T` uses `α = T·θ`; a step-independent coin uses `α = θ` always.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::scalar::{real, Cx, Real};

/// Default cap on the number of steps a single evolution may run.
pub const DEFAULT_STEP_CAP: usize = 10_000;

/// Amplitude components with magnitude below this are dropped after each step.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinMode {
    /// Rotation angle `T·θ` on step `T`.
    #[serde(rename = "sdc")]
    StepDependent,
    /// Rotation angle `θ` on every step.
    #[serde(rename = "sic")]
    StepIndependent,
}

impl CoinMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::StepDependent => "sdc",
            Self::StepIndependent => "sic",
        }
    }
}

impl fmt::Display for CoinMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rotation angle plus coin mode. The angle is stored as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpec<T> {
    pub theta: T,
    pub mode: CoinMode,
}

impl<T: Real> CoinSpec<T> {
    pub fn new(theta: T, mode: CoinMode) -> Self {
        Self { theta, mode }
    }

    pub fn step_dependent(theta: T) -> Self {
        Self::new(theta, CoinMode::StepDependent)
    }

    pub fn step_independent(theta: T) -> Self {
        Self::new(theta, CoinMode::StepIndependent)
    }

    /// The Hadamard coin: step-independent at `θ = π/4`.
    pub fn hadamard() -> Self {
        Self::step_independent(T::FRAC_PI_4())
    }

    /// Same angle, the other mode.
    pub fn with_mode(self, mode: CoinMode) -> Self {
        Self { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.is_finite() {
            Ok(())
        } else {
            Err(WalkError::invalid(format!("rotation angle must be finite, got {}", self.theta)))
        }
    }

    /// Angle of the coin applied on the transition into `step` (1-based).
    pub fn effective_angle(&self, step: usize) -> T {
        match self.mode {
            CoinMode::StepDependent => T::from_int(step as i64) * self.theta,
            CoinMode::StepIndependent => self.theta,
        }
    }
}

/// Two-component coin-space coefficient at one lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor<T> {
    pub a0: Cx<T>,
    pub a1: Cx<T>,
}

impl<T: Real> Spinor<T> {
    pub fn new(a0: Cx<T>, a1: Cx<T>) -> Self {
        Self { a0, a1 }
    }

    pub fn norm_sqr(&self) -> T {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    pub fn is_zero(&self) -> bool {
        self.a0.norm_sqr() == T::zero() && self.a1.norm_sqr() == T::zero()
    }

    /// Hermitian inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Cx<T> {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    pub fn scale(&self, k: Cx<T>) -> Self {
        Self::new(self.a0 * k, self.a1 * k)
    }
}

/// A 2×2 coin operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix<T> {
    pub c00: Cx<T>,
    pub c01: Cx<T>,
    pub c10: Cx<T>,
    pub c11: Cx<T>,
}

impl<T: Real> CoinMatrix<T> {
    /// `[[cos α, sin α], [sin α, −cos α]]`.
    pub fn rotation(alpha: T) -> Self {
        let (s, c) = alpha.sin_cos();
        Self { c00: real(c), c01: real(s), c10: real(s), c11: real(-c) }
    }

    pub fn identity() -> Self {
        Self { c00: real(T::one()), c01: real(T::zero()), c10: real(T::zero()), c11: real(T::one()) }
    }

    pub fn apply(&self, s: &Spinor<T>) -> Spinor<T> {
        Spinor::new(self.c00 * s.a0 + self.c01 * s.a1, self.c10 * s.a0 + self.c11 * s.a1)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            c00: self.c00 * rhs.c00 + self.c01 * rhs.c10,
            c01: self.c00 * rhs.c01 + self.c01 * rhs.c11,
            c10: self.c10 * rhs.c00 + self.c11 * rhs.c10,
            c11: self.c10 * rhs.c01 + self.c11 * rhs.c11,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self { c00: self.c00.conj(), c01: self.c10.conj(), c10: self.c01.conj(), c11: self.c11.conj() }
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        [self.c00 - other.c00, self.c01 - other.c01, self.c10 - other.c10, self.c11 - other.c11]
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.adjoint().mul(self).max_abs_diff(&Self::identity()) <= tol
    }
}

/// Normalized initial coin state `a|0⟩ + b|1⟩` placed at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialSpec<T> {
    pub a: Cx<T>,
    pub b: Cx<T>,
}

impl<T: Real> InitialSpec<T> {
    pub fn new(a: Cx<T>, b: Cx<T>) -> Self {
        Self { a, b }
    }

    /// `|0⟩_C`.
    pub fn zero() -> Self {
        Self::new(real(T::one()), real(T::zero()))
    }

    /// `|1⟩_C`.
    pub fn one() -> Self {
        Self::new(real(T::zero()), real(T::one()))
    }

    /// `(|0⟩ + i|1⟩)/√2`.
    pub fn plus_i() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::new(real(h), Cx::new(T::zero(), h))
    }

    pub fn norm_sqr(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr()
    }
}

/// Which basis coin state the walk starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisStart {
    Zero,
    One,
}

impl<T: Real> From<BasisStart> for InitialSpec<T> {
    fn from(b: BasisStart) -> Self {
        match b {
            BasisStart::Zero => Self::zero(),
            BasisStart::One => Self::one(),
        }
    }
}

/// Sparse walker state after `step` applications of the walk operator.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState<T> {
    step: usize,
    amplitudes: BTreeMap<i64, Spinor<T>>,
}

impl<T: Real> WalkerState<T> {
    /// Builds a state from raw parts. No invariant is checked; see [`Self::check_invariants`].
    pub fn from_parts(step: usize, amplitudes: BTreeMap<i64, Spinor<T>>) -> Self {
        Self { step, amplitudes }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn amplitudes(&self) -> &BTreeMap<i64, Spinor<T>> {
        &self.amplitudes
    }

    /// Spinor at `position`, zero if unoccupied.
    pub fn spinor(&self, position: i64) -> Spinor<T> {
        self.amplitudes.get(&position).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Spinor<T>)> + '_ {
        self.amplitudes.iter().map(|(&n, s)| (n, s))
    }

    /// Number of positions with a stored (non-pruned) amplitude.
    pub fn occupied(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.values().fold(T::zero(), |acc, s| acc + s.norm_sqr())
    }

    /// Every occupied position, in increasing order.
    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.amplitudes.keys().copied()
    }

    /// Checks norm, support, parity and occupancy invariants.
    pub fn check_invariants(&self, norm_tol: T) -> Result<()> {
        let err = (self.norm_sqr() - T::one()).abs();
        if err > norm_tol {
            return Err(WalkError::invalid(format!("norm deviates from 1 by {err}")));
        }
        let t = self.step as i64;
        for n in self.positions() {
            if n.abs() > t {
                return Err(WalkError::invalid(format!("position {n} outside [-{t}, {t}]")));
            }
            if (n - t).rem_euclid(2) != 0 {
                return Err(WalkError::invalid(format!("position {n} has wrong parity at step {t}")));
            }
        }
        if self.occupied() > self.step + 1 {
            return Err(WalkError::invalid(format!(
                "{} occupied positions exceed step + 1 = {}",
                self.occupied(),
                self.step + 1
            )));
        }
        Ok(())
    }

    /// Applies coin then shift in place.
    pub fn advance(&mut self, coin: &CoinMatrix<T>) {
        let cut = T::lit(PRUNE_THRESHOLD);
        let mut next: BTreeMap<i64, Spinor<T>> = BTreeMap::new();
        for (&n, s) in &self.amplitudes {
            let c = coin.apply(s);
            let right = next.entry(n + 1).or_default();
            right.a0 = right.a0 + c.a0;
            let left = next.entry(n - 1).or_default();
            left.a1 = left.a1 + c.a1;
        }
        next.retain(|_, s| {
            if s.a0.norm() < cut {
                s.a0 = real(T::zero());
            }
            if s.a1.norm() < cut {
                s.a1 = real(T::zero());
            }
            !s.is_zero()
        });
        self.amplitudes = next;
        self.step += 1;
    }
}

/// Coin matrix applied on the transition into `step` (≥ 1).
pub fn build_coin<T: Real>(spec: &CoinSpec<T>, step: usize) -> Result<CoinMatrix<T>> {
    spec.validate()?;
    if step == 0 {
        return Err(WalkError::invalid("coin step index starts at 1"));
    }
    Ok(CoinMatrix::rotation(spec.effective_angle(step)))
}

/// Walker at the origin with coin state `(a, b)`, renormalized.
pub fn initial_state<T: Real>(init: &InitialSpec<T>) -> Result<WalkerState<T>> {
    let n2 = init.norm_sqr();
    if !n2.is_finite() || n2 <= T::zero() {
        return Err(WalkError::invalid("initial coin state has zero norm"));
    }
    if (n2 - T::one()).abs() > T::input_tol() {
        return Err(WalkError::invalid(format!("initial coin state is not normalized: |a|²+|b|² = {n2}")));
    }
    let k = real(T::one() / n2.sqrt());
    let mut amplitudes = BTreeMap::new();
    amplitudes.insert(0, Spinor::new(init.a * k, init.b * k));
    Ok(WalkerState { step: 0, amplitudes })
}

/// One application of `U = S·C(step + 1)`.
pub fn apply_step<T: Real>(state: &WalkerState<T>, spec: &CoinSpec<T>) -> Result<WalkerState<T>> {
    let coin = build_coin(spec, state.step + 1)?;
    let mut next = state.clone();
    next.advance(&coin);
    Ok(next)
}

/// State after `steps` applications, refusing more than [`DEFAULT_STEP_CAP`] steps.
pub fn evolve<T: Real>(init: &InitialSpec<T>, spec: &CoinSpec<T>, steps: usize) -> Result<WalkerState<T>> {
    evolve_capped(init, spec, steps, DEFAULT_STEP_CAP)
}

pub fn evolve_capped<T: Real>(
    init: &InitialSpec<T>,
    spec: &CoinSpec<T>,
    steps: usize,
    cap: usize,
) -> Result<WalkerState<T>> {
    if steps > cap {
        return Err(WalkError::StepCap { requested: steps, cap });
    }
    let mut walk = Walk::new(init, spec)?;
    Ok(walk.nth(steps).expect("walk iterator is unbounded"))
}

/// Unbounded iterator over successive walker states, starting with step 0.
#[derive(Debug, Clone)]
pub struct Walk<T> {
    spec: CoinSpec<T>,
    state: WalkerState<T>,
    started: bool,
}

impl<T: Real> Walk<T> {
    pub fn new(init: &InitialSpec<T>, spec: &CoinSpec<T>) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec: *spec, state: initial_state(init)?, started: false })
    }

    pub fn spec(&self) -> &CoinSpec<T> {
        &self.spec
    }
}

impl<T: Real> Iterator for Walk<T> {
    type Item = WalkerState<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.started {
            let coin = CoinMatrix::rotation(self.spec.effective_angle(self.state.step + 1));
            self.state.advance(&coin);
        }
        self.started = true;
        Some(self.state.clone())
    }
}

/// Closed-form coefficients at `+T` and `−T` for a step-dependent walk from a basis state.
///
/// From `|0⟩`: `+T` carries `∏_{n=1}^{T} cos nθ` on coin 0 and `−T` carries
/// `(−1)^{T+1} sin θ ∏_{n=2}^{T} cos nθ` on coin 1. From `|1⟩`: `+T` carries
/// `sin θ ∏_{n=2}^{T} cos nθ` and `−T` carries `(−1)^T ∏_{n=1}^{T} cos nθ`.
/// The `n = 2..T` products equal the `1/cos θ` form wherever that is defined
/// and stay finite at `θ = π/2`.
pub fn endpoint_amplitudes<T: Real>(spec: &CoinSpec<T>, steps: usize, start: BasisStart) -> Result<(Cx<T>, Cx<T>)> {
    spec.validate()?;
    if spec.mode != CoinMode::StepDependent {
        return Err(WalkError::invalid("closed-form endpoints apply to the step-dependent coin"));
    }
    if steps == 0 {
        return Err(WalkError::invalid("closed-form endpoints need at least one step"));
    }
    let theta = spec.theta;
    let tail: T = (2..=steps).map(|n| (T::from_int(n as i64) * theta).cos()).fold(T::one(), |a, b| a * b);
    let full = theta.cos() * tail;
    let split = theta.sin() * tail;
    let sign = |odd: bool| if odd { -T::one() } else { T::one() };
    Ok(match start {
        BasisStart::Zero => (real(full), real(sign(steps.is_multiple_of(2)) * split)),
        BasisStart::One => (real(split), real(sign(steps % 2 == 1) * full)),
    })
}
