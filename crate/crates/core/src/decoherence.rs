//! Density-matrix walk with per-step projective decoherence.
//!
//! Each step maps `ρ ↦ (1−q−s)·UρU† + q·Σ_c P_c UρU† P_c + s·Σ_n P_n UρU† P_n`
//! where `P_c` projects on coin state `c` and `P_n` on site `n`. The single
//! projector symbols of the usual notation are read as the full projective
//! measurement (sum over all outcomes), the standard dephasing channel; this is
//! what keeps the map trace preserving.

use std::collections::BTreeMap;

use crate::analysis::Distribution;
use crate::error::{Result, WalkError};
use crate::scalar::{real, Cx, Real};
use crate::walk::{build_coin, CoinMatrix, CoinSpec, InitialSpec, PRUNE_THRESHOLD};

/// Largest number of decoherent steps a single walk may run.
pub const DEFAULT_DENSITY_STEP_CAP: usize = 100;

/// Per-step probabilities of a coin measurement (`q`) and a position measurement (`s`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams<T> {
    pub q: T,
    pub s: T,
}

impl<T: Real> DecoherenceParams<T> {
    pub fn new(q: T, s: T) -> Result<Self> {
        let p = Self { q, s };
        p.validate()?;
        Ok(p)
    }

    pub fn coin_only(q: T) -> Result<Self> {
        Self::new(q, T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        let slack = T::lit(1e-12);
        if !(self.q >= T::zero() && self.s >= T::zero() && self.q + self.s <= T::one() + slack) {
            return Err(WalkError::invalid(format!(
                "decoherence rates need q ≥ 0, s ≥ 0, q + s ≤ 1 (got q = {}, s = {})",
                self.q, self.s
            )));
        }
        Ok(())
    }
}

/// Dense density operator over coin ⊗ positions `[−half_width, half_width]`.
///
/// Basis index is `coin · (2·half_width + 1) + (position + half_width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    half_width: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// `|ψ₀⟩⟨ψ₀|` for the walker at the origin with coin state `init`.
    pub fn pure(init: &InitialSpec<T>, half_width: usize) -> Result<Self> {
        let n2 = init.norm_sqr();
        if !(n2 > T::zero()) || (n2 - T::one()).abs() > T::input_tol() {
            return Err(WalkError::invalid(format!("initial coin state must be normalized, |a|²+|b|² = {n2}")));
        }
        let k = real(T::one() / n2.sqrt());
        let mut rho = Self { half_width, data: vec![Cx::default(); Self::dim_for(half_width).pow(2)] };
        let amps = [(rho.index(0, 0), init.a * k), (rho.index(1, 0), init.b * k)];
        let d = rho.dim();
        for &(i, ai) in &amps {
            for &(j, aj) in &amps {
                rho.data[i * d + j] = ai * aj.conj();
            }
        }
        Ok(rho)
    }

    fn dim_for(half_width: usize) -> usize {
        2 * (2 * half_width + 1)
    }

    pub fn dim(&self) -> usize {
        Self::dim_for(self.half_width)
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    fn sites(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn index(&self, coin: usize, position: i64) -> usize {
        coin * self.sites() + (position + self.half_width as i64) as usize
    }

    fn coin_of(&self, i: usize) -> usize {
        i / self.sites()
    }

    fn site_of(&self, i: usize) -> usize {
        i % self.sites()
    }

    pub fn get(&self, i: usize, j: usize) -> Cx<T> {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.dim()).fold(Cx::default(), |acc, i| acc + self.get(i, i))
    }

    /// `tr(ρ²)`, computed as `Σ|ρ_ij|²` (valid for Hermitian ρ).
    pub fn purity(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest magnitude among entries coupling different coin states.
    pub fn coin_coherence(&self) -> T {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| self.coin_of(i) != self.coin_of(j))
            .map(|(i, j)| self.get(i, j).norm())
            .fold(T::zero(), T::max)
    }

    /// Row-major matrix entries.
    pub fn entries(&self) -> &[Cx<T>] {
        &self.data
    }

    /// Diagonal of the position marginal.
    pub fn position_distribution(&self) -> Distribution<T> {
        let cut = T::lit(PRUNE_THRESHOLD);
        let mut probs = BTreeMap::new();
        let w = self.half_width as i64;
        let mut total = T::zero();
        for n in -w..=w {
            let p = self.get(self.index(0, n), self.index(0, n)).re + self.get(self.index(1, n), self.index(1, n)).re;
            if p > cut {
                probs.insert(n, p);
                total = total + p;
            }
        }
        probs.values_mut().for_each(|p| *p = *p / total);
        Distribution::with_tolerance(probs, T::lit(1e-6).max(T::norm_tol())).expect("diagonal of a trace-one state")
    }

    /// `U v` for the shift-after-coin walk operator.
    fn walk_vector(&self, coin: &CoinMatrix<T>, v: &[Cx<T>], out: &mut [Cx<T>]) {
        out.iter_mut().for_each(|z| *z = Cx::default());
        let w = self.half_width as i64;
        for n in -w..=w {
            let (i0, i1) = (self.index(0, n), self.index(1, n));
            let (v0, v1) = (v[i0], v[i1]);
            if v0.norm_sqr() == T::zero() && v1.norm_sqr() == T::zero() {
                continue;
            }
            let c0 = coin.c00 * v0 + coin.c01 * v1;
            let c1 = coin.c10 * v0 + coin.c11 * v1;
            if n < w {
                out[self.index(0, n + 1)] = out[self.index(0, n + 1)] + c0;
            }
            if n > -w {
                out[self.index(1, n - 1)] = out[self.index(1, n - 1)] + c1;
            }
        }
    }

    /// `UρU†`.
    fn conjugate(&self, coin: &CoinMatrix<T>) -> Vec<Cx<T>> {
        let d = self.dim();
        let mut col = vec![Cx::default(); d];
        let mut out = vec![Cx::default(); d];
        // A = Uρ, column by column
        let mut a = vec![Cx::default(); d * d];
        for j in 0..d {
            (0..d).for_each(|i| col[i] = self.data[i * d + j]);
            self.walk_vector(coin, &col, &mut out);
            (0..d).for_each(|i| a[i * d + j] = out[i]);
        }
        // B = A U† = (U A†)†, row i of B is the conjugate of U applied to conj(row i of A)
        let mut b = vec![Cx::default(); d * d];
        for i in 0..d {
            (0..d).for_each(|j| col[j] = a[i * d + j].conj());
            self.walk_vector(coin, &col, &mut out);
            (0..d).for_each(|j| b[i * d + j] = out[j].conj());
        }
        b
    }
}

/// One decoherent step using the coin of transition `step` (1-based).
pub fn decoherent_step<T: Real>(
    rho: &DensityMatrix<T>,
    spec: &CoinSpec<T>,
    step: usize,
    params: &DecoherenceParams<T>,
) -> Result<DensityMatrix<T>> {
    params.validate()?;
    if step > rho.half_width {
        return Err(WalkError::Dimension { half_width: rho.half_width, step });
    }
    let coin = build_coin(spec, step)?;
    let evolved = rho.conjugate(&coin);
    let d = rho.dim();
    let keep = T::one() - params.q - params.s;
    let mut data = evolved;
    for i in 0..d {
        for j in 0..d {
            let mut f = keep;
            if rho.coin_of(i) == rho.coin_of(j) {
                f = f + params.q;
            }
            if rho.site_of(i) == rho.site_of(j) {
                f = f + params.s;
            }
            data[i * d + j] = data[i * d + j] * real(f);
        }
    }
    Ok(DensityMatrix { half_width: rho.half_width, data })
}

/// Iterator over `ρ(0), ρ(1), …, ρ(steps)` on a lattice wide enough for `steps`.
#[derive(Debug, Clone)]
pub struct DecoherentWalk<T> {
    spec: CoinSpec<T>,
    params: DecoherenceParams<T>,
    rho: DensityMatrix<T>,
    step: usize,
    steps: usize,
    started: bool,
}

impl<T: Real> DecoherentWalk<T> {
    pub fn new(init: &InitialSpec<T>, spec: &CoinSpec<T>, params: &DecoherenceParams<T>, steps: usize) -> Result<Self> {
        Self::with_cap(init, spec, params, steps, DEFAULT_DENSITY_STEP_CAP)
    }

    /// As [`DecoherentWalk::new`] with an explicit step cap.
    pub fn with_cap(
        init: &InitialSpec<T>,
        spec: &CoinSpec<T>,
        params: &DecoherenceParams<T>,
        steps: usize,
        cap: usize,
    ) -> Result<Self> {
        if steps > cap {
            return Err(WalkError::StepCap { requested: steps, cap });
        }
        spec.validate()?;
        params.validate()?;
        Ok(Self {
            spec: *spec,
            params: *params,
            rho: DensityMatrix::pure(init, steps)?,
            step: 0,
            steps,
            started: false,
        })
    }
}

impl<T: Real> Iterator for DecoherentWalk<T> {
    type Item = DensityMatrix<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.started {
            if self.step == self.steps {
                return None;
            }
            self.step += 1;
            self.rho =
                decoherent_step(&self.rho, &self.spec, self.step, &self.params).expect("lattice sized for every step");
        }
        self.started = true;
        Some(self.rho.clone())
    }
}

/// Position distribution after `steps` decoherent steps from `|ψ₀⟩⟨ψ₀|`.
pub fn decoherent_walk<T: Real>(
    init: &InitialSpec<T>,
    spec: &CoinSpec<T>,
    params: &DecoherenceParams<T>,
    steps: usize,
) -> Result<Distribution<T>> {
    let last = DecoherentWalk::new(init, spec, params, steps)?.last().expect("at least the initial state");
    Ok(last.position_distribution())
}
