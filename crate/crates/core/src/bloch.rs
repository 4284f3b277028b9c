//! Per-site Bloch vectors of the local coin state.
//!
//! Convention: for the normalized spinor `(a0, a1)`,
//! `x = 2·Re(a0·conj(a1))`, `y = 2·Im(conj(a0)·a1)`, `z = |a0|² − |a1|²`.

use std::collections::BTreeMap;

use crate::analysis::SUPPORT_THRESHOLD;
use crate::scalar::Real;
use crate::walk::{Spinor, WalkerState};

/// Spinors with squared norm at or below this have no Bloch vector.
pub const MIN_SPINOR_NORM_SQR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }
}

pub fn bloch_vector<T: Real>(s: &Spinor<T>) -> Option<BlochVector<T>> {
    let n2 = s.norm_sqr();
    if !(n2 > T::lit(MIN_SPINOR_NORM_SQR)) {
        return None;
    }
    let k = T::one() / n2.sqrt();
    let (a0, a1) = (s.a0 * k, s.a1 * k);
    let two = T::lit(2.0);
    Some(BlochVector { x: two * (a0 * a1.conj()).re, y: two * (a0.conj() * a1).im, z: a0.norm_sqr() - a1.norm_sqr() })
}

/// Bloch vector at every site holding at least the reporting threshold of probability.
pub fn bloch_map<T: Real>(state: &WalkerState<T>) -> BTreeMap<i64, BlochVector<T>> {
    let cut = T::lit(SUPPORT_THRESHOLD);
    state.iter().filter(|(_, s)| s.norm_sqr() >= cut).filter_map(|(n, s)| bloch_vector(s).map(|b| (n, b))).collect()
}

/// Positions of the leftmost and rightmost sites in the Bloch map.
fn edge_positions<T: Real>(state: &WalkerState<T>) -> Option<(i64, i64)> {
    let cut = T::lit(SUPPORT_THRESHOLD);
    let mut occupied = state.iter().filter(|(_, s)| s.norm_sqr() >= cut).map(|(n, _)| n);
    let left = occupied.next()?;
    let right = occupied.last()?;
    Some((left, right))
}

/// Bloch vectors at the leftmost and rightmost reported sites; `None` with fewer than two sites.
pub fn edge_vectors<T: Real>(state: &WalkerState<T>) -> Option<(BlochVector<T>, BlochVector<T>)> {
    let (l, r) = edge_positions(state)?;
    Some((bloch_vector(&state.spinor(l))?, bloch_vector(&state.spinor(r))?))
}

/// `|⟨ŝ_L|ŝ_R⟩|²` for the normalized edge spinors; zero when the edge coin states are orthogonal.
///
/// Equal to `(1 + b_L·b_R)/2` in terms of the Bloch vectors.
pub fn edge_overlap<T: Real>(state: &WalkerState<T>) -> Option<T> {
    let (l, r) = edge_positions(state)?;
    let (sl, sr) = (state.spinor(l), state.spinor(r));
    Some(sl.inner(&sr).norm_sqr() / (sl.norm_sqr() * sr.norm_sqr()))
}
