//! Dense-matrix reference implementations checked against the sparse and density-matrix walks.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use qwalk::{
    decoherent_step, evolve, CoinSpec, Complex64, DecoherenceParams, DecoherentWalk, DensityMatrix64, InitialSpec64,
};

/// Dense `U = S·(C ⊗ I)` on `[−w, w]` with index `coin·(2w+1) + n + w`.
fn dense_walk(alpha: f64, w: usize) -> DMatrix<Complex64> {
    let sites = 2 * w + 1;
    let (c, s) = (alpha.cos(), alpha.sin());
    let coin = [[c, s], [s, -c]];
    let mut u = DMatrix::zeros(2 * sites, 2 * sites);
    for n in 0..sites {
        for from in 0..2 {
            if n + 1 < sites {
                u[(n + 1, from * sites + n)] = Complex64::new(coin[0][from], 0.0);
            }
            if n > 0 {
                u[(sites + n - 1, from * sites + n)] = Complex64::new(coin[1][from], 0.0);
            }
        }
    }
    u
}

fn dense_state(init: &InitialSpec64, w: usize) -> DVector<Complex64> {
    let sites = 2 * w + 1;
    let mut v = DVector::zeros(2 * sites);
    v[w] = init.a;
    v[sites + w] = init.b;
    v
}

fn to_dense(rho: &DensityMatrix64) -> DMatrix<Complex64> {
    let d = rho.dim();
    DMatrix::from_row_slice(d, d, rho.entries())
}

#[test]
fn hadamard_walk_matches_dense_evolution() {
    let w = 10;
    let sites = 2 * w + 1;
    let init = InitialSpec64::plus_i();
    let spec = CoinSpec::hadamard();
    let u = dense_walk(FRAC_PI_4, w);
    let mut v = dense_state(&init, w);
    for t in 1..=w {
        v = &u * v;
        let s = evolve(&init, &spec, t).unwrap();
        for n in -(w as i64)..=(w as i64) {
            let sp = s.spinor(n);
            let k = (n + w as i64) as usize;
            assert!((sp.a0 - v[k]).norm() < 1e-12, "T={t} n={n}");
            assert!((sp.a1 - v[sites + k]).norm() < 1e-12, "T={t} n={n}");
        }
    }
}

#[test]
fn step_dependent_walk_matches_dense_evolution() {
    let (w, theta) = (12, 2.0 * PI / 5.0);
    let sites = 2 * w + 1;
    let init = InitialSpec64::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let mut v = dense_state(&init, w);
    for t in 1..=w {
        v = dense_walk(t as f64 * theta, w) * v;
    }
    let s = evolve(&init, &CoinSpec::step_dependent(theta), w).unwrap();
    for n in -(w as i64)..=(w as i64) {
        let k = (n + w as i64) as usize;
        assert!((s.spinor(n).a0 - v[k]).norm() < 1e-12);
        assert!((s.spinor(n).a1 - v[sites + k]).norm() < 1e-12);
    }
}

#[test]
fn decoherent_step_matches_dense_channel() {
    let w = 6;
    let sites = 2 * w + 1;
    let dim = 2 * sites;
    let (q, s) = (0.3, 0.2);
    let spec = CoinSpec::step_dependent(PI / 5.0);
    let params = DecoherenceParams::new(q, s).unwrap();
    let mut rho = DensityMatrix64::pure(&InitialSpec64::plus_i(), w).unwrap();
    let mut dense = to_dense(&rho);
    let proj = |pick: &dyn Fn(usize) -> bool| {
        DMatrix::from_fn(
            dim,
            dim,
            |i, j| if i == j && pick(i) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) },
        )
    };
    for t in 1..=w {
        let u = dense_walk(t as f64 * PI / 5.0, w);
        let evolved = &u * &dense * u.adjoint();
        let mut next = evolved.scale(1.0 - q - s);
        for c in 0..2 {
            let p = proj(&|i| i / sites == c);
            next += (&p * &evolved * &p).scale(q);
        }
        for n in 0..sites {
            let p = proj(&|i| i % sites == n);
            next += (&p * &evolved * &p).scale(s);
        }
        dense = next;
        rho = decoherent_step(&rho, &spec, t, &params).unwrap();
        assert!((to_dense(&rho) - &dense).camax() < 1e-12, "T={t}");
    }
}

#[test]
fn decoherent_states_stay_physical() {
    let spec = CoinSpec::step_dependent(2.0 * PI / 5.0);
    for (q, s) in [(0.2, 0.0), (0.5, 0.3), (0.8, 0.0), (0.0, 0.6)] {
        let params = DecoherenceParams::new(q, s).unwrap();
        let mut last_purity = f64::INFINITY;
        for rho in DecoherentWalk::new(&InitialSpec64::plus_i(), &spec, &params, 8).unwrap() {
            assert!((rho.trace().re - 1.0).abs() < 1e-10);
            assert!(rho.hermiticity_error() < 1e-12);
            let eig = to_dense(&rho).symmetric_eigen();
            assert!(eig.eigenvalues.iter().all(|&l| l > -1e-10), "q={q} s={s}");
            let p = rho.purity();
            assert!(p <= last_purity + 1e-12);
            last_purity = p;
        }
    }
}
