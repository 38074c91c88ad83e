//! Seeded random draws of symmetric matrices, symplectic maps and Lagrangians.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::symplectic::LagrangianFrame;
use crate::{Real, Tolerances};

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "SYMMORSE_SEED";

/// Seed used when nothing is configured.
pub const DEFAULT_SEED: u64 = 0x5eed_1a91;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reads `SYMMORSE_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Derives an independent stream for a numbered sub-task.
pub fn substream(seed: u64, k: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

pub fn random_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        T::lit(scale * x)
    })
}

pub fn random_symmetric<T: Real, R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> DMatrix<T> {
    linalg::symmetrize(&random_matrix(n, n, scale, rng))
}

/// Random symmetric positive definite matrix with eigenvalues at least `floor`.
pub fn random_spd<T: Real, R: Rng + ?Sized>(n: usize, floor: f64, rng: &mut R) -> DMatrix<T> {
    let a: DMatrix<T> = random_matrix(n, n, 1.0, rng);
    &a * a.transpose() + DMatrix::identity(n, n) * T::lit(floor)
}

/// Random element of `Sp(2n, R)` as a product of elementary symplectic factors.
pub fn random_symplectic<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<T> {
    let a = loop {
        let a: DMatrix<T> = DMatrix::identity(n, n) + random_matrix::<T, R>(n, n, 0.4, rng);
        let sv = linalg::singular_values(&a);
        if sv[n - 1] > T::lit(0.1) {
            break a;
        }
    };
    let a_inv_t = a.clone().try_inverse().expect("well conditioned draw").transpose();
    let s1: DMatrix<T> = random_symmetric(n, 0.6, rng);
    let s2: DMatrix<T> = random_symmetric(n, 0.6, rng);
    let id = DMatrix::<T>::identity(n, n);
    let zero = DMatrix::<T>::zeros(n, n);
    let diag = block(&a, &zero, &zero, &a_inv_t);
    let upper = block(&id, &s1, &zero, &id);
    let lower = block(&id, &zero, &s2, &id);
    diag * upper * lower
}

fn block<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>, d: &DMatrix<T>) -> DMatrix<T> {
    linalg::vcat(&linalg::hcat(a, b), &linalg::hcat(c, d))
}

/// The graph Lagrangian `span [S; I]` of a random symmetric `S`.
pub fn random_graph_lagrangian<T: Real, R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> LagrangianFrame<T> {
    let s = random_symmetric(n, scale, rng);
    LagrangianFrame::from_graph(&s, &Tolerances::default()).expect("graph frames are Lagrangian")
}

/// A Lagrangian in general position: the image of `L_D` under a random symplectic map.
pub fn random_lagrangian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> LagrangianFrame<T> {
    let tol = Tolerances::default();
    loop {
        let phi = random_symplectic::<T, R>(n, rng);
        if let Ok(f) = LagrangianFrame::dirichlet(n).transform(&phi, &tol) {
            return f;
        }
    }
}
