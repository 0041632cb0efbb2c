//! Independent reference implementations used as oracles by the
//! integration tests. Nothing here calls the operator kernels under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pauli(which: char) -> DMatrix<C64> {
    let z = c(0.0);
    let i = C64::new(0.0, 1.0);
    let m = match which {
        'I' => [c(1.0), z, z, c(1.0)],
        'X' => [z, c(1.0), c(1.0), z],
        'Y' => [z, -i, i, z],
        'Z' => [c(1.0), z, z, c(-1.0)],
        // σ⁺ = |0⟩⟨1|, σ⁻ = |1⟩⟨0|
        '+' => [z, c(1.0), z, z],
        '-' => [z, z, c(1.0), z],
        _ => panic!("unknown operator {which}"),
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// Operator acting as `ops[k]` on site `k`. Site 0 is the least significant
/// bit of the basis index, so it is the rightmost Kronecker factor.
pub fn kron_sites(ops: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut acc = DMatrix::from_element(1, 1, c(1.0));
    for op in ops {
        acc = op.kronecker(&acc);
    }
    acc
}

pub fn site_op(n: usize, placements: &[(usize, char)]) -> DMatrix<C64> {
    let ops: Vec<_> = (0..n)
        .map(|k| placements.iter().find(|(s, _)| *s == k).map_or_else(|| pauli('I'), |(_, w)| pauli(*w)))
        .collect();
    kron_sites(&ops)
}

/// Dense lab-frame Hamiltonian of an open chain with fields `h`, coupling
/// `j` and anisotropy `gamma`.
pub fn chain_hamiltonian(h: &[f64], j: f64, gamma: f64) -> DMatrix<C64> {
    let n = h.len();
    let d = 1 << n;
    let mut out = DMatrix::zeros(d, d);
    for (k, &hk) in h.iter().enumerate() {
        out += site_op(n, &[(k, 'Z')]) * c(0.5 * hk);
    }
    for k in 0..n - 1 {
        out += site_op(n, &[(k, 'X'), (k + 1, 'X')]) * c(j / 4.0 * (1.0 + gamma));
        out += site_op(n, &[(k, 'Y'), (k + 1, 'Y')]) * c(j / 4.0 * (1.0 - gamma));
    }
    out
}

/// `e^{−iHt}` through a truncated Taylor series with scaling and squaring.
pub fn expm_taylor(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let norm: f64 = h.iter().map(|x| x.norm()).sum::<f64>() * t.abs();
    let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
    let a = h * C64::new(0.0, -t / f64::from(1u32 << squarings));
    let d = h.nrows();
    let mut term = DMatrix::<C64>::identity(d, d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a * c(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn random_amplitudes(r: &mut impl Rng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Random density matrix `A A† / tr` of the given dimension.
pub fn random_density(r: &mut impl Rng, d: usize) -> DMatrix<C64> {
    let a = DMatrix::from_fn(d, d, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    m / tr
}

/// Reduced density matrix of sites `(j, k)` by explicit summation, in the
/// basis `2·b_j + b_k`.
pub fn reduce_pair(rho: &DMatrix<C64>, n: usize, j: usize, k: usize) -> Matrix4<C64> {
    let d = 1 << n;
    let mut out = Matrix4::zeros();
    for row in 0..d {
        for col in 0..d {
            let rest_r = row & !(1 << j) & !(1 << k);
            let rest_c = col & !(1 << j) & !(1 << k);
            if rest_r != rest_c {
                continue;
            }
            let a = 2 * ((row >> j) & 1) + ((row >> k) & 1);
            let b = 2 * ((col >> j) & 1) + ((col >> k) & 1);
            out[(a, b)] += rho[(row, col)];
        }
    }
    out
}

pub fn pure_to_density(amps: &[C64]) -> DMatrix<C64> {
    let v = nalgebra::DVector::from_column_slice(amps);
    &v * v.adjoint()
}

/// Wootters concurrence through the Hermitian form `√ρ ρ̃ √ρ`.
pub fn concurrence_oracle(rho: &Matrix4<C64>) -> f64 {
    let yy = {
        let z = c(0.0);
        Matrix4::new(z, z, z, c(-1.0), z, z, c(1.0), z, z, c(1.0), z, z, c(-1.0), z, z, z)
    };
    let tilde = yy * rho.conjugate() * yy;
    let eig = rho.symmetric_eigen();
    let sqrt_diag = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt())));
    let sqrt_rho = eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let m = sqrt_rho * tilde * sqrt_rho;
    let m = (m + m.adjoint()) * c(0.5);
    let mut l: Vec<f64> = m.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}
