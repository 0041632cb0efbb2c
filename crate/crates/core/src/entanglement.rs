//! Wootters concurrence and its time series.

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, DensityMatrix, PureState, Reducible, TwoQubitState};
use crate::propagate::Trajectory;

fn spin_flip() -> Matrix4<C64> {
    let o = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    // σ^y ⊗ σ^y in the |00⟩, |01⟩, |10⟩, |11⟩ basis.
    Matrix4::new(
        z, z, z, -o, //
        z, z, o, z, //
        z, o, z, z, //
        -o, z, z, z,
    )
}

/// `C = max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ_i` the decreasing square roots of
/// the eigenvalues of `ρ (σ^y⊗σ^y) ρ* (σ^y⊗σ^y)`.
///
/// The `λ_i` are computed as the singular values of `Wᵀ (σ^y⊗σ^y) W` for
/// `ρ = W W†`, which keeps full precision for rank-deficient (pure) states.
pub fn concurrence(rho: &TwoQubitState) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).norm() > 1e-6 {
        return Err(Error::arg(format!("two-qubit state has trace {tr}")));
    }
    if !rho.entries.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::Numeric("two-qubit state has non-finite entries".into()));
    }
    let herm = (rho.entries + rho.entries.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let w = eig.eigenvectors * Matrix4::from_diagonal(&roots);
    let tau = w.transpose() * spin_flip() * w;
    let mut lam: Vec<f64> = tau.singular_values().iter().copied().collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    let c = lam[0] - lam[1] - lam[2] - lam[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Concurrence between sites `j` and `k` of a larger state.
pub fn pair_concurrence<'a>(source: impl Into<Reducible<'a>>, j: usize, k: usize) -> Result<f64> {
    concurrence(&partial_trace(source, (j, k))?)
}

/// Sampled `C_jk(t)` and its maximum over the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTrace {
    pub site_pair: (usize, usize),
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub window: (f64, f64),
    pub c_max: f64,
    /// First sampled time attaining `c_max`.
    pub t_max: f64,
}

impl ConcurrenceTrace {
    pub fn from_samples(site_pair: (usize, usize), times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::arg("concurrence trace needs equally many (≥ 1) times and values"));
        }
        let (mut c_max, mut t_max) = (values[0], times[0]);
        for (t, v) in times.iter().zip(&values) {
            if *v > c_max {
                c_max = *v;
                t_max = *t;
            }
        }
        let window = (times[0], *times.last().unwrap());
        Ok(ConcurrenceTrace { site_pair, times, values, window, c_max, t_max })
    }
}

/// Something whose two-site reduction can be taken.
pub trait Reduce {
    fn n_sites(&self) -> usize;
    fn reducible(&self) -> Reducible<'_>;
}

impl Reduce for PureState {
    fn n_sites(&self) -> usize {
        PureState::n_sites(self)
    }

    fn reducible(&self) -> Reducible<'_> {
        Reducible::Pure(self)
    }
}

impl Reduce for DensityMatrix {
    fn n_sites(&self) -> usize {
        DensityMatrix::n_sites(self)
    }

    fn reducible(&self) -> Reducible<'_> {
        Reducible::Mixed(self)
    }
}

pub fn concurrence_trace<S: Reduce>(traj: &Trajectory<S>, j: usize, k: usize) -> Result<ConcurrenceTrace> {
    let first = traj.states.first().ok_or_else(|| Error::arg("empty trajectory"))?;
    let n = first.n_sites();
    if j >= n || k >= n || j == k {
        return Err(Error::arg(format!("invalid site pair ({j}, {k}) for {n} sites")));
    }
    let values = traj
        .states
        .iter()
        .map(|s| concurrence(&partial_trace(s.reducible(), (j, k))?))
        .collect::<Result<Vec<_>>>()?;
    ConcurrenceTrace::from_samples((j, k), traj.times.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bell_state_is_maximal() {
        let s = 0.5f64.sqrt();
        let rho = TwoQubitState::from_pure([c(s), c(0.0), c(0.0), c(s)]);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn product_state_is_zero() {
        // (a|0⟩ + b|1⟩) ⊗ (c|0⟩ + d|1⟩)
        let (a, b) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let (cc, d) = (C64::new(0.28, 0.96), C64::new(0.0, 0.0));
        let rho = TwoQubitState::from_pure([a * cc, a * d, b * cc, b * d]);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn werner_state() {
        let p = 0.8;
        let s = 0.5f64.sqrt();
        let bell = TwoQubitState::from_pure([c(s), c(0.0), c(0.0), c(s)]).entries;
        let rho = bell * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0);
        let got = concurrence(&TwoQubitState::new(rho, (0, 1))).unwrap();
        assert_abs_diff_eq!(got, (3.0 * p - 1.0) / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn rejects_unnormalized() {
        let rho = TwoQubitState::new(Matrix4::identity(), (0, 1));
        assert!(matches!(concurrence(&rho), Err(Error::Argument(_))));
    }

    #[test]
    fn trace_bookkeeping() {
        let t = ConcurrenceTrace::from_samples((0, 3), vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.5, 0.5, 0.2]).unwrap();
        assert_eq!(t.c_max, 0.5);
        assert_eq!(t.t_max, 1.0);
        assert_eq!(t.window, (0.0, 3.0));
    }
}
