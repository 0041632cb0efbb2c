//! Time evolution of pure states (Schrödinger equation) and of density
//! matrices under a pure-dephasing Lindblad equation
//!
//! ```text
//! dρ/dt = −i[H(t), ρ] + (λ/2) Σ_n (σ^z_n ρ σ^z_n − ρ)
//! ```
//!
//! Both use the classical fixed-step fourth-order Runge–Kutta scheme with the
//! Hamiltonian applied matrix-free. A dense eigendecomposition route is kept
//! as a validation oracle for small static problems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{apply_terms, DensityMatrix, PureState, Term, DENSE_ORACLE_CAP};
use crate::model::{DrivenModel, Frame};

/// Largest network evolved as a dense density matrix.
pub const LINDBLAD_CAP: usize = 8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MINUS_I: C64 = C64 { re: 0.0, im: -1.0 };

/// Anything that can produce the Hamiltonian's term list at a given time.
pub trait Generator: Sync {
    fn n_sites(&self) -> usize;
    /// Upper bound on the angular frequencies present, for step control.
    fn max_frequency(&self) -> f64;
    fn terms_at(&self, t: f64, out: &mut Vec<Term>);
    fn frame(&self) -> Frame {
        Frame::Lab
    }
}

impl Generator for DrivenModel {
    fn n_sites(&self) -> usize {
        self.spec.n_sites()
    }

    fn max_frequency(&self) -> f64 {
        DrivenModel::max_frequency(self)
    }

    fn terms_at(&self, t: f64, out: &mut Vec<Term>) {
        DrivenModel::terms_at(self, t, out)
    }

    fn frame(&self) -> Frame {
        self.frame
    }
}

/// Time-independent Hamiltonian given as a term list.
#[derive(Clone, Debug)]
pub struct StaticHamiltonian {
    pub n_sites: usize,
    pub terms: Vec<Term>,
}

impl Generator for StaticHamiltonian {
    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn max_frequency(&self) -> f64 {
        // Σ|c| bounds the operator norm since every Pauli product has norm ≤ 1;
        // level differences reach twice that.
        2.0 * self.terms.iter().map(|t| t.coeff().norm()).sum::<f64>()
    }

    fn terms_at(&self, _t: f64, out: &mut Vec<Term>) {
        out.clear();
        out.extend_from_slice(&self.terms);
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Pure-dephasing rate, identical on every site.
    pub lambda: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::arg(format!("dephasing rate must be finite and non-negative, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Step-size control: at least `steps_per_period` steps per period of the
/// fastest frequency in the generator.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub steps_per_period: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { steps_per_period: 200.0 }
    }
}

impl StepControl {
    /// Largest allowed step, `2π / (ν ω_max)`.
    pub fn max_step(&self, omega_max: f64) -> Result<f64> {
        if !(self.steps_per_period >= 1.0) || !self.steps_per_period.is_finite() {
            return Err(Error::Numeric(format!("invalid steps per period {}", self.steps_per_period)));
        }
        if !omega_max.is_finite() {
            return Err(Error::Numeric("non-finite frequency scale in the model".into()));
        }
        if omega_max <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(std::f64::consts::TAU / (self.steps_per_period * omega_max))
    }
}

/// Uniform sampling of `[t0, t1]` with `samples` intervals (so `samples + 1`
/// snapshot times, both ends included).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, samples: usize) -> Result<Self> {
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::arg(format!("time span [{t0}, {t1}] is empty or not finite")));
        }
        if samples == 0 {
            return Err(Error::arg("at least one sample interval is required"));
        }
        Ok(TimeGrid { t0, t1, samples })
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.samples {
            self.t1
        } else {
            self.t0 + (self.t1 - self.t0) * i as f64 / self.samples as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.samples).map(|i| self.time(i)).collect()
    }
}

/// Snapshots on a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub frame: Frame,
}

/// Integrator bookkeeping returned with every run.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub steps: usize,
    pub step_size: f64,
    /// Sum over steps of the norm (pure) or trace (mixed) deviation removed
    /// by renormalization.
    pub norm_drift: f64,
}

/// Per sample interval: number of equal substeps not exceeding `h_max`.
fn substeps(grid: &TimeGrid, h_max: f64) -> usize {
    let dt = (grid.t1 - grid.t0) / grid.samples as f64;
    if h_max.is_infinite() {
        1
    } else {
        (dt / h_max).ceil().max(1.0) as usize
    }
}

/// Schrödinger evolution, calling `observe` at every grid time (including
/// the initial one).
pub fn evolve_pure_with<G, F>(
    psi0: &PureState,
    model: &G,
    grid: &TimeGrid,
    step: &StepControl,
    mut observe: F,
) -> Result<EvolutionReport>
where
    G: Generator + ?Sized,
    F: FnMut(f64, &PureState),
{
    if psi0.n_sites() != model.n_sites() {
        return Err(Error::arg(format!(
            "state has {} sites, model has {}",
            psi0.n_sites(),
            model.n_sites()
        )));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::arg(format!("initial state is not normalized (norm {})", psi0.norm())));
    }
    let h_max = step.max_step(model.max_frequency())?;
    let n_sub = substeps(grid, h_max);
    let dt = (grid.t1 - grid.t0) / grid.samples as f64;
    let h = dt / n_sub as f64;

    let d = psi0.dim();
    let mut psi = psi0.clone();
    let mut terms = Vec::new();
    let mut k = [vec![ZERO; d], vec![ZERO; d], vec![ZERO; d], vec![ZERO; d]];
    let mut tmp = vec![ZERO; d];
    let mut report = EvolutionReport { steps: 0, step_size: h, norm_drift: 0.0 };

    // k ← −i H(t) x
    let rhs = |t: f64, x: &[C64], out: &mut [C64], terms: &mut Vec<Term>| {
        model.terms_at(t, terms);
        apply_terms(terms, x, out);
        out.iter_mut().for_each(|v| *v *= MINUS_I);
    };

    observe(grid.t0, &psi);
    for s in 0..grid.samples {
        let ts = grid.time(s);
        for sub in 0..n_sub {
            let t = ts + sub as f64 * h;
            let y = psi.amplitudes_mut();
            rhs(t, y, &mut k[0], &mut terms);
            axpy(&mut tmp, y, 0.5 * h, &k[0]);
            rhs(t + 0.5 * h, &tmp, &mut k[1], &mut terms);
            axpy(&mut tmp, y, 0.5 * h, &k[1]);
            rhs(t + 0.5 * h, &tmp, &mut k[2], &mut terms);
            axpy(&mut tmp, y, h, &k[2]);
            rhs(t + h, &tmp, &mut k[3], &mut terms);
            let w = h / 6.0;
            for i in 0..d {
                y[i] += w * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
            }
            let norm = y.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Numeric(format!("state norm became {norm} at t = {}", t + h)));
            }
            report.norm_drift += (norm - 1.0).abs();
            y.iter_mut().for_each(|a| *a /= norm);
            report.steps += 1;
        }
        observe(grid.time(s + 1), &psi);
    }
    Ok(report)
}

#[inline]
fn axpy(out: &mut [C64], y: &[C64], a: f64, x: &[C64]) {
    for ((o, yi), xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + a * xi;
    }
}

/// Schrödinger evolution returning every snapshot.
pub fn evolve_pure<G: Generator + ?Sized>(
    psi0: &PureState,
    model: &G,
    grid: &TimeGrid,
    step: &StepControl,
) -> Result<(Trajectory<PureState>, EvolutionReport)> {
    let mut times = Vec::with_capacity(grid.samples + 1);
    let mut states = Vec::with_capacity(grid.samples + 1);
    let report = evolve_pure_with(psi0, model, grid, step, |t, s| {
        times.push(t);
        states.push(s.clone());
    })?;
    Ok((Trajectory { times, states, frame: model.frame() }, report))
}

/// `dρ/dt` into `out` (column-major, `d × d`), using `a` as scratch for `Hρ`.
fn lindblad_rhs(
    terms: &[Term],
    lambda: f64,
    rho: &DMatrix<C64>,
    a: &mut DMatrix<C64>,
    out: &mut DMatrix<C64>,
) {
    let d = rho.nrows();
    for (src, dst) in rho.as_slice().chunks_exact(d).zip(a.as_mut_slice().chunks_exact_mut(d)) {
        apply_terms(terms, src, dst);
    }
    // −i(Hρ − ρH) with ρH = (Hρ)† for Hermitian H and ρ.
    for j in 0..d {
        for i in 0..d {
            let comm = a[(i, j)] - a[(j, i)].conj();
            let mut v = MINUS_I * comm;
            if lambda != 0.0 {
                v -= lambda * ((i ^ j).count_ones() as f64) * rho[(i, j)];
            }
            out[(i, j)] = v;
        }
    }
}

/// Lindblad evolution with uniform pure dephasing, calling `observe` at every
/// grid time.
pub fn evolve_lindblad_with<G, F>(
    rho0: &DensityMatrix,
    model: &G,
    noise: &NoiseSpec,
    grid: &TimeGrid,
    step: &StepControl,
    mut observe: F,
) -> Result<EvolutionReport>
where
    G: Generator + ?Sized,
    F: FnMut(f64, &DensityMatrix),
{
    noise.validate()?;
    let n = rho0.n_sites();
    if n > LINDBLAD_CAP {
        let bytes = 16usize << (2 * n);
        return Err(Error::Resource(format!(
            "density-matrix evolution of {n} sites exceeds the cap of {LINDBLAD_CAP} \
             (one copy needs {bytes} bytes, the integrator holds seven)"
        )));
    }
    if n != model.n_sites() {
        return Err(Error::arg(format!("state has {n} sites, model has {}", model.n_sites())));
    }
    if (rho0.trace() - 1.0).norm() > 1e-10 || rho0.hermiticity_error() > 1e-10 {
        return Err(Error::arg("initial density matrix must be Hermitian with unit trace"));
    }
    let h_max = step.max_step(model.max_frequency().max(noise.lambda * n as f64))?;
    let n_sub = substeps(grid, h_max);
    let dt = (grid.t1 - grid.t0) / grid.samples as f64;
    let h = dt / n_sub as f64;

    let d = rho0.dim();
    let mut rho = rho0.clone();
    let mut terms = Vec::new();
    let zeros = || DMatrix::<C64>::zeros(d, d);
    let (mut k0, mut k1, mut k2, mut k3) = (zeros(), zeros(), zeros(), zeros());
    let (mut tmp, mut scratch) = (zeros(), zeros());
    let mut report = EvolutionReport { steps: 0, step_size: h, norm_drift: 0.0 };
    let lambda = noise.lambda;

    observe(grid.t0, &rho);
    for s in 0..grid.samples {
        let ts = grid.time(s);
        for sub in 0..n_sub {
            let t = ts + sub as f64 * h;
            let y = rho.entries_mut();
            model.terms_at(t, &mut terms);
            lindblad_rhs(&terms, lambda, y, &mut scratch, &mut k0);
            tmp.zip_zip_apply(y, &k0, |o, yi, ki| *o = yi + 0.5 * h * ki);
            model.terms_at(t + 0.5 * h, &mut terms);
            lindblad_rhs(&terms, lambda, &tmp, &mut scratch, &mut k1);
            tmp.zip_zip_apply(y, &k1, |o, yi, ki| *o = yi + 0.5 * h * ki);
            lindblad_rhs(&terms, lambda, &tmp, &mut scratch, &mut k2);
            tmp.zip_zip_apply(y, &k2, |o, yi, ki| *o = yi + h * ki);
            model.terms_at(t + h, &mut terms);
            lindblad_rhs(&terms, lambda, &tmp, &mut scratch, &mut k3);
            let w = h / 6.0;
            for idx in 0..d * d {
                let v = k0[idx] + 2.0 * k1[idx] + 2.0 * k2[idx] + k3[idx];
                y[idx] += w * v;
            }
            // Re-symmetrize to remove rounding drift from Hermiticity.
            for j in 0..d {
                for i in 0..j {
                    let m = 0.5 * (y[(i, j)] + y[(j, i)].conj());
                    y[(i, j)] = m;
                    y[(j, i)] = m.conj();
                }
                y[(j, j)].im = 0.0;
            }
            let tr = y.trace().re;
            if !tr.is_finite() {
                return Err(Error::Numeric(format!("trace became {tr} at t = {}", t + h)));
            }
            report.norm_drift += (tr - 1.0).abs();
            report.steps += 1;
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > 1e-8 {
            return Err(Error::Numeric(format!(
                "trace drifted to {tr} by t = {} (step {h}, {} steps)",
                grid.time(s + 1),
                report.steps
            )));
        }
        observe(grid.time(s + 1), &rho);
    }
    Ok(report)
}

pub fn evolve_lindblad<G: Generator + ?Sized>(
    rho0: &DensityMatrix,
    model: &G,
    noise: &NoiseSpec,
    grid: &TimeGrid,
    step: &StepControl,
) -> Result<(Trajectory<DensityMatrix>, EvolutionReport)> {
    let mut times = Vec::with_capacity(grid.samples + 1);
    let mut states = Vec::with_capacity(grid.samples + 1);
    let report = evolve_lindblad_with(rho0, model, noise, grid, step, |t, r| {
        times.push(t);
        states.push(r.clone());
    })?;
    Ok((Trajectory { times, states, frame: model.frame() }, report))
}

/// `e^{−iHt} ψ₀` through a dense eigendecomposition of a static Hamiltonian.
pub fn expm_oracle(h_dense: &DMatrix<C64>, psi0: &PureState, t: f64) -> Result<PureState> {
    let d = psi0.dim();
    if psi0.n_sites() > DENSE_ORACLE_CAP {
        return Err(Error::Resource(format!(
            "dense propagation of {} sites exceeds the oracle cap of {DENSE_ORACLE_CAP}",
            psi0.n_sites()
        )));
    }
    if h_dense.nrows() != d || h_dense.ncols() != d {
        return Err(Error::arg("Hamiltonian and state dimensions differ"));
    }
    let herm = crate::hilbert::max_abs_diff(h_dense, &h_dense.adjoint());
    if herm > 1e-10 {
        return Err(Error::arg(format!("Hamiltonian is not Hermitian (deviation {herm:e})")));
    }
    let eig = h_dense.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let psi = DVector::from_column_slice(psi0.amplitudes());
    let mut coeffs = v.adjoint() * psi;
    for (c, e) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= C64::from_polar(1.0, -e * t);
    }
    let out = v * coeffs;
    PureState::new(psi0.n_sites(), out.iter().copied().collect())
}
