//! Spin-network topology, drive protocol and the driven XY Hamiltonian in the
//! lab frame and in the interaction picture that removes the Zeeman term.
//!
//! Lab frame:
//! ```text
//! H(t) = ½ Σ_n h_n(t) σ^z_n + Σ_(a,b) (J_ab(t)/4) [(1+γ) σ^x_a σ^x_b + (1−γ) σ^y_a σ^y_b]
//! h_n(t) = ε_n (h₀ + h₁ sin ω t),   J(t) = J₀ + J₁ sin ω t   (t ≥ t_on)
//! ```
//! Interaction picture `ψ̃ = U₀† ψ` with `U₀ = exp(−i Σ_n φ_n σ^z_n)`, `φ̇_n = h_n/2`:
//! ```text
//! H̃(t) = Σ_(a,b) (J_ab/2) [e^{iΔ} σ⁺_a σ⁻_b + e^{−iΔ} σ⁻_a σ⁺_b + γ (e^{iΣ} σ⁺_a σ⁺_b + e^{−iΣ} σ⁻_a σ⁻_b)]
//! ```
//! where `Δ = 2(φ_a − φ_b)` and `Σ = 2(φ_a + φ_b)` are the operator phases
//! picked up by the swap and pair-creation terms.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Axis, PureState, Term, TwoSiteKind};

/// Coupling between two sites, as a multiplier on the global `J(t)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    n_sites: usize,
    edges: Vec<Edge>,
    epsilon: Vec<f64>,
    gamma: f64,
}

impl NetworkSpec {
    pub fn new(n_sites: usize, edges: Vec<Edge>, epsilon: Vec<f64>, gamma: f64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::arg("network needs at least one site"));
        }
        if epsilon.len() != n_sites {
            return Err(Error::arg(format!(
                "expected {n_sites} field scale factors, got {}",
                epsilon.len()
            )));
        }
        if let Some(e) = epsilon.iter().find(|e| !e.is_finite()) {
            return Err(Error::arg(format!("field scale factor {e} is not finite")));
        }
        if !gamma.is_finite() {
            return Err(Error::arg("anisotropy must be finite"));
        }
        for e in &edges {
            if e.a >= n_sites || e.b >= n_sites {
                return Err(Error::arg(format!("edge ({}, {}) references a missing site", e.a, e.b)));
            }
            if e.a == e.b {
                return Err(Error::arg(format!("self-loop on site {}", e.a)));
            }
            if !e.scale.is_finite() {
                return Err(Error::arg("edge coupling scale must be finite"));
            }
        }
        Ok(NetworkSpec { n_sites, edges, epsilon, gamma })
    }

    /// Homogeneous open chain: `N − 1` nearest-neighbour edges, `ε_n = 1`.
    pub fn chain(n_sites: usize, gamma: f64) -> Result<Self> {
        let edges = (0..n_sites.saturating_sub(1)).map(|n| Edge { a: n, b: n + 1, scale: 1.0 }).collect();
        NetworkSpec::new(n_sites, edges, vec![1.0; n_sites], gamma)
    }

    pub fn with_epsilon(mut self, epsilon: Vec<f64>) -> Result<Self> {
        self.epsilon = epsilon;
        NetworkSpec::new(self.n_sites, self.edges, self.epsilon, self.gamma)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        NetworkSpec::new(self.n_sites, self.edges, self.epsilon, gamma)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// First and last site, the pair whose entanglement the resonance sweeps
    /// track.
    pub fn end_pair(&self) -> (usize, usize) {
        (0, self.n_sites - 1)
    }

    fn max_epsilon(&self) -> f64 {
        self.epsilon.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    fn max_edge_scale(&self) -> f64 {
        self.edges.iter().fold(0.0, |m, e| m.max(e.scale.abs()))
    }
}

/// Dc plus one harmonic for both the local fields and the coupling.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveProtocol {
    pub h0: f64,
    pub h1: f64,
    pub j0: f64,
    pub j1: f64,
    pub omega_d: f64,
    #[serde(default)]
    pub t_on: f64,
}

impl DriveProtocol {
    pub fn validate(&self) -> Result<()> {
        let all = [self.h0, self.h1, self.j0, self.j1, self.omega_d, self.t_on];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::arg("drive amplitudes must be finite"));
        }
        if (self.h1 != 0.0 || self.j1 != 0.0) && !(self.omega_d > 0.0) {
            return Err(Error::arg("an ac drive needs a positive frequency"));
        }
        Ok(())
    }

    /// `max(J₀, J₁)`, the coupling scale that sets the observation window.
    pub fn coupling_scale(&self) -> f64 {
        self.j0.max(self.j1)
    }

    /// Observation window `T = 4N / max(J₀, J₁)`.
    pub fn window(&self, n_sites: usize) -> Result<f64> {
        let scale = self.coupling_scale();
        if !(scale > 0.0) {
            return Err(Error::arg("observation window undefined: max(J0, J1) must be positive"));
        }
        Ok(4.0 * n_sites as f64 / scale)
    }

    fn ac(&self, t: f64) -> f64 {
        if self.omega_d == 0.0 {
            0.0
        } else {
            (self.omega_d * t).sin()
        }
    }

    /// Global coupling `J(t)`; zero before the quench.
    pub fn coupling(&self, t: f64) -> f64 {
        if t < self.t_on {
            0.0
        } else {
            self.j0 + self.j1 * self.ac(t)
        }
    }

    /// Global field profile `h₀ + h₁ sin ω t` (the ac part only after the quench).
    pub fn field(&self, t: f64) -> f64 {
        if t < self.t_on {
            self.h0
        } else {
            self.h0 + self.h1 * self.ac(t)
        }
    }

    /// `∫₀ᵗ (h₀ + h₁ sin ω s) ds` with the ac part switched on at `t_on`.
    fn field_integral(&self, t: f64) -> f64 {
        let mut acc = self.h0 * t;
        if self.h1 != 0.0 && t > self.t_on {
            acc += self.h1 / self.omega_d * ((self.omega_d * self.t_on).cos() - (self.omega_d * t).cos());
        }
        acc
    }
}

/// Local fields `h_n(t)` and the global coupling `J(t)`.
pub fn drive_values(p: &DriveProtocol, spec: &NetworkSpec, t: f64) -> (Vec<f64>, f64) {
    let f = p.field(t);
    (spec.epsilon.iter().map(|e| e * f).collect(), p.coupling(t))
}

/// Accumulated local phases of the interaction picture at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFrame {
    t: f64,
    phi: Vec<f64>,
    delta: Vec<f64>,
    sigma: Vec<f64>,
}

impl PhaseFrame {
    fn from_phi(spec: &NetworkSpec, t: f64, phi: Vec<f64>) -> Self {
        let delta = spec.edges.iter().map(|e| 2.0 * (phi[e.a] - phi[e.b])).collect();
        let sigma = spec.edges.iter().map(|e| 2.0 * (phi[e.a] + phi[e.b])).collect();
        PhaseFrame { t, phi, delta, sigma }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `φ_n(t)`, one per site.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Swap-term phase per edge.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Pair-creation phase per edge.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }
}

/// `φ_n(t) = ε_n [h₀ t + (h₁/ω)(1 − cos ω t)] / 2`, the closed-form integral
/// of `h_n/2`.
pub fn interaction_phases(p: &DriveProtocol, spec: &NetworkSpec, t: f64) -> PhaseFrame {
    let half = 0.5 * p.field_integral(t);
    let phi = spec.epsilon.iter().map(|e| e * half).collect();
    PhaseFrame::from_phi(spec, t, phi)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Interaction,
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Interaction => "interaction",
        })
    }
}

/// Which picture to assemble the Hamiltonian in.
#[derive(Copy, Clone, Debug)]
pub enum FrameRef<'a> {
    Lab,
    Interaction(&'a PhaseFrame),
}

/// Term list of `H(t)` or `H̃(t)`.
pub fn hamiltonian_action(
    spec: &NetworkSpec,
    p: &DriveProtocol,
    t: f64,
    frame: FrameRef<'_>,
) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    match frame {
        FrameRef::Lab => lab_terms(spec, p, t, &mut terms),
        FrameRef::Interaction(pf) => {
            if pf.phi.len() != spec.n_sites || pf.delta.len() != spec.edges.len() {
                return Err(Error::arg("phase frame does not match the network"));
            }
            if (pf.t - t).abs() > 1e-12 * t.abs().max(1.0) {
                return Err(Error::arg(format!(
                    "phase frame is for t = {}, Hamiltonian requested at t = {t}",
                    pf.t
                )));
            }
            interaction_terms(spec, p, t, pf, &mut terms)
        }
    }
    Ok(terms)
}

pub(crate) fn lab_terms(spec: &NetworkSpec, p: &DriveProtocol, t: f64, out: &mut Vec<Term>) {
    out.clear();
    let f = p.field(t);
    for (n, e) in spec.epsilon.iter().enumerate() {
        let h = e * f;
        if h != 0.0 {
            out.push(Term::one(n, Axis::Z, 0.5 * h));
        }
    }
    let j = p.coupling(t);
    if j == 0.0 {
        return;
    }
    for e in &spec.edges {
        let c = 0.25 * j * e.scale;
        if c == 0.0 {
            continue;
        }
        out.push(Term::two(e.a, e.b, TwoSiteKind::XX, c * (1.0 + spec.gamma)));
        if spec.gamma != 1.0 {
            out.push(Term::two(e.a, e.b, TwoSiteKind::YY, c * (1.0 - spec.gamma)));
        }
    }
}

pub(crate) fn interaction_terms(
    spec: &NetworkSpec,
    p: &DriveProtocol,
    t: f64,
    pf: &PhaseFrame,
    out: &mut Vec<Term>,
) {
    out.clear();
    let j = p.coupling(t);
    if j == 0.0 {
        return;
    }
    for (i, e) in spec.edges.iter().enumerate() {
        let c = 0.5 * j * e.scale;
        if c == 0.0 {
            continue;
        }
        let swap = C64::from_polar(c, pf.delta[i]);
        out.push(Term::two(e.a, e.b, TwoSiteKind::SwapPlusMinus, swap));
        out.push(Term::two(e.a, e.b, TwoSiteKind::SwapMinusPlus, swap.conj()));
        if spec.gamma != 0.0 {
            let pair = C64::from_polar(c * spec.gamma, pf.sigma[i]);
            out.push(Term::two(e.a, e.b, TwoSiteKind::RaisePair, pair));
            out.push(Term::two(e.a, e.b, TwoSiteKind::LowerPair, pair.conj()));
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Rotation {
    ToInteraction,
    ToLab,
}

/// Applies `U₀(t)†` (to the interaction picture) or `U₀(t)` (back to the lab
/// frame). Both are products of local z-rotations.
pub fn rotate_frame(state: &PureState, frame: &PhaseFrame, direction: Rotation) -> Result<PureState> {
    if frame.phi.len() != state.n_sites() {
        return Err(Error::arg(format!(
            "phase frame has {} sites, state has {}",
            frame.phi.len(),
            state.n_sites()
        )));
    }
    let sign = match direction {
        Rotation::ToInteraction => 1.0,
        Rotation::ToLab => -1.0,
    };
    let mut out = state.clone();
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        // σ^z eigenvalue is +1 for bit 0.
        let angle: f64 = frame
            .phi
            .iter()
            .enumerate()
            .map(|(n, phi)| if i & (1 << n) == 0 { *phi } else { -phi })
            .sum();
        *a *= C64::from_polar(1.0, sign * angle);
    }
    Ok(out)
}

/// The driven network as a time-dependent generator for the propagator.
#[derive(Clone, Debug)]
pub struct DrivenModel {
    pub spec: NetworkSpec,
    pub drive: DriveProtocol,
    pub frame: Frame,
}

impl DrivenModel {
    pub fn new(spec: NetworkSpec, drive: DriveProtocol, frame: Frame) -> Result<Self> {
        drive.validate()?;
        Ok(DrivenModel { spec, drive, frame })
    }

    /// Fastest angular frequency present in the generator, used for step
    /// control.
    pub fn max_frequency(&self) -> f64 {
        let p = &self.drive;
        let field = self.spec.max_epsilon() * (p.h0.abs() + p.h1.abs());
        let coupling = (p.j0.abs() + p.j1.abs()) * self.spec.max_edge_scale() * self.spec.gamma.abs().max(1.0);
        let field = match self.frame {
            Frame::Lab => field,
            // e^{iΣ} rotates at twice the local field.
            Frame::Interaction => 2.0 * field,
        };
        p.omega_d.abs().max(field).max(coupling).max(p.h0.abs())
    }

    pub fn terms_at(&self, t: f64, out: &mut Vec<Term>) {
        match self.frame {
            Frame::Lab => lab_terms(&self.spec, &self.drive, t, out),
            Frame::Interaction => {
                let pf = interaction_phases(&self.drive, &self.spec, t);
                interaction_terms(&self.spec, &self.drive, t, &pf, out)
            }
        }
    }
}
