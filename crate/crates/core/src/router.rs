//! Junction networks that route or split a travelling excitation, and the
//! multipartite single-excitation states they produce.
//!
//! Site layout of a [`RouterSpec`]: the trunk occupies sites `0..trunk_len`
//! with Alice at site 0, the junction is site `trunk_len`, and each arm
//! follows as a consecutive block running away from the junction.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{concurrence, pair_concurrence, ConcurrenceTrace};
use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, PureState};
use crate::model::{DriveProtocol, DrivenModel, Edge, Frame, NetworkSpec};
use crate::propagate::{evolve_pure_with, StepControl, TimeGrid};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ArmDrive {
    /// Uniform chain with the trunk's field profile.
    Undriven,
    /// Field scale `ε` on every arm site, detuning the arm from the trunk.
    Driven { field_scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub len: usize,
    pub drive: ArmDrive,
    /// Multiplier on `J(t)` for every edge of the arm, including the one to
    /// the junction.
    pub coupling_scale: f64,
    /// Party holding the far end of the arm.
    pub end_label: String,
}

impl ArmSpec {
    pub fn undriven(len: usize, end_label: &str) -> Self {
        ArmSpec { len, drive: ArmDrive::Undriven, coupling_scale: 1.0, end_label: end_label.into() }
    }
}

/// How the excitation is put into the network at `t = 0`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Injection {
    /// `(|01⟩ + |10⟩)/√2` on Alice and her neighbour; Alice keeps her half.
    #[default]
    BellPair,
    /// A single excitation on Alice's neighbour, everything else `|0⟩`.
    NeighborExcitation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouterSpec {
    pub trunk_len: usize,
    pub arms: Vec<ArmSpec>,
    /// Coupling multiplier on Alice's own link. Zero keeps her site as a
    /// static memory qubit.
    pub alice_link_scale: f64,
    pub gamma: f64,
    pub injection: Injection,
    pub alice_label: String,
}

impl RouterSpec {
    /// Trunk plus two undriven arms labelled Bob and Charlie.
    pub fn t_junction(trunk_len: usize, arm_a: usize, arm_b: usize) -> Self {
        RouterSpec {
            trunk_len,
            arms: vec![ArmSpec::undriven(arm_a, "Bob"), ArmSpec::undriven(arm_b, "Charlie")],
            alice_link_scale: 0.0,
            gamma: 0.0,
            injection: Injection::BellPair,
            alice_label: "Alice".into(),
        }
    }

    pub fn alice(&self) -> usize {
        0
    }

    pub fn junction(&self) -> usize {
        self.trunk_len
    }

    pub fn n_sites(&self) -> usize {
        self.trunk_len + 1 + self.arms.iter().map(|a| a.len).sum::<usize>()
    }

    /// Sites of arm `i`, ordered from the junction outwards.
    pub fn arm_sites(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.trunk_len + 1 + self.arms[..i].iter().map(|a| a.len).sum::<usize>();
        start..start + self.arms[i].len
    }

    /// Far end of arm `i`.
    pub fn arm_end(&self, i: usize) -> usize {
        self.arm_sites(i).end - 1
    }

    fn validate(&self) -> Result<()> {
        if self.trunk_len == 0 {
            return Err(Error::arg("trunk must contain at least Alice's site"));
        }
        if self.arms.len() < 2 {
            return Err(Error::arg("a router needs at least two arms"));
        }
        let mut labels = vec![self.alice_label.as_str()];
        for (i, a) in self.arms.iter().enumerate() {
            if a.len == 0 {
                return Err(Error::arg(format!("arm {i} has zero length")));
            }
            if !a.coupling_scale.is_finite() {
                return Err(Error::arg(format!("arm {i} coupling scale is not finite")));
            }
            if let ArmDrive::Driven { field_scale } = a.drive {
                if !field_scale.is_finite() {
                    return Err(Error::arg(format!("arm {i} field scale is not finite")));
                }
            }
            labels.push(a.end_label.as_str());
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::arg(format!("party label {:?} is used twice", w[0])));
        }
        Ok(())
    }
}

/// Trunk chain plus arms joined at the junction.
pub fn build_router_graph(r: &RouterSpec) -> Result<NetworkSpec> {
    r.validate()?;
    let n = r.n_sites();
    let mut edges = Vec::with_capacity(n - 1);
    for s in 0..r.trunk_len {
        let scale = if s == 0 { r.alice_link_scale } else { 1.0 };
        edges.push(Edge { a: s, b: s + 1, scale });
    }
    let mut epsilon = vec![1.0; n];
    for (i, arm) in r.arms.iter().enumerate() {
        let mut prev = r.junction();
        for s in r.arm_sites(i) {
            edges.push(Edge { a: prev, b: s, scale: arm.coupling_scale });
            if let ArmDrive::Driven { field_scale } = arm.drive {
                epsilon[s] = field_scale;
            }
            prev = s;
        }
    }
    NetworkSpec::new(n, edges, epsilon, r.gamma)
}

fn initial_state(r: &RouterSpec) -> Result<PureState> {
    let n = r.n_sites();
    let a = r.alice();
    let nb = a + 1;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    match r.injection {
        Injection::BellPair => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            amps[1 << a] = C64::new(s, 0.0);
            amps[1 << nb] = C64::new(s, 0.0);
        }
        Injection::NeighborExcitation => amps[1 << nb] = C64::new(1.0, 0.0),
    }
    PureState::new(n, amps)
}

#[derive(Clone, Debug, Serialize)]
pub struct SiteArrival {
    pub site: usize,
    pub arm: usize,
    pub c_max: f64,
    pub t_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    /// `C_{Alice,n}(t)` for every arm site `n`.
    pub traces: Vec<ConcurrenceTrace>,
    pub arrivals: Vec<SiteArrival>,
    /// Largest deviation of the excitation number from its initial value.
    pub excitation_drift: f64,
    /// Set when `γ ≠ 0`, outside the excitation-conserving regime routing
    /// assumes.
    pub anisotropy_warning: bool,
}

impl SplitReport {
    pub fn trace_for(&self, site: usize) -> Option<&ConcurrenceTrace> {
        self.traces.iter().find(|t| t.site_pair.1 == site)
    }
}

/// Propagates the injected excitation through the router and records the
/// concurrence between Alice and every arm site.
pub fn run_split_experiment(
    r: &RouterSpec,
    p: &DriveProtocol,
    grid: &TimeGrid,
    step: &StepControl,
) -> Result<SplitReport> {
    let spec = build_router_graph(r)?;
    let anisotropy_warning = r.gamma != 0.0;
    if anisotropy_warning {
        log::warn!("router run with γ = {} does not conserve the excitation number", r.gamma);
    }
    let model = DrivenModel::new(spec, *p, Frame::Interaction)?;
    let psi0 = initial_state(r)?;
    let sites: Vec<(usize, usize)> = (0..r.arms.len()).flat_map(|i| r.arm_sites(i).map(move |s| (i, s))).collect();
    let alice = r.alice();
    let n0 = psi0.excitation_number();

    let mut times = Vec::with_capacity(grid.samples + 1);
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.samples + 1); sites.len()];
    let mut drift: f64 = 0.0;
    let mut failure = None;
    evolve_pure_with(&psi0, &model, grid, step, |t, psi| {
        times.push(t);
        drift = drift.max((psi.excitation_number() - n0).abs());
        for (col, &(_, s)) in values.iter_mut().zip(&sites) {
            match pair_concurrence(psi, alice, s) {
                Ok(c) => col.push(c),
                Err(e) => {
                    failure.get_or_insert(e);
                    col.push(f64::NAN)
                }
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut traces = Vec::with_capacity(sites.len());
    let mut arrivals = Vec::with_capacity(sites.len());
    for (v, &(arm, s)) in values.into_iter().zip(&sites) {
        let tr = ConcurrenceTrace::from_samples((alice, s), times.clone(), v)?;
        arrivals.push(SiteArrival { site: s, arm, c_max: tr.c_max, t_max: tr.t_max });
        traces.push(tr);
    }
    Ok(SplitReport { traces, arrivals, excitation_drift: drift, anisotropy_warning })
}

/// Single-excitation superposition `Σ_i a_i |0…1_i…0⟩` over the parties.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitState {
    pub labels: Vec<String>,
    pub amplitudes: Vec<C64>,
    pub state: PureState,
}

/// Builds the normalized multipartite state with one branch per party.
pub fn multipartite_target_state(branches: &[C64]) -> Result<SplitState> {
    let labels = (0..branches.len()).map(|i| format!("P{i}")).collect();
    multipartite_target_state_labeled(branches, labels)
}

pub fn multipartite_target_state_labeled(branches: &[C64], labels: Vec<String>) -> Result<SplitState> {
    let n = branches.len();
    if n == 0 || labels.len() != n {
        return Err(Error::arg("need one label per branch and at least one branch"));
    }
    let norm = branches.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::arg("branch amplitudes must not all vanish"));
    }
    let amplitudes: Vec<C64> = branches.iter().map(|a| a / norm).collect();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (i, a) in amplitudes.iter().enumerate() {
        amps[1 << i] = *a;
    }
    Ok(SplitState { labels, amplitudes, state: PureState::new(n, amps)? })
}

/// Branch list after an even split of branch `i` into two parties, each
/// receiving `a_i/√2`.
pub fn split_branch(amplitudes: &[C64], i: usize) -> Result<Vec<C64>> {
    let a = *amplitudes.get(i).ok_or_else(|| Error::arg(format!("no branch {i}")))?;
    let half = a * std::f64::consts::FRAC_1_SQRT_2;
    let mut out = amplitudes.to_vec();
    out[i] = half;
    out.insert(i + 1, half);
    Ok(out)
}

/// All-pairs concurrence matrix (zero diagonal).
pub fn pairwise_concurrence_table(state: &PureState) -> Result<Vec<Vec<f64>>> {
    let n = state.n_sites();
    if n > 12 {
        return Err(Error::Resource(format!("pairwise table limited to 12 sites, got {n}")));
    }
    let mut table = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let c = concurrence(&partial_trace(state, (j, k))?)?;
            table[j][k] = c;
            table[k][j] = c;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::HashSet;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn smallest_t_junction_is_a_star() {
        let spec = build_router_graph(&RouterSpec::t_junction(1, 1, 1)).unwrap();
        assert_eq!(spec.n_sites(), 4);
        assert_eq!(spec.edges().len(), 3);
        assert!(spec.edges().iter().all(|e| e.a == 1 || e.b == 1));
    }

    #[test]
    fn symmetric_arms_are_exchangeable() {
        let rs = RouterSpec::t_junction(2, 3, 3);
        let spec = build_router_graph(&rs).unwrap();
        let (a, b) = (rs.arm_sites(0), rs.arm_sites(1));
        let perm = |s: usize| {
            if a.contains(&s) {
                s - a.start + b.start
            } else if b.contains(&s) {
                s - b.start + a.start
            } else {
                s
            }
        };
        let key = |x: usize, y: usize, sc: f64| (x.min(y), x.max(y), sc.to_bits());
        let edges: HashSet<_> = spec.edges().iter().map(|e| key(e.a, e.b, e.scale)).collect();
        let mapped: HashSet<_> = spec.edges().iter().map(|e| key(perm(e.a), perm(e.b), e.scale)).collect();
        assert_eq!(edges, mapped);
        for s in 0..spec.n_sites() {
            assert_eq!(spec.epsilon()[s], spec.epsilon()[perm(s)]);
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut rs = RouterSpec::t_junction(1, 2, 2);
        rs.arms[1].end_label = "Bob".into();
        assert!(matches!(build_router_graph(&rs), Err(Error::Argument(_))));
        let mut rs = RouterSpec::t_junction(1, 2, 2);
        rs.arms[0].len = 0;
        assert!(build_router_graph(&rs).is_err());
    }

    #[test]
    fn tripartite_target() {
        let s = multipartite_target_state(&[r(0.5f64.sqrt()), r(0.5), r(0.5)]).unwrap();
        let expected = PureState::superposition(&[("100", r(0.5f64.sqrt())), ("010", r(0.5)), ("001", r(0.5))]).unwrap();
        assert_abs_diff_eq!(s.state.fidelity(&expected), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_branch_is_product() {
        let s = multipartite_target_state(&[r(1.0), r(0.0), r(0.0)]).unwrap();
        let t = pairwise_concurrence_table(&s.state).unwrap();
        assert!(t.iter().flatten().all(|&c| c == 0.0));
        assert!(multipartite_target_state(&[r(0.0), r(0.0)]).is_err());
    }

    #[test]
    fn ghz_pairs_are_separable() {
        let ghz = PureState::superposition(&[("000", r(1.0)), ("111", r(1.0))]).unwrap();
        let t = pairwise_concurrence_table(&ghz).unwrap();
        assert!(t.iter().flatten().all(|&c| c.abs() < 1e-10));
    }

    #[test]
    fn split_dilutes_by_root_two() {
        let before = [r(0.5f64.sqrt()), r(0.5f64.sqrt())];
        let after = split_branch(&before, 1).unwrap();
        assert_eq!(after.len(), 3);
        let c_before = pair_concurrence(&multipartite_target_state(&before).unwrap().state, 0, 1).unwrap();
        let s = multipartite_target_state(&after).unwrap().state;
        for k in [1, 2] {
            let c = pair_concurrence(&s, 0, k).unwrap();
            assert_abs_diff_eq!(c, c_before * std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-10);
        }
    }
}
