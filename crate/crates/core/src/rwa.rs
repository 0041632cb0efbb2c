//! Rotating-wave effective models and analytic resonance prediction.
//!
//! At `ω_d = 2h₀` with a modulated coupling `J(t) = J₀ + J₁ sin ω_d t` and no
//! ac field, the time average of the interaction-picture Hamiltonian is the
//! static XY model without Zeeman term
//!
//! ```text
//! H_R = (J₀/2) Σ [σ⁺σ⁻ + γ̃ σ⁺σ⁺ + h.c.],   γ̃ = γ J₁ / (2 J₀)
//! ```
//!
//! For a field drive the pair-creation phase expands as
//!
//! ```text
//! e^{iΣ(t)} ∝ Σ_n Σ_k e^{ih₁/ω}(−i)ⁿ (h₁/ω)ⁿ/n! C(n,k) e^{i[2h₀ + (n−2k)ω]t}
//! ```
//!
//! and a term survives the average when `2h₀ + (n − 2k)ω = 0`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Term, TwoSiteKind};
use crate::model::{DriveProtocol, Frame, NetworkSpec};
use crate::propagate::Generator;

/// Ratio `h₁/h₀` used to rank resonances when no field amplitude is given.
pub const REFERENCE_FIELD_RATIO: f64 = 0.1;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EffectiveAnisotropy {
    Finite(f64),
    /// `J₀ = 0`: only the pair-creation terms survive.
    InfiniteLimit,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    /// Prefactor `J₀/2` of the swap terms.
    pub j_eff: f64,
    pub gamma_eff: EffectiveAnisotropy,
    /// Magnitude `γ J₁ / 4` of the pair-creation terms (finite in both cases).
    pub pair_amplitude: f64,
}

/// The averaged Hamiltonian as a static generator.
#[derive(Clone, Debug)]
pub struct EffectiveResonantModel {
    pub model: EffectiveModel,
    spec: NetworkSpec,
}

/// Time average of the coupling-driven interaction-picture Hamiltonian at
/// `ω_d = 2h₀`.
///
/// The exact average carries the pair term as `i (γJ₁/4) σ⁺σ⁺`; a uniform
/// z-rotation by π/4 per site maps it onto the real form above, so states
/// differ only by that local unitary and concurrences coincide.
pub fn effective_resonant_model(spec: &NetworkSpec, p: &DriveProtocol) -> Result<EffectiveResonantModel> {
    p.validate()?;
    if p.h1 != 0.0 {
        return Err(Error::Unsupported(
            "the averaged static model exists only for a pure coupling drive (h1 = 0)".into(),
        ));
    }
    if spec.epsilon().iter().any(|&e| e != 1.0) {
        return Err(Error::Unsupported(
            "the averaged static model assumes a homogeneous field (all ε_n = 1)".into(),
        ));
    }
    let gamma = spec.gamma();
    let gamma_eff = if p.j0 == 0.0 {
        EffectiveAnisotropy::InfiniteLimit
    } else {
        EffectiveAnisotropy::Finite(gamma * p.j1 / (2.0 * p.j0))
    };
    let model = EffectiveModel { j_eff: 0.5 * p.j0, gamma_eff, pair_amplitude: 0.25 * gamma * p.j1 };
    Ok(EffectiveResonantModel { model, spec: spec.clone() })
}

impl EffectiveResonantModel {
    pub fn terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.terms_at(0.0, &mut out);
        out
    }
}

impl Generator for EffectiveResonantModel {
    fn n_sites(&self) -> usize {
        self.spec.n_sites()
    }

    fn max_frequency(&self) -> f64 {
        let per_edge = 2.0 * (self.model.j_eff.abs() + self.model.pair_amplitude.abs());
        2.0 * self.spec.edges().iter().map(|e| e.scale.abs() * per_edge).sum::<f64>()
    }

    fn terms_at(&self, _t: f64, out: &mut Vec<Term>) {
        out.clear();
        let pair = C64::new(0.0, self.model.pair_amplitude);
        for e in self.spec.edges() {
            let swap = self.model.j_eff * e.scale;
            if swap != 0.0 {
                out.push(Term::two(e.a, e.b, TwoSiteKind::SwapPlusMinus, swap));
                out.push(Term::two(e.a, e.b, TwoSiteKind::SwapMinusPlus, swap));
            }
            if pair != C64::new(0.0, 0.0) {
                out.push(Term::two(e.a, e.b, TwoSiteKind::RaisePair, pair * e.scale));
                out.push(Term::two(e.a, e.b, TwoSiteKind::LowerPair, pair.conj() * e.scale));
            }
        }
    }

    fn frame(&self) -> Frame {
        Frame::Interaction
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Coefficient of `e^{i[2h₀ + (n−2k)ω]t}` in the expansion of the pair phase.
pub fn expansion_coefficient(n: u32, k: u32, h1: f64, omega_d: f64) -> Result<C64> {
    if k > n {
        return Err(Error::arg(format!("k = {k} exceeds n = {n}")));
    }
    if !(omega_d > 0.0) {
        return Err(Error::arg("drive frequency must be positive"));
    }
    let x = h1 / omega_d;
    let minus_i_pow = match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    };
    Ok(C64::from_polar(1.0, x) * minus_i_pow * (x.powi(n as i32) / factorial(n) * binomial(n, k)))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonancePrediction {
    pub order: u32,
    pub k: u32,
    pub omega: f64,
    /// `(h₁/ω)ⁿ / n!`
    pub weight: f64,
}

impl ResonancePrediction {
    /// `2h₀ + (n − 2k) ω`.
    pub fn residual(&self, h0: f64) -> f64 {
        2.0 * h0 + (self.order as f64 - 2.0 * self.k as f64) * self.omega
    }
}

/// Resonances up to `max_order`, ranked with the reference field ratio.
pub fn predict_resonances(h0: f64, max_order: u32) -> Result<Vec<ResonancePrediction>> {
    predict_resonances_for(h0, REFERENCE_FIELD_RATIO * h0, max_order)
}

/// Positive frequencies solving `2h₀ + (n − 2k)ω = 0` for `n ≤ max_order`,
/// one entry per distinct frequency (its lowest order), by weight descending.
pub fn predict_resonances_for(h0: f64, h1: f64, max_order: u32) -> Result<Vec<ResonancePrediction>> {
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(Error::arg("h0 must be positive"));
    }
    if max_order == 0 {
        return Err(Error::arg("max_order must be at least 1"));
    }
    // A solution needs q = 2k − n ≥ 1, giving ω = 2h₀/q. Each q first
    // appears at n = q, k = q.
    let mut out: Vec<ResonancePrediction> = (1..=max_order)
        .map(|q| {
            let omega = 2.0 * h0 / f64::from(q);
            let weight = (h1 / omega).abs().powi(q as i32) / factorial(q);
            ResonancePrediction { order: q, k: q, omega, weight }
        })
        .collect();
    out.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.order.cmp(&b.order)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn coupling_drive(j0: f64, j1: f64) -> DriveProtocol {
        DriveProtocol { h0: 1.0, h1: 0.0, j0, j1, omega_d: 2.0, t_on: 0.0 }
    }

    #[test]
    fn effective_anisotropy_definition() {
        let spec = NetworkSpec::chain(4, 1.0).unwrap();
        let m = effective_resonant_model(&spec, &coupling_drive(0.05, 0.1)).unwrap();
        assert_eq!(m.model.gamma_eff, EffectiveAnisotropy::Finite(1.0));

        let spec = NetworkSpec::chain(4, 5.0).unwrap();
        let m = effective_resonant_model(&spec, &coupling_drive(0.05, 0.1)).unwrap();
        match m.model.gamma_eff {
            EffectiveAnisotropy::Finite(g) => assert_abs_diff_eq!(g, 5.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vanishing_dc_coupling_is_the_infinite_limit() {
        let spec = NetworkSpec::chain(3, 5.0).unwrap();
        let m = effective_resonant_model(&spec, &coupling_drive(0.0, 0.1)).unwrap();
        assert_eq!(m.model.gamma_eff, EffectiveAnisotropy::InfiniteLimit);
        assert_abs_diff_eq!(m.model.pair_amplitude, 5.0 * 0.1 / 4.0, epsilon = 1e-15);
        let terms = m.terms();
        assert!(terms.iter().all(|t| matches!(
            t,
            Term::Two { kind: TwoSiteKind::RaisePair | TwoSiteKind::LowerPair, .. }
        )));
    }

    #[test]
    fn field_drive_is_unsupported() {
        let spec = NetworkSpec::chain(3, 1.0).unwrap();
        let p = DriveProtocol { h1: 0.1, ..coupling_drive(0.1, 0.0) };
        assert!(matches!(effective_resonant_model(&spec, &p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zeroth_and_first_order_coefficients() {
        let (h1, w) = (0.1, 2.0);
        let c = expansion_coefficient(0, 0, h1, w).unwrap();
        assert_abs_diff_eq!((c - C64::from_polar(1.0, h1 / w)).norm(), 0.0, epsilon = 1e-15);
        for k in 0..=1 {
            let c = expansion_coefficient(1, k, h1, w).unwrap();
            assert_abs_diff_eq!(c.norm(), h1 / w, epsilon = 1e-15);
        }
        assert!(expansion_coefficient(1, 2, h1, w).is_err());
        assert!(expansion_coefficient(1, 0, h1, 0.0).is_err());
    }

    #[test]
    fn resonance_orders() {
        let r = predict_resonances(1.0, 1).unwrap();
        assert_eq!(r.iter().map(|p| p.omega).collect::<Vec<_>>(), vec![2.0]);
        let r = predict_resonances(1.0, 2).unwrap();
        assert_eq!(r.iter().map(|p| p.omega).collect::<Vec<_>>(), vec![2.0, 1.0]);
        let r = predict_resonances(1.0, 3).unwrap();
        assert_eq!(r.len(), 3);
        assert_abs_diff_eq!(r[2].omega, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!((r[2].order, r[2].k), (3, 3));
        assert!(predict_resonances(0.0, 2).is_err());
        assert!(predict_resonances(1.0, 0).is_err());
    }
}
