mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use xyent::hilbert::{apply_sum, apply_terms, partial_trace, Axis, PureState, Term, TwoSiteKind};

const AXES: [(Axis, char); 5] = [(Axis::X, 'X'), (Axis::Y, 'Y'), (Axis::Z, 'Z'), (Axis::Plus, '+'), (Axis::Minus, '-')];
const KINDS: [(TwoSiteKind, char, char); 6] = [
    (TwoSiteKind::SwapPlusMinus, '+', '-'),
    (TwoSiteKind::SwapMinusPlus, '-', '+'),
    (TwoSiteKind::RaisePair, '+', '+'),
    (TwoSiteKind::LowerPair, '-', '-'),
    (TwoSiteKind::XX, 'X', 'X'),
    (TwoSiteKind::YY, 'Y', 'Y'),
];

#[derive(Clone, Debug)]
enum Spec {
    One(usize, usize, f64, f64),
    Two(usize, usize, usize, f64, f64),
}

fn spec_strategy(n: usize) -> impl Strategy<Value = Spec> {
    prop_oneof![
        (0..n, 0..5usize, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(s, a, re, im)| Spec::One(s, a, re, im)),
        (0..n, 1..n, 0..6usize, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(move |(a, off, k, re, im)| Spec::Two(a, (a + off) % n, k, re, im)),
    ]
}

fn build(specs: &[Spec], n: usize) -> (Vec<Term>, DMatrix<C64>) {
    let d = 1 << n;
    let mut dense = DMatrix::zeros(d, d);
    let mut terms = Vec::new();
    for s in specs {
        match *s {
            Spec::One(site, a, re, im) => {
                let coeff = C64::new(re, im);
                terms.push(Term::one(site, AXES[a].0, coeff));
                dense += site_op(n, &[(site, AXES[a].1)]) * coeff;
            }
            Spec::Two(p, q, k, re, im) => {
                let coeff = C64::new(re, im);
                let (kind, cp, cq) = KINDS[k];
                terms.push(Term::two(p, q, kind, coeff));
                dense += site_op(n, &[(p, cp), (q, cq)]) * coeff;
            }
        }
    }
    (terms, dense)
}

fn state_strategy(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn case(n: usize) -> impl Strategy<Value = (Vec<Spec>, Vec<C64>, Vec<C64>)> {
    (prop::collection::vec(spec_strategy(n), 1..8), state_strategy(n), state_strategy(n))
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_free_matches_kronecker_oracle((specs, x, _) in (2usize..=5).prop_flat_map(case)) {
        let n = x.len().trailing_zeros() as usize;
        let (terms, dense) = build(&specs, n);
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        apply_terms(&terms, &x, &mut out);
        let expected = &dense * nalgebra::DVector::from_column_slice(&x);
        prop_assert!(max_diff(&out, expected.as_slice()) < 1e-12);
    }

    #[test]
    fn application_is_linear((specs, x, y) in (2usize..=4).prop_flat_map(case), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let n = x.len().trailing_zeros() as usize;
        let (terms, _) = build(&specs, n);
        let d = x.len();
        let combo: Vec<C64> = x.iter().zip(&y).map(|(p, q)| p * a + q * C64::new(0.0, b)).collect();
        let (mut hx, mut hy, mut hc) = (vec![C64::new(0.0, 0.0); d], vec![C64::new(0.0, 0.0); d], vec![C64::new(0.0, 0.0); d]);
        apply_terms(&terms, &x, &mut hx);
        apply_terms(&terms, &y, &mut hy);
        apply_terms(&terms, &combo, &mut hc);
        let rhs: Vec<C64> = hx.iter().zip(&hy).map(|(p, q)| p * a + q * C64::new(0.0, b)).collect();
        prop_assert!(max_diff(&hc, &rhs) < 1e-11);
    }

    #[test]
    fn partial_trace_matches_explicit_sum(seed in any::<u64>(), n in 2usize..=6, j in 0usize..6, off in 1usize..6) {
        let (j, k) = (j % n, (j + off) % n);
        prop_assume!(j != k);
        let amps = random_amplitudes(&mut rng(seed), 1 << n);
        let psi = PureState::new(n, amps.clone()).unwrap();
        let red = partial_trace(&psi, (j, k)).unwrap();
        let oracle = reduce_pair(&pure_to_density(&amps), n, j, k);
        prop_assert!((red.entries - oracle).norm() < 1e-12);
        prop_assert!((red.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((red.entries - red.entries.adjoint()).norm() < 1e-12);
        let eig = red.entries.symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|l| *l > -1e-12));
    }

    #[test]
    fn mixed_partial_trace_has_unit_trace(seed in any::<u64>(), n in 2usize..=4) {
        let rho = random_density(&mut rng(seed), 1 << n);
        let dm = xyent::hilbert::DensityMatrix::new(n, rho.clone()).unwrap();
        let red = partial_trace(&dm, (0, n - 1)).unwrap();
        prop_assert!((red.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((red.entries - reduce_pair(&rho, n, 0, n - 1)).norm() < 1e-12);
    }
}

#[test]
fn heisenberg_exchange_eigenvalues() {
    // XX + YY on two sites has spectrum {2, −2, 0, 0}.
    let terms = [Term::two(0, 1, TwoSiteKind::XX, 1.0), Term::two(0, 1, TwoSiteKind::YY, 1.0)];
    let singlet = PureState::superposition(&[("01", c(1.0)), ("10", c(-1.0))]).unwrap();
    let triplet = PureState::superposition(&[("01", c(1.0)), ("10", c(1.0))]).unwrap();
    let hs = apply_sum(&singlet, &terms).unwrap();
    let ht = apply_sum(&triplet, &terms).unwrap();
    assert!(max_diff(hs.amplitudes(), &singlet.amplitudes().iter().map(|a| a * -2.0).collect::<Vec<_>>()) < 1e-14);
    assert!(max_diff(ht.amplitudes(), &triplet.amplitudes().iter().map(|a| a * 2.0).collect::<Vec<_>>()) < 1e-14);
}

#[test]
fn chain_oracle_is_hermitian_with_known_dc_spectrum() {
    let h = chain_hamiltonian(&[1.0, 1.0, 1.0], 0.0, 0.3);
    assert!((&h - h.adjoint()).norm() < 1e-14);
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    assert!((e[0] + 1.5).abs() < 1e-14 && (e[7] - 1.5).abs() < 1e-14);
}
