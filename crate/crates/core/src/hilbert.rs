//! Computational-basis states over `N` spin-1/2 sites and matrix-free
//! application of one- and two-site spin operators.
//!
//! Basis convention: bit `n` of a basis index encodes site `n` (little-endian).
//! Bit value 0 is the `σ^z = +1` state, written `|0⟩`; bit value 1 is `|1⟩`
//! with `σ^z = -1`. The raising operator `σ^+ = (σ^x + iσ^y)/2` maps `|1⟩` to
//! `|0⟩`, and `σ^-` maps `|0⟩` to `|1⟩`.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest system size for which dense `2^N × 2^N` oracles are built.
pub const DENSE_ORACLE_CAP: usize = 6;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Single-site operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
    /// `σ^+`, raises the `σ^z` eigenvalue (`|1⟩ → |0⟩`).
    Plus,
    /// `σ^-`, lowers the `σ^z` eigenvalue (`|0⟩ → |1⟩`).
    Minus,
}

impl Axis {
    /// Action on a single basis bit: whether the bit flips, and the matrix
    /// element picked up.
    #[inline]
    fn act(self, bit: bool) -> (bool, C64) {
        match (self, bit) {
            (Axis::X, _) => (true, ONE),
            (Axis::Y, false) => (true, I),
            (Axis::Y, true) => (true, -I),
            (Axis::Z, false) => (false, ONE),
            (Axis::Z, true) => (false, -ONE),
            (Axis::Plus, true) => (true, ONE),
            (Axis::Plus, false) => (false, ZERO),
            (Axis::Minus, false) => (true, ONE),
            (Axis::Minus, true) => (false, ZERO),
        }
    }

    /// The 2×2 matrix in the `(|0⟩, |1⟩)` basis. Used by the dense oracle only.
    pub fn matrix(self) -> Matrix2<C64> {
        match self {
            Axis::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Axis::Y => Matrix2::new(ZERO, -I, I, ZERO),
            Axis::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
            Axis::Plus => Matrix2::new(ZERO, ONE, ZERO, ZERO),
            Axis::Minus => Matrix2::new(ZERO, ZERO, ONE, ZERO),
        }
    }
}

/// The two-site operator products appearing in the XY Hamiltonian.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TwoSiteKind {
    /// `σ^+_n σ^-_m`
    SwapPlusMinus,
    /// `σ^-_n σ^+_m`
    SwapMinusPlus,
    /// `σ^+_n σ^+_m`
    RaisePair,
    /// `σ^-_n σ^-_m`
    LowerPair,
    /// `σ^x_n σ^x_m`
    XX,
    /// `σ^y_n σ^y_m`
    YY,
}

impl TwoSiteKind {
    pub fn axes(self) -> (Axis, Axis) {
        match self {
            TwoSiteKind::SwapPlusMinus => (Axis::Plus, Axis::Minus),
            TwoSiteKind::SwapMinusPlus => (Axis::Minus, Axis::Plus),
            TwoSiteKind::RaisePair => (Axis::Plus, Axis::Plus),
            TwoSiteKind::LowerPair => (Axis::Minus, Axis::Minus),
            TwoSiteKind::XX => (Axis::X, Axis::X),
            TwoSiteKind::YY => (Axis::Y, Axis::Y),
        }
    }
}

/// One summand of a spin Hamiltonian: a complex coefficient times a product
/// of one or two single-site operators.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Term {
    One { site: usize, axis: Axis, coeff: C64 },
    Two { n: usize, m: usize, kind: TwoSiteKind, coeff: C64 },
}

impl Term {
    pub fn one(site: usize, axis: Axis, coeff: impl Into<C64>) -> Self {
        Term::One { site, axis, coeff: coeff.into() }
    }

    pub fn two(n: usize, m: usize, kind: TwoSiteKind, coeff: impl Into<C64>) -> Self {
        Term::Two { n, m, kind, coeff: coeff.into() }
    }

    pub fn coeff(&self) -> C64 {
        match *self {
            Term::One { coeff, .. } | Term::Two { coeff, .. } => coeff,
        }
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        match *self {
            Term::One { site, .. } => check_site(site, n_sites),
            Term::Two { n, m, .. } => {
                check_site(n, n_sites)?;
                check_site(m, n_sites)?;
                if n == m {
                    return Err(Error::arg(format!("two-site operator needs distinct sites, got {n} twice")));
                }
                Ok(())
            }
        }
    }

    /// Accumulates `coeff · op · input` into `out`. Every input amplitude is
    /// read exactly once.
    pub(crate) fn accumulate(&self, input: &[C64], out: &mut [C64]) {
        self.accumulate_scaled(ONE, input, out)
    }

    pub(crate) fn accumulate_scaled(&self, scale: C64, input: &[C64], out: &mut [C64]) {
        debug_assert_eq!(input.len(), out.len());
        match *self {
            Term::One { site, axis, coeff } => {
                let mask = 1usize << site;
                let c = coeff * scale;
                let (f0, a0) = axis.act(false);
                let (f1, a1) = axis.act(true);
                let t0 = (if f0 { mask } else { 0 }, c * a0);
                let t1 = (if f1 { mask } else { 0 }, c * a1);
                for (i, &amp) in input.iter().enumerate() {
                    let (flip, a) = if i & mask == 0 { t0 } else { t1 };
                    if a != ZERO {
                        out[i ^ flip] += a * amp;
                    }
                }
            }
            Term::Two { n, m, kind, coeff } => {
                let (an, am) = kind.axes();
                let (mn, mm) = (1usize << n, 1usize << m);
                let c = coeff * scale;
                // Table indexed by (bit_n, bit_m).
                let mut table = [(0usize, ZERO); 4];
                for (slot, entry) in table.iter_mut().enumerate() {
                    let (fn_, xn) = an.act(slot & 1 != 0);
                    let (fm, xm) = am.act(slot & 2 != 0);
                    let flip = (if fn_ { mn } else { 0 }) | (if fm { mm } else { 0 });
                    *entry = (flip, c * xn * xm);
                }
                for (i, &amp) in input.iter().enumerate() {
                    let slot = usize::from(i & mn != 0) | (usize::from(i & mm != 0) << 1);
                    let (flip, a) = table[slot];
                    if a != ZERO {
                        out[i ^ flip] += a * amp;
                    }
                }
            }
        }
    }

    /// Dense `2^N × 2^N` matrix of this term built from Kronecker products.
    fn dense(&self, n_sites: usize) -> DMatrix<C64> {
        let mut factors: Vec<Matrix2<C64>> = vec![Matrix2::identity(); n_sites];
        let coeff = match *self {
            Term::One { site, axis, coeff } => {
                factors[site] = axis.matrix();
                coeff
            }
            Term::Two { n, m, kind, coeff } => {
                let (an, am) = kind.axes();
                factors[n] = an.matrix();
                factors[m] = am.matrix();
                coeff
            }
        };
        // Site 0 is the least significant bit, so it is the rightmost factor.
        let mut acc = DMatrix::<C64>::from_element(1, 1, ONE);
        for f in factors.iter().rev() {
            let f = DMatrix::from_iterator(2, 2, f.iter().copied());
            acc = acc.kronecker(&f);
        }
        acc * coeff
    }
}

fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site >= n_sites {
        Err(Error::arg(format!("site {site} out of range for {n_sites} sites")))
    } else {
        Ok(())
    }
}

/// Applies the sum of `terms` to `input`, overwriting `out`.
pub fn apply_terms(terms: &[Term], input: &[C64], out: &mut [C64]) {
    out.iter_mut().for_each(|x| *x = ZERO);
    for t in terms {
        t.accumulate(input, out);
    }
}

/// Complex amplitude vector over the `2^N` computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_sites: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(n_sites: usize, amps: Vec<C64>) -> Result<Self> {
        if n_sites == 0 || n_sites >= usize::BITS as usize {
            return Err(Error::arg(format!("unsupported site count {n_sites}")));
        }
        if amps.len() != 1 << n_sites {
            return Err(Error::arg(format!(
                "expected {} amplitudes for {n_sites} sites, got {}",
                1usize << n_sites,
                amps.len()
            )));
        }
        Ok(PureState { n_sites, amps })
    }

    /// Computational basis state with the given index.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_sites];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::arg(format!("basis index {index} out of range")))? = ONE;
        PureState::new(n_sites, amps)
    }

    /// The fully aligned state `|00…0⟩`.
    pub fn all_zero(n_sites: usize) -> Result<Self> {
        PureState::basis(n_sites, 0)
    }

    /// Basis state from a string of `0`/`1`, character `i` giving site `i`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = bits_to_index(bits)?;
        PureState::basis(bits.len(), index)
    }

    /// Normalized superposition of basis states given as bit strings.
    pub fn superposition(terms: &[(&str, C64)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(b, _)| b.len())
            .ok_or_else(|| Error::arg("empty superposition"))?;
        let mut amps = vec![ZERO; 1 << n];
        for (bits, a) in terms {
            if bits.len() != n {
                return Err(Error::arg("bit strings of unequal length"));
            }
            amps[bits_to_index(bits)?] += *a;
        }
        PureState::new(n, amps)?.normalized()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Expectation value `⟨ψ|op|ψ⟩` of a term list.
    pub fn expectation(&self, terms: &[Term]) -> Result<C64> {
        let image = apply_sum(self, terms)?;
        Ok(self.inner(&image))
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix { n_sites: self.n_sites, entries: &v * v.adjoint() }
    }

    /// Expected number of excited sites, `Σ_n ⟨(1 − σ^z_n)/2⟩`.
    pub fn excitation_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * i.count_ones() as f64)
            .sum()
    }
}

fn bits_to_index(bits: &str) -> Result<usize> {
    bits.chars().enumerate().try_fold(0usize, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << i)),
        _ => Err(Error::arg(format!("invalid bit character {c:?}"))),
    })
}

/// Image of `state` under a single-site Pauli or ladder operator.
pub fn apply_pauli(state: &PureState, site: usize, axis: Axis) -> Result<PureState> {
    apply_sum(state, &[Term::one(site, axis, ONE)])
}

/// Image of `state` under `coeff` times a two-site operator product.
pub fn apply_two_site(
    state: &PureState,
    n: usize,
    m: usize,
    kind: TwoSiteKind,
    coeff: C64,
) -> Result<PureState> {
    apply_sum(state, &[Term::two(n, m, kind, coeff)])
}

/// Image of `state` under the sum of `terms`.
pub fn apply_sum(state: &PureState, terms: &[Term]) -> Result<PureState> {
    for t in terms {
        t.validate(state.n_sites)?;
    }
    let mut out = vec![ZERO; state.dim()];
    apply_terms(terms, &state.amps, &mut out);
    Ok(PureState { n_sites: state.n_sites, amps: out })
}

/// Dense matrix of a term list, for validation at small `N`.
pub fn dense_operator(terms: &[Term], n_sites: usize) -> Result<DMatrix<C64>> {
    dense_operator_capped(terms, n_sites, DENSE_ORACLE_CAP)
}

pub fn dense_operator_capped(terms: &[Term], n_sites: usize, cap: usize) -> Result<DMatrix<C64>> {
    if n_sites > cap {
        return Err(Error::Resource(format!(
            "dense operator for {n_sites} sites exceeds the oracle cap of {cap}"
        )));
    }
    if n_sites == 0 {
        return Err(Error::arg("dense operator needs at least one site"));
    }
    let d = 1usize << n_sites;
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for t in terms {
        t.validate(n_sites)?;
        acc += t.dense(n_sites);
    }
    Ok(acc)
}

/// Hermitian, unit-trace matrix over the `2^N` computational basis.
///
/// Stored column-major (nalgebra's layout), so column `j` is a contiguous
/// slice of length `2^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_sites: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(n_sites: usize, entries: DMatrix<C64>) -> Result<Self> {
        let d = 1usize << n_sites;
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::arg(format!(
                "density matrix for {n_sites} sites must be {d}x{d}, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(DensityMatrix { n_sites, entries })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.adjoint())
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.entries.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn excitation_number(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re * i.count_ones() as f64).sum()
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Reduced state of two sites. Row/column index is `2·a + b` where `a` is
/// the bit of the first site of the pair and `b` the bit of the second.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    pub entries: Matrix4<C64>,
    pub site_pair: (usize, usize),
}

impl TwoQubitState {
    pub fn new(entries: Matrix4<C64>, site_pair: (usize, usize)) -> Self {
        TwoQubitState { entries, site_pair }
    }

    /// Projector onto a pure two-qubit state with amplitudes of
    /// `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn from_pure(amps: [C64; 4]) -> Self {
        let v = nalgebra::Vector4::from(amps);
        TwoQubitState { entries: v * v.adjoint(), site_pair: (0, 1) }
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }
}

/// Source of a partial trace.
pub enum Reducible<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a PureState> for Reducible<'a> {
    fn from(s: &'a PureState) -> Self {
        Reducible::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for Reducible<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        Reducible::Mixed(s)
    }
}

/// Traces out every site except `keep.0` and `keep.1`; `keep.0` becomes the
/// first tensor factor of the result.
pub fn partial_trace<'a>(source: impl Into<Reducible<'a>>, keep: (usize, usize)) -> Result<TwoQubitState> {
    let source = source.into();
    let n_sites = match source {
        Reducible::Pure(s) => s.n_sites,
        Reducible::Mixed(s) => s.n_sites,
    };
    let (j, k) = keep;
    check_site(j, n_sites)?;
    check_site(k, n_sites)?;
    if j == k {
        return Err(Error::arg(format!("partial trace needs two distinct sites, got {j} twice")));
    }
    let (mj, mk) = (1usize << j, 1usize << k);
    let local = |i: usize| (usize::from(i & mj != 0) << 1) | usize::from(i & mk != 0);
    let embed = |rest: usize, slot: usize| rest | if slot & 2 != 0 { mj } else { 0 } | if slot & 1 != 0 { mk } else { 0 };

    let mut red = Matrix4::<C64>::zeros();
    match source {
        Reducible::Pure(s) => {
            for (i, amp) in s.amps.iter().enumerate() {
                if *amp == ZERO {
                    continue;
                }
                let row = local(i);
                let rest = i & !(mj | mk);
                for col in 0..4 {
                    red[(row, col)] += amp * s.amps[embed(rest, col)].conj();
                }
            }
        }
        Reducible::Mixed(s) => {
            let d = s.dim();
            for i in 0..d {
                let row = local(i);
                let rest = i & !(mj | mk);
                for col in 0..4 {
                    red[(row, col)] += s.entries[(i, embed(rest, col))];
                }
            }
        }
    }
    Ok(TwoQubitState { entries: red, site_pair: keep })
}
