//! Density operators, Kraus channels, and the amplitude damping family.
//!
//! The amplitude damping channel models spontaneous energy loss in a qubit:
//! with probability `γ` the excited component decays to the ground state.
//! Alongside the channel itself this module provides the two signal-state
//! ensembles the rest of the crate transmits through it — the `|±⟩`
//! ensemble that maximizes single-copy distinguishability, and the
//! Holevo-optimal ensemble that maximizes the one-shot accessible
//! information rate — plus the entropic quantities needed to compare them.

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// Tolerance on `|tr ρ − 1|` for density operators.
const TRACE_TOL: f64 = 1e-10;

/// Tolerance on negative eigenvalues of a density operator.
const PSD_TOL: f64 = 1e-9;

/// Tolerance on `‖Σ K†K − I‖_F` for trace-preserving channels.
const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// Tolerance on `|Σ priors − 1|` for ensembles.
const PRIOR_TOL: f64 = 1e-12;

/// A quantum state: Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates and wraps a density matrix.
    ///
    /// Requires a square matrix with Hermiticity defect below `1e-10`,
    /// trace within `1e-10` of one, and eigenvalues above `-1e-9`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::validation("density operators must be square"));
        }
        let defect = matrix.hermiticity_defect();
        if defect > crate::linalg::HERMITICITY_TOL {
            return Err(Error::validation(format!(
                "density operator is not Hermitian (defect {:.3e})",
                defect
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::validation(format!(
                "density operator trace {:.12} + {:.3e}i is not 1",
                tr.re, tr.im
            )));
        }
        if !matrix.is_psd(PSD_TOL)? {
            return Err(Error::validation(
                "density operator has a significantly negative eigenvalue",
            ));
        }
        Ok(DensityOperator { matrix })
    }

    /// Pure state `|ψ⟩⟨ψ|` from a (not necessarily normalized) nonzero
    /// amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let matrix = ComplexMatrix::outer_normalized(amplitudes)?;
        Self::new(matrix)
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Von Neumann entropy in bits, `−Σ λ log₂ λ`.
    ///
    /// Eigenvalues are clipped into `[0, 1]` before the logarithm so the
    /// harmless negative roundoff a valid state may carry (bounded by the
    /// construction tolerance) cannot produce NaNs.
    pub fn von_neumann_entropy(&self) -> f64 {
        let spectrum = self
            .matrix
            .hermitian_eig()
            .expect("density operators are Hermitian by construction");
        let mut h = 0.0;
        for &lambda in &spectrum.eigenvalues {
            let l = lambda.clamp(0.0, 1.0);
            if l > 0.0 {
                h -= l * l.log2();
            }
        }
        h
    }
}

/// A completely positive trace-preserving map in Kraus form:
/// `ρ ↦ Σ_k K_k ρ K_k†` with `Σ_k K_k† K_k = I`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates a set of Kraus operators.
    ///
    /// All operators must share one shape and satisfy the trace-preservation
    /// identity within `1e-10` in Frobenius norm.
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::validation("a channel needs at least one Kraus operator"))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus_ops
            .iter()
            .any(|k| k.rows() != out_dim || k.cols() != in_dim)
        {
            return Err(Error::validation(
                "all Kraus operators must have the same shape",
            ));
        }
        let mut sum = ComplexMatrix::zeros(in_dim, in_dim);
        for k in &kraus_ops {
            sum = sum.add(&k.adjoint().mul(k)?)?;
        }
        let defect = sum.sub(&ComplexMatrix::identity(in_dim))?.frobenius_norm();
        if defect > TRACE_PRESERVATION_TOL {
            return Err(Error::validation(format!(
                "Kraus operators are not trace preserving (‖ΣK†K − I‖_F = {:.3e})",
                defect
            )));
        }
        Ok(KrausChannel {
            in_dim,
            out_dim,
            kraus_ops,
        })
    }

    /// Input dimension.
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    /// Output dimension.
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// The Kraus operators.
    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// Applies the channel to one state.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        DensityOperator::new(self.apply_matrix(rho.matrix())?)
    }

    /// Channel action on a raw matrix, without re-validating the output.
    ///
    /// Used internally where the output feeds straight into further tensor
    /// assembly and is validated once at the end.
    fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.in_dim || rho.cols() != self.in_dim {
            return Err(Error::validation(format!(
                "channel expects {0}x{0} input, got {1}x{2}",
                self.in_dim,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus_ops {
            out = out.add(&k.mul(rho)?.mul(&k.adjoint())?)?;
        }
        Ok(out)
    }

    /// Sends each symbol state through an independent channel use and
    /// returns the tensor product of the outputs, first symbol on the most
    /// significant tensor slot.
    ///
    /// Errors on an empty symbol list and propagates the Kronecker size
    /// guard for overlong blocks.
    pub fn apply_product(&self, symbols: &[DensityOperator]) -> Result<DensityOperator> {
        let first = symbols
            .first()
            .ok_or_else(|| Error::validation("apply_product requires at least one symbol"))?;
        let mut block = self.apply_matrix(first.matrix())?;
        for rho in &symbols[1..] {
            block = block.kron(&self.apply_matrix(rho.matrix())?)?;
        }
        DensityOperator::new(block)
    }
}

/// A finite ensemble of states with prior probabilities.
#[derive(Clone, Debug)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    /// Validates priors (nonnegative, summing to one within `1e-12`) and a
    /// matching list of equal-dimension states.
    pub fn new(priors: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if priors.is_empty() || priors.len() != states.len() {
            return Err(Error::validation(
                "ensemble needs equally many priors and states, at least one each",
            ));
        }
        if priors.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::validation("priors must be finite and nonnegative"));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(Error::validation(format!(
                "priors sum to {:.15}, not 1",
                total
            )));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::validation(
                "ensemble states must share one dimension",
            ));
        }
        Ok(Ensemble { priors, states })
    }

    /// Uniform ensemble over the given states.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let m = states.len();
        if m == 0 {
            return Err(Error::validation("ensemble needs at least one state"));
        }
        Self::new(vec![1.0 / m as f64; m], states)
    }

    /// Prior probabilities.
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Ensemble states.
    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// Number of ensemble members.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false: ensembles are validated non-empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Common state dimension.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

/// The qubit amplitude damping channel with decay probability `γ ∈ [0, 1]`.
///
/// Kraus form: `K₀ = [[1, 0], [0, √(1−γ)]]`, `K₁ = [[0, √γ], [0, 0]]`.
/// At `γ = 0` the channel is the identity; at `γ = 1` it resets every input
/// to the ground state.
pub fn adc(gamma: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::validation(format!(
            "damping probability must lie in [0, 1], got {gamma}"
        )));
    }
    let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?;
    let k1 = ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0])?;
    KrausChannel::new(vec![k0, k1])
}

/// Binary entropy `H(p) = −p log₂ p − (1−p) log₂(1−p)` in bits, with the
/// continuous extension `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(format!(
            "binary entropy argument must lie in [0, 1], got {p}"
        )));
    }
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    Ok(h)
}

/// Crossover probability of the binary symmetric channel induced by sending
/// `|±⟩` through amplitude damping and measuring in the `|±⟩` basis:
/// `ε(γ) = (1 − √(1−γ))/2`.
pub fn eps_bsc(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::validation(format!(
            "damping probability must lie in [0, 1], got {gamma}"
        )));
    }
    Ok((1.0 - (1.0 - gamma).sqrt()) / 2.0)
}

/// The `|+⟩, |−⟩` ensemble with uniform priors.
///
/// These two states maximize the single-copy distinguishability of any
/// binary ensemble through amplitude damping, which makes them the signal
/// states behind every induced-BSC computation in the crate.
pub fn pm_states() -> Ensemble {
    let plus = DensityOperator::new(
        ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).expect("static shape"),
    )
    .expect("|+⟩⟨+| is a valid state");
    let minus = DensityOperator::new(
        ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, 0.5]).expect("static shape"),
    )
    .expect("|−⟩⟨−| is a valid state");
    Ensemble::new(vec![0.5, 0.5], vec![plus, minus]).expect("uniform pair")
}

/// Holevo information `χ = S(Σ p_i N(ρ_i)) − Σ p_i S(N(ρ_i))` in bits of an
/// ensemble sent through a channel.
pub fn holevo_information(ensemble: &Ensemble, channel: &KrausChannel) -> Result<f64> {
    if ensemble.dim() != channel.in_dim() {
        return Err(Error::validation(format!(
            "ensemble dimension {} does not match channel input dimension {}",
            ensemble.dim(),
            channel.in_dim()
        )));
    }
    let outputs: Vec<DensityOperator> = ensemble
        .states()
        .iter()
        .map(|s| channel.apply(s))
        .collect::<Result<_>>()?;
    let mut avg = ComplexMatrix::zeros(channel.out_dim(), channel.out_dim());
    let mut conditional = 0.0;
    for (p, out) in ensemble.priors().iter().zip(&outputs) {
        avg = avg.add(&out.matrix().scale_re(*p))?;
        conditional += p * out.von_neumann_entropy();
    }
    let avg = DensityOperator::new(avg)?;
    Ok(avg.von_neumann_entropy() - conditional)
}

/// Objective whose maximum over the excited-state population `p` is the
/// Holevo capacity of amplitude damping:
/// `f(p) = H((1−γ)p) − H((1 + √(1 − 4(1−γ)γp²))/2)`.
fn chi_objective(gamma: f64, p: f64) -> f64 {
    let surv = (1.0 - gamma) * p;
    // The discriminant is nonnegative for all γ, p ∈ [0, 1]; max(0, ·)
    // absorbs roundoff at the γ = 1/2, p = 1 corner where it vanishes.
    let disc = (1.0 - 4.0 * (1.0 - gamma) * gamma * p * p).max(0.0);
    let h_out = binary_entropy(surv).expect("argument in [0, 1] by construction");
    let h_cond =
        binary_entropy((1.0 + disc.sqrt()) / 2.0).expect("argument in [1/2, 1] by construction");
    h_out - h_cond
}

/// Holevo capacity of the amplitude damping channel and the optimizing
/// excited-state population: returns `(χ(γ), p*)`.
///
/// The objective is maximized by a `1e-3` grid scan (which removes any
/// unimodality assumption) followed by golden-section refinement of the
/// best grid cell down to a `1e-10` bracket.
pub fn holevo_chi_adc(gamma: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::validation(format!(
            "damping probability must lie in [0, 1], got {gamma}"
        )));
    }
    const GRID_STEP: f64 = 1e-3;
    const BRACKET_TOL: f64 = 1e-10;

    let cells = (1.0 / GRID_STEP) as usize;
    let mut best_idx = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for idx in 0..=cells {
        let p = (idx as f64 * GRID_STEP).min(1.0);
        let v = chi_objective(gamma, p);
        if v > best_val {
            best_val = v;
            best_idx = idx;
        }
    }

    let mut lo = (best_idx.saturating_sub(1)) as f64 * GRID_STEP;
    let mut hi = ((best_idx + 1) as f64 * GRID_STEP).min(1.0);
    // Golden-section search on the bracketing cell pair.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = chi_objective(gamma, a);
    let mut fb = chi_objective(gamma, b);
    while hi - lo > BRACKET_TOL {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = chi_objective(gamma, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = chi_objective(gamma, b);
        }
    }
    let p_star = 0.5 * (lo + hi);
    Ok((chi_objective(gamma, p_star), p_star))
}

/// The Holevo-capacity-achieving binary ensemble for amplitude damping at
/// the given `γ`, with uniform priors.
///
/// Both states have excited-state population `p*` (the maximizer from
/// [`holevo_chi_adc`]) and coherences of opposite sign:
/// `ρ_± = [[1−p*, ±√((1−p*)p*)], [±√((1−p*)p*), p*]]`.
pub fn chi_states(gamma: f64) -> Result<Ensemble> {
    let (_, p_star) = holevo_chi_adc(gamma)?;
    let off = ((1.0 - p_star) * p_star).sqrt();
    let rho = |sign: f64| {
        DensityOperator::new(
            ComplexMatrix::from_real(2, 2, &[1.0 - p_star, sign * off, sign * off, p_star])
                .expect("static shape"),
        )
    };
    Ensemble::new(vec![0.5, 0.5], vec![rho(1.0)?, rho(-1.0)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(entries: &[f64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, entries).unwrap()
    }

    #[test]
    fn density_operator_rejects_bad_trace_and_negativity() {
        assert!(DensityOperator::new(mat(&[0.6, 0.0, 0.0, 0.6])).is_err());
        // Hermitian, unit trace, but indefinite.
        assert!(DensityOperator::new(mat(&[1.2, 0.0, 0.0, -0.2])).is_err());
        // Non-Hermitian.
        assert!(DensityOperator::new(mat(&[0.5, 0.3, 0.0, 0.5])).is_err());
        assert!(DensityOperator::new(mat(&[0.5, 0.2, 0.2, 0.5])).is_ok());
    }

    #[test]
    fn pure_state_normalizes_amplitudes() {
        let rho =
            DensityOperator::pure(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.36).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - 0.64).abs() < 1e-15);
    }

    #[test]
    fn adc_action_matches_closed_form() {
        // On ρ = [[a, b], [b̄, d]] the channel yields
        // [[a + γd, b√(1−γ)], [b̄√(1−γ), (1−γ)d]].
        let gamma = 0.3;
        let channel = adc(gamma).unwrap();
        let rho = DensityOperator::new(mat(&[0.25, 0.1, 0.1, 0.75])).unwrap();
        let out = channel.apply(&rho).unwrap();
        let s = (1.0 - gamma).sqrt();
        assert!((out.matrix()[(0, 0)].re - (0.25 + gamma * 0.75)).abs() < 1e-14);
        assert!((out.matrix()[(0, 1)].re - 0.1 * s).abs() < 1e-14);
        assert!((out.matrix()[(1, 1)].re - (1.0 - gamma) * 0.75).abs() < 1e-14);
    }

    #[test]
    fn adc_endpoints_are_identity_and_reset() {
        let rho = DensityOperator::new(mat(&[0.25, 0.1, 0.1, 0.75])).unwrap();
        let id_out = adc(0.0).unwrap().apply(&rho).unwrap();
        assert!(id_out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let reset_out = adc(1.0).unwrap().apply(&rho).unwrap();
        let ground = mat(&[1.0, 0.0, 0.0, 0.0]);
        assert!(reset_out.matrix().max_abs_diff(&ground) < 1e-15);
    }

    #[test]
    fn adc_rejects_out_of_range_gamma() {
        assert!(adc(-0.1).is_err());
        assert!(adc(1.1).is_err());
        assert!(adc(f64::NAN).is_err());
    }

    #[test]
    fn kraus_constructor_rejects_non_trace_preserving_sets() {
        let half = mat(&[0.5, 0.0, 0.0, 0.5]);
        assert!(KrausChannel::new(vec![half]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn apply_product_is_tensor_of_single_uses() {
        let gamma = 0.4;
        let channel = adc(gamma).unwrap();
        let states = pm_states();
        let plus = &states.states()[0];
        let minus = &states.states()[1];
        let joint = channel
            .apply_product(&[plus.clone(), minus.clone()])
            .unwrap();
        let single_p = channel.apply(plus).unwrap();
        let single_m = channel.apply(minus).unwrap();
        let tensor = single_p.matrix().kron(single_m.matrix()).unwrap();
        assert!(joint.matrix().max_abs_diff(&tensor) < 1e-14);
        assert_eq!(joint.dim(), 4);
    }

    #[test]
    fn entropy_of_pure_and_maximally_mixed_states() {
        let pure = DensityOperator::new(mat(&[0.5, 0.5, 0.5, 0.5])).unwrap();
        assert!(pure.von_neumann_entropy().abs() < 1e-10);
        let mixed = DensityOperator::new(mat(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert!((mixed.von_neumann_entropy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_known_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        // H(0.11) — a standard table value.
        assert!((binary_entropy(0.11).unwrap() - 0.499916).abs() < 1e-6);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn eps_bsc_known_values() {
        assert_eq!(eps_bsc(0.0).unwrap(), 0.0);
        assert!((eps_bsc(1.0).unwrap() - 0.5).abs() < 1e-15);
        // γ = 1/2: (1 − 1/√2)/2.
        let expected = (1.0 - std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        assert!((eps_bsc(0.5).unwrap() - expected).abs() < 1e-16);
        assert!(eps_bsc(0.75).unwrap() < 0.5);
    }

    #[test]
    fn pm_states_survive_damping_with_shrunk_coherence() {
        let gamma = 0.36;
        let channel = adc(gamma).unwrap();
        let out = channel.apply(&pm_states().states()[0]).unwrap();
        // Output: [[(1+γ)/2, √(1−γ)/2], [√(1−γ)/2, (1−γ)/2]].
        assert!((out.matrix()[(0, 0)].re - (1.0 + gamma) / 2.0).abs() < 1e-14);
        assert!((out.matrix()[(0, 1)].re - (1.0 - gamma).sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn holevo_information_vanishes_for_identical_states() {
        let channel = adc(0.3).unwrap();
        let rho = DensityOperator::new(mat(&[0.5, 0.2, 0.2, 0.5])).unwrap();
        let ens = Ensemble::new(vec![0.5, 0.5], vec![rho.clone(), rho]).unwrap();
        assert!(holevo_information(&ens, &channel).unwrap().abs() < 1e-12);
    }

    #[test]
    fn holevo_information_of_pm_through_identity_is_one_bit() {
        let channel = adc(0.0).unwrap();
        let chi = holevo_information(&pm_states(), &channel).unwrap();
        assert!((chi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chi_endpoints() {
        let (chi0, _) = holevo_chi_adc(0.0).unwrap();
        assert!((chi0 - 1.0).abs() < 1e-9, "noiseless qubit carries one bit");
        let (chi1, _) = holevo_chi_adc(1.0).unwrap();
        assert!(chi1.abs() < 1e-12, "full damping carries nothing");
    }

    #[test]
    fn chi_is_monotone_on_a_coarse_grid() {
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let gamma = i as f64 / 10.0;
            let (chi, p_star) = holevo_chi_adc(gamma).unwrap();
            assert!(chi <= prev + 1e-12, "χ must not increase with damping");
            assert!((0.0..=1.0).contains(&p_star));
            prev = chi;
        }
    }

    #[test]
    fn chi_states_reproduce_the_capacity_objective() {
        // The defining property of the optimal ensemble: its Holevo
        // information through the channel equals χ(γ).
        for &gamma in &[0.1, 0.45, 0.8] {
            let (chi, _) = holevo_chi_adc(gamma).unwrap();
            let ens = chi_states(gamma).unwrap();
            let info = holevo_information(&ens, &adc(gamma).unwrap()).unwrap();
            assert!(
                (info - chi).abs() < 1e-9,
                "γ = {gamma}: ensemble information {info} vs χ {chi}"
            );
        }
    }

    #[test]
    fn chi_states_differ_from_pm_states_away_from_zero_damping() {
        let ens = chi_states(0.5).unwrap();
        let pm = pm_states();
        let diff = ens.states()[0]
            .matrix()
            .max_abs_diff(pm.states()[0].matrix());
        assert!(
            diff > 1e-3,
            "optimal population shifts toward the ground state"
        );
        // At γ = 0 the optimal ensemble is exactly |±⟩.
        let ens0 = chi_states(0.0).unwrap();
        let d0 = ens0.states()[0]
            .matrix()
            .max_abs_diff(pm.states()[0].matrix());
        assert!(d0 < 1e-6);
    }

    #[test]
    fn ensemble_validation() {
        let rho = DensityOperator::new(mat(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert!(Ensemble::new(vec![0.6, 0.6], vec![rho.clone(), rho.clone()]).is_err());
        assert!(Ensemble::new(vec![1.0], vec![rho.clone(), rho.clone()]).is_err());
        assert!(Ensemble::new(vec![-0.5, 1.5], vec![rho.clone(), rho.clone()]).is_err());
        assert!(Ensemble::uniform(vec![rho.clone(), rho]).is_ok());
    }
}
