//! Measurements and decoders: POVMs, symbol-by-symbol maximum-likelihood
//! decoding, the pretty good measurement, and a certified solver for the
//! optimal collective measurement.
//!
//! The solver question underneath everything here: given the `M` block
//! outputs a code produces through the channel, which measurement maximizes
//! the average probability of identifying the transmitted message? Two
//! decoders are evaluated exactly:
//!
//! * **individual** — measure each symbol separately with a fixed one-qubit
//!   POVM, then decode the classical outcome string by maximum likelihood;
//! * **collective** — a single POVM on the whole block, optimized
//!   numerically by a fixed-point iteration and certified against the
//!   Holevo–Yuen–Kennedy–Lax optimality conditions.
//!
//! The certification is what makes the numerics trustworthy: for any
//! returned POVM the residual bounds its distance from true optimality, so
//! a strict success-probability gap between the two decoders can be
//! asserted rather than eyeballed.

use crate::channel::{DensityOperator, Ensemble, KrausChannel};
use crate::codes::LinearCode;
use crate::linalg::{ComplexMatrix, HermitianSpectrum};
use crate::{Error, Result};

/// Tolerance on the Hermiticity defect of each POVM element.
const ELEMENT_HERMITICITY_TOL: f64 = 1e-9;

/// Tolerance on negative eigenvalues of POVM elements.
const ELEMENT_PSD_TOL: f64 = 1e-8;

/// Tolerance on `‖Σ_m Λ_m − I‖_F`.
const COMPLETENESS_TOL: f64 = 1e-8;

/// Tolerance on `|Σ priors − 1|`.
const PRIOR_TOL: f64 = 1e-12;

/// Tolerance on row sums of transition matrices.
const DMC_ROW_TOL: f64 = 1e-10;

/// Equality tolerance for likelihood comparisons in ML decoding. Products
/// of identical probability factors taken in different orders can differ by
/// a few ulps; treating likelihoods this close as tied (and resolving the
/// tie toward the smallest message index) keeps decoding deterministic and
/// exact for symmetric codes.
const LIKELIHOOD_TIE_TOL: f64 = 1e-12;

/// Cap on the number of classical outcome sequences enumerated by the
/// symbol-by-symbol decoders.
pub const MAX_OUTCOME_SEQUENCES: u64 = 1 << 20;

/// Iteration budget for the fixed-point measurement solver.
const MAX_SOLVER_ITERATIONS: usize = 100_000;

/// Relative eigenvalue cutoff deciding the numerical support of a positive
/// semidefinite matrix when inverting it.
const SUPPORT_CUTOFF: f64 = 1e-12;

/// Pairwise-comparison tolerance for the solver's exact special cases
/// (orthogonal pure outputs, identical outputs).
const DETECTION_TOL: f64 = 1e-12;

/// A positive operator-valued measure: Hermitian PSD elements summing to
/// the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    /// Validates a list of POVM elements.
    ///
    /// Each element must be square of a common dimension, Hermitian within
    /// `1e-9`, and PSD within `1e-8`; the sum must equal the identity
    /// within `1e-8` in Frobenius norm.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::validation("a POVM needs at least one element"))?;
        if !first.is_square() {
            return Err(Error::validation("POVM elements must be square"));
        }
        let dim = first.rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (idx, e) in elements.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::validation(format!(
                    "POVM element {idx} has shape {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let defect = e.hermiticity_defect();
            if defect > ELEMENT_HERMITICITY_TOL {
                return Err(Error::validation(format!(
                    "POVM element {idx} is not Hermitian (defect {defect:.3e})"
                )));
            }
            if !e.hermitian_part().is_psd(ELEMENT_PSD_TOL)? {
                return Err(Error::validation(format!(
                    "POVM element {idx} has a significantly negative eigenvalue"
                )));
            }
            sum = sum.add(e)?;
        }
        let defect = sum.sub(&ComplexMatrix::identity(dim))?.frobenius_norm();
        if defect > COMPLETENESS_TOL {
            return Err(Error::validation(format!(
                "POVM elements sum to identity only within {defect:.3e} — not a measurement"
            )));
        }
        Ok(Povm { dim, elements })
    }

    /// Dimension the POVM acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false: POVMs are validated non-empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measurement elements.
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// The `{|+⟩⟨+|, |−⟩⟨−|}` projective measurement on one qubit.
///
/// Together with the `|±⟩` signal states it turns each amplitude damping
/// use into a binary symmetric channel with crossover
/// [`crate::channel::eps_bsc`]; it is also the optimal single-copy
/// discriminator for those states at every damping level.
pub fn pm_povm() -> Povm {
    let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).expect("static shape");
    let minus = ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, 0.5]).expect("static shape");
    Povm::new(vec![plus, minus]).expect("projectors onto an orthonormal basis")
}

/// A discrete memoryless channel as a row-stochastic transition matrix:
/// `prob(x, y)` is the probability of output `y` given input `x`.
#[derive(Clone, Debug)]
pub struct Dmc {
    probs: Vec<Vec<f64>>,
}

impl Dmc {
    /// Validates a transition matrix: rectangular, entries in `[0, 1]`
    /// (negative roundoff down to `-1e-9` is clamped to zero), rows
    /// summing to one within `1e-10`.
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() || probs[0].is_empty() {
            return Err(Error::validation("transition matrix must be nonempty"));
        }
        let out_size = probs[0].len();
        if probs.iter().any(|row| row.len() != out_size) {
            return Err(Error::validation(
                "transition matrix rows must have equal length",
            ));
        }
        let mut clamped = probs;
        for row in &mut clamped {
            let mut total = 0.0;
            for p in row.iter_mut() {
                if !p.is_finite() || *p < -1e-9 || *p > 1.0 + 1e-9 {
                    return Err(Error::validation(format!(
                        "transition probability {p} outside [0, 1]"
                    )));
                }
                *p = p.clamp(0.0, 1.0);
                total += *p;
            }
            if (total - 1.0).abs() > DMC_ROW_TOL {
                return Err(Error::validation(format!(
                    "transition matrix row sums to {total:.15}, not 1"
                )));
            }
        }
        Ok(Dmc { probs: clamped })
    }

    /// The symmetric `q`-ary channel: the input survives with probability
    /// `1 − (q−1)·delta` and flips to each specific other symbol with
    /// probability `delta`.
    pub fn symmetric(q: u8, delta: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::validation("symmetric channel needs q ≥ 2"));
        }
        let qf = q as f64;
        if !(0.0..=1.0 / qf).contains(&delta) {
            return Err(Error::validation(format!(
                "per-symbol flip probability must lie in [0, 1/{q}], got {delta}"
            )));
        }
        let keep = 1.0 - (qf - 1.0) * delta;
        let probs = (0..q)
            .map(|x| (0..q).map(|y| if x == y { keep } else { delta }).collect())
            .collect();
        Self::new(probs)
    }

    /// The binary symmetric channel with crossover probability `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        Self::symmetric(2, eps)
    }

    /// Number of input symbols.
    pub fn in_size(&self) -> usize {
        self.probs.len()
    }

    /// Number of output symbols.
    pub fn out_size(&self) -> usize {
        self.probs[0].len()
    }

    /// Transition probability `P(y | x)`.
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x][y]
    }

    /// Transition rows.
    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }
}

/// Output of the optimal-measurement solver: the measurement, its average
/// success probability, the optimality-condition residual certifying it,
/// and the iterations spent.
#[derive(Clone, Debug)]
pub struct DiscriminationResult {
    /// The discriminating measurement.
    pub povm: Povm,
    /// Average success probability under the given priors.
    pub success_probability: f64,
    /// Optimality certificate from [`hykl_residual`]; at most the requested
    /// tolerance for converged solves.
    pub hykl_residual: f64,
    /// Fixed-point iterations performed (zero when an exact special case
    /// applied).
    pub iterations: usize,
}

/// Certificate tolerance used by default for a given operator dimension:
/// `1e-7` up to dimension 16, `1e-6` beyond.
pub fn default_tol(dim: usize) -> f64 {
    if dim <= 16 {
        1e-7
    } else {
        1e-6
    }
}

fn validate_priors(priors: &[f64], count: usize) -> Result<()> {
    if priors.len() != count {
        return Err(Error::validation(format!(
            "got {} priors for {} states",
            priors.len(),
            count
        )));
    }
    if priors.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::validation("priors must be finite and nonnegative"));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_TOL {
        return Err(Error::validation(format!(
            "priors sum to {total:.15}, not 1"
        )));
    }
    Ok(())
}

fn validate_states_dim(states: &[DensityOperator], dim: usize) -> Result<()> {
    if states.iter().any(|s| s.dim() != dim) {
        return Err(Error::validation(
            "states must share the measurement dimension",
        ));
    }
    Ok(())
}

/// Average success probability `Σ_m priors_m · tr(Λ_m ρ_m)` of guessing
/// which of the `states` was prepared, using outcome `m` as the guess.
///
/// The POVM must have exactly one element per state. Roundoff is clamped
/// into `[0, 1]`; values outside by more than `1e-7` (far beyond anything
/// validated inputs can produce) are rejected as evidence of a broken
/// input.
pub fn success_prob(povm: &Povm, states: &[DensityOperator], priors: &[f64]) -> Result<f64> {
    if povm.len() != states.len() {
        return Err(Error::validation(format!(
            "POVM has {} outcomes for {} states",
            povm.len(),
            states.len()
        )));
    }
    validate_priors(priors, states.len())?;
    validate_states_dim(states, povm.dim())?;
    let mut total = 0.0;
    for ((element, state), &p) in povm.elements().iter().zip(states).zip(priors) {
        total += p * element.trace_product(state.matrix())?.re;
    }
    if !(-1e-7..=1.0 + 1e-7).contains(&total) {
        return Err(Error::validation(format!(
            "success probability {total} outside [0, 1] beyond numerical slack"
        )));
    }
    Ok(total.clamp(0.0, 1.0))
}

/// The classical channel induced by sending each ensemble state through
/// the quantum channel and measuring with the given POVM:
/// `P(y | x) = tr(Λ_y N(ρ_x))`.
pub fn induced_dmc(states: &Ensemble, povm: &Povm, channel: &KrausChannel) -> Result<Dmc> {
    if states.dim() != channel.in_dim() {
        return Err(Error::validation(format!(
            "ensemble dimension {} does not match channel input dimension {}",
            states.dim(),
            channel.in_dim()
        )));
    }
    if povm.dim() != channel.out_dim() {
        return Err(Error::validation(format!(
            "POVM dimension {} does not match channel output dimension {}",
            povm.dim(),
            channel.out_dim()
        )));
    }
    let mut probs = Vec::with_capacity(states.len());
    for state in states.states() {
        let out = channel.apply(state)?;
        let row = povm
            .elements()
            .iter()
            .map(|e| e.trace_product(out.matrix()).map(|z| z.re))
            .collect::<Result<Vec<f64>>>()?;
        probs.push(row);
    }
    Dmc::new(probs)
}

/// Block outputs of a code: for each message, the tensor product of the
/// per-symbol channel outputs `N(ρ_{x_m,1}) ⊗ … ⊗ N(ρ_{x_m,n})`.
///
/// The ensemble supplies the modulation: symbol `s` is transmitted as
/// `states[s]`, so the ensemble must carry exactly `q` states.
pub fn code_outputs(
    code: &LinearCode,
    states: &Ensemble,
    channel: &KrausChannel,
) -> Result<Vec<DensityOperator>> {
    if states.len() != code.q() as usize {
        return Err(Error::validation(format!(
            "code over q = {} symbols needs {} modulation states, got {}",
            code.q(),
            code.q(),
            states.len()
        )));
    }
    code.codewords()
        .iter()
        .map(|word| {
            let symbols: Vec<DensityOperator> = word
                .symbols()
                .iter()
                .map(|&s| states.states()[s as usize].clone())
                .collect();
            channel.apply_product(&symbols)
        })
        .collect()
}

/// Decodes likelihood rows to the ML message: the smallest index whose
/// likelihood is within [`LIKELIHOOD_TIE_TOL`] of the maximum.
pub(crate) fn ml_winner(likelihoods: &[f64]) -> usize {
    let best = likelihoods
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    likelihoods
        .iter()
        .position(|&l| l >= best - LIKELIHOOD_TIE_TOL)
        .expect("a maximum always exists")
}

/// Iterates all length-`n` outcome sequences over `radix` symbols in
/// lexicographic order, calling `visit` with each sequence.
pub(crate) fn for_each_sequence(
    radix: usize,
    n: usize,
    mut visit: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let total = (radix as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_OUTCOME_SEQUENCES)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "{radix}^{n} outcome sequences exceed the {MAX_OUTCOME_SEQUENCES} limit"
            ))
        })?;
    let mut seq = vec![0usize; n];
    for _ in 0..total {
        visit(&seq)?;
        for slot in (0..n).rev() {
            seq[slot] += 1;
            if seq[slot] < radix {
                break;
            }
            seq[slot] = 0;
        }
    }
    Ok(())
}

/// Per-message likelihoods of an outcome sequence under a transition
/// matrix, written into `out`.
pub(crate) fn sequence_likelihoods(
    words: &[crate::codes::Codeword],
    dmc: &Dmc,
    seq: &[usize],
    out: &mut [f64],
) {
    for (m, word) in words.iter().enumerate() {
        let mut l = 1.0;
        for (&symbol, &y) in word.symbols().iter().zip(seq) {
            l *= dmc.prob(symbol as usize, y);
        }
        out[m] = l;
    }
}

/// The maximum-likelihood block measurement built from a per-symbol POVM:
/// outcome sequences are pooled by their decoded message,
/// `Λ_m = Σ_{y : g(y) = m} Λ_{y_1} ⊗ … ⊗ Λ_{y_n}`,
/// where `g` is ML decoding (uniform message priors, ties to the smallest
/// index) over the induced per-symbol channel.
///
/// This is the block-measurement form of the individual decoder: measuring
/// with it reproduces [`individual_success`] exactly.
pub fn ml_povm(
    code: &LinearCode,
    states: &Ensemble,
    symbol_povm: &Povm,
    channel: &KrausChannel,
) -> Result<Povm> {
    let dmc = induced_dmc(states, symbol_povm, channel)?;
    if states.len() != code.q() as usize {
        return Err(Error::validation(format!(
            "code over q = {} symbols needs {} modulation states, got {}",
            code.q(),
            code.q(),
            states.len()
        )));
    }
    let n = code.n();
    let m_count = code.num_messages();
    let block_dim = symbol_povm
        .dim()
        .checked_pow(n as u32)
        .filter(|&d| d <= crate::linalg::MAX_KRON_DIM)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "block dimension {}^{} exceeds the {} limit",
                symbol_povm.dim(),
                n,
                crate::linalg::MAX_KRON_DIM
            ))
        })?;

    let mut elements = vec![ComplexMatrix::zeros(block_dim, block_dim); m_count];
    let mut likelihoods = vec![0.0; m_count];
    for_each_sequence(symbol_povm.len(), n, |seq| {
        sequence_likelihoods(code.codewords(), &dmc, seq, &mut likelihoods);
        let winner = ml_winner(&likelihoods);
        let mut product = symbol_povm.elements()[seq[0]].clone();
        for &y in &seq[1..] {
            product = product.kron(&symbol_povm.elements()[y])?;
        }
        elements[winner] = elements[winner].add(&product)?;
        Ok(())
    })?;
    Povm::new(elements)
}

/// Success probability of the individual decoder: measure every symbol
/// with `symbol_povm`, then decode the outcome string by maximum
/// likelihood over the induced classical channel (uniform message priors,
/// ties to the smallest index).
///
/// Computed exactly by outcome enumeration,
/// `P = (1/M) Σ_y P(y | x_{g(y)})`.
pub fn individual_success(
    code: &LinearCode,
    states: &Ensemble,
    symbol_povm: &Povm,
    channel: &KrausChannel,
) -> Result<f64> {
    if states.len() != code.q() as usize {
        return Err(Error::validation(format!(
            "code over q = {} symbols needs {} modulation states, got {}",
            code.q(),
            code.q(),
            states.len()
        )));
    }
    let dmc = induced_dmc(states, symbol_povm, channel)?;
    let mut total = 0.0;
    let mut likelihoods = vec![0.0; code.num_messages()];
    for_each_sequence(dmc.out_size(), code.n(), |seq| {
        sequence_likelihoods(code.codewords(), &dmc, seq, &mut likelihoods);
        total += likelihoods[ml_winner(&likelihoods)];
        Ok(())
    })?;
    Ok((total / code.num_messages() as f64).clamp(0.0, 1.0))
}

/// Splits a PSD matrix at its numerical support: returns `f(A)` summed
/// over support eigenvectors (weight `f(λ)`) plus the projector onto the
/// numerical kernel scaled by `kernel_weight`.
fn support_fn_with_kernel(
    spectrum: &HermitianSpectrum,
    cutoff: f64,
    f: impl Fn(f64) -> f64,
    kernel_weight: f64,
) -> ComplexMatrix {
    let n = spectrum.eigenvectors.rows();
    let v = &spectrum.eigenvectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in spectrum.eigenvalues.iter().enumerate() {
        let w = if lambda > cutoff {
            f(lambda)
        } else {
            kernel_weight
        };
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = v[(i, k)] * w;
            for j in 0..n {
                out.add_assign_entry(i, j, vi * v[(j, k)].conj());
            }
        }
    }
    out
}

/// Restores `Σ_m elements_m = I` exactly via the symmetric congruence
/// `Λ_m ← T^{−1/2} Λ_m T^{−1/2}` with `T = Σ_m Λ_m`.
///
/// Support-restricted inverse square roots are computed spectrally, and an
/// eigenvalue sitting near the support cutoff is inverted with poor
/// relative accuracy — for nearly degenerate state families this can drift
/// the element sum away from the identity by far more than roundoff. `T`
/// itself is always a small perturbation of the identity, so this repair
/// is perfectly conditioned, preserves positivity exactly (congruence),
/// and pins completeness back to machine precision.
fn renormalize_to_identity(elements: &mut [ComplexMatrix]) -> Result<()> {
    let dim = elements[0].rows();
    let mut total = ComplexMatrix::zeros(dim, dim);
    for e in elements.iter() {
        total = total.add(e)?;
    }
    let defect = total.sub(&ComplexMatrix::identity(dim))?.frobenius_norm();
    if defect <= 1e-12 {
        return Ok(());
    }
    let spectrum = total.hermitian_part().hermitian_eig()?;
    if spectrum.min_eigenvalue() <= 0.5 {
        return Err(Error::validation(format!(
            "measurement elements sum far from the identity (defect {defect:.3e}); \
             renormalization would not be trustworthy"
        )));
    }
    let w = spectrum.apply_fn(|l| 1.0 / l.sqrt());
    for e in elements.iter_mut() {
        *e = w.mul(e)?.mul(&w)?.hermitian_part();
    }
    Ok(())
}

/// The pretty good measurement of a weighted state family:
/// `Λ_m = S^{−1/2} p_m ρ_m S^{−1/2}` with `S = Σ p_m ρ_m`, the inverse
/// square root taken on the support of `S` and the kernel of `S` (where no
/// state has weight) split uniformly across the outcomes to complete the
/// measurement.
pub fn pgm(states: &[DensityOperator], priors: &[f64]) -> Result<Povm> {
    if states.is_empty() {
        return Err(Error::validation(
            "pretty good measurement needs at least one state",
        ));
    }
    validate_priors(priors, states.len())?;
    let dim = states[0].dim();
    validate_states_dim(states, dim)?;

    let mut s = ComplexMatrix::zeros(dim, dim);
    for (state, &p) in states.iter().zip(priors) {
        s = s.add(&state.matrix().scale_re(p))?;
    }
    let spectrum = s.hermitian_part().hermitian_eig()?;
    let cutoff = spectrum.eigenvalues[0].max(0.0) * SUPPORT_CUTOFF;
    let inv_sqrt = support_fn_with_kernel(&spectrum, cutoff, |l| 1.0 / l.sqrt(), 0.0);
    let kernel = support_fn_with_kernel(&spectrum, cutoff, |_| 0.0, 1.0);
    let kernel_share = kernel.scale_re(1.0 / states.len() as f64);

    let mut elements = Vec::with_capacity(states.len());
    for (state, &p) in states.iter().zip(priors) {
        let weighted = state.matrix().scale_re(p);
        let element = inv_sqrt
            .mul(&weighted)?
            .mul(&inv_sqrt)?
            .hermitian_part()
            .add(&kernel_share)?;
        elements.push(element);
    }
    renormalize_to_identity(&mut elements)?;
    Povm::new(elements)
}

/// Residual of the Holevo–Yuen–Kennedy–Lax optimality conditions for a
/// discrimination POVM: with `R = Σ_m p_m Λ_m ρ_m`, optimality of `Λ` is
/// equivalent to `R` Hermitian and `R − p_m ρ_m ⪰ 0` for every `m`. The
/// residual is the larger of `‖R − R†‖_F` and the worst negative
/// eigenvalue magnitude of the differences; by the dual bound, the gap to
/// the true optimum is at most `dim · residual`.
pub fn hykl_residual(povm: &Povm, states: &[DensityOperator], priors: &[f64]) -> Result<f64> {
    if povm.len() != states.len() {
        return Err(Error::validation(format!(
            "POVM has {} outcomes for {} states",
            povm.len(),
            states.len()
        )));
    }
    validate_priors(priors, states.len())?;
    validate_states_dim(states, povm.dim())?;

    let dim = povm.dim();
    let mut r = ComplexMatrix::zeros(dim, dim);
    for ((element, state), &p) in povm.elements().iter().zip(states).zip(priors) {
        r = r.add(&element.mul(state.matrix())?.scale_re(p))?;
    }
    let herm_defect = r.hermiticity_defect();
    let r_sym = r.hermitian_part();
    let mut worst_negative = 0.0f64;
    for (state, &p) in states.iter().zip(priors) {
        let diff = r_sym.sub(&state.matrix().scale_re(p))?;
        let min_eig = diff.hermitian_part().hermitian_eig()?.min_eigenvalue();
        worst_negative = worst_negative.max(-min_eig);
    }
    Ok(herm_defect.max(worst_negative))
}

/// Raw success probability of candidate elements without POVM validation;
/// used inside the solver loop where elements are valid by construction.
fn raw_success(elements: &[ComplexMatrix], states: &[DensityOperator], priors: &[f64]) -> f64 {
    elements
        .iter()
        .zip(states)
        .zip(priors)
        .map(|((e, s), &p)| p * e.trace_product(s.matrix()).expect("matching dims").re)
        .sum()
}

/// Exact special cases the iterative solver should not be asked to grind
/// through: fully distinguishable families and fully indistinguishable
/// ones.
fn detect_exact_case(
    states: &[DensityOperator],
    priors: &[f64],
) -> Result<Option<Vec<ComplexMatrix>>> {
    let dim = states[0].dim();
    let m = states.len();

    // All outputs pairwise identical: no measurement can help, so guess the
    // most likely message. With uniform priors the uninformative uniform
    // POVM is used instead: it is equally optimal and preserves the
    // permutation symmetry downstream consumers rely on.
    let all_identical = states[1..]
        .iter()
        .all(|s| s.matrix().max_abs_diff(states[0].matrix()) <= DETECTION_TOL);
    if all_identical {
        let uniform_priors = priors
            .iter()
            .all(|&p| (p - 1.0 / m as f64).abs() <= DETECTION_TOL);
        if uniform_priors {
            let share = ComplexMatrix::identity(dim).scale_re(1.0 / m as f64);
            return Ok(Some(vec![share; m]));
        }
        let favorite = priors
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite priors"))
            .map(|(idx, _)| idx)
            .expect("non-empty priors");
        let mut elements = vec![ComplexMatrix::zeros(dim, dim); m];
        elements[favorite] = ComplexMatrix::identity(dim);
        return Ok(Some(elements));
    }

    // All outputs pure and pairwise orthogonal: their own projectors
    // discriminate perfectly; any residual kernel is split uniformly.
    let all_pure = states.iter().all(|s| {
        let purity = s.matrix().trace_product(s.matrix()).expect("square").re;
        (purity - 1.0).abs() <= DETECTION_TOL
    });
    if all_pure && m <= dim {
        let mut orthogonal = true;
        'pairs: for i in 0..m {
            for j in (i + 1)..m {
                let overlap = states[i].matrix().trace_product(states[j].matrix())?.norm();
                if overlap > DETECTION_TOL {
                    orthogonal = false;
                    break 'pairs;
                }
            }
        }
        if orthogonal {
            let mut sum = ComplexMatrix::zeros(dim, dim);
            for s in states {
                sum = sum.add(s.matrix())?;
            }
            let kernel_share = ComplexMatrix::identity(dim)
                .sub(&sum)?
                .scale_re(1.0 / m as f64);
            let elements = states
                .iter()
                .map(|s| s.matrix().add(&kernel_share))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Some(elements));
        }
    }
    Ok(None)
}

/// Finds the measurement maximizing the average success probability of
/// discriminating `states` under `priors`, certified to the requested
/// tolerance.
///
/// Fully distinguishable and fully indistinguishable families are resolved
/// exactly. Everything else runs a fixed-point iteration on the optimality
/// conditions, warm-started at the pretty good measurement: with
/// `G = Σ_m p_m ρ_m Λ_m p_m ρ_m` each step maps
/// `Λ_m ← G^{−1/2} p_m ρ_m Λ_m p_m ρ_m G^{−1/2}`
/// (inverses on the numerical support, kernel split uniformly), which
/// preserves positivity and completeness exactly and has the optimal
/// measurements as fixed points. Steps are damped adaptively if the
/// success probability ever regresses. The iteration stops once
/// [`hykl_residual`] drops to `tol`; exhausting the budget returns
/// [`Error::Convergence`] with the best residual seen.
pub fn optimal_povm(
    states: &[DensityOperator],
    priors: &[f64],
    tol: f64,
) -> Result<DiscriminationResult> {
    if states.is_empty() {
        return Err(Error::validation("discrimination needs at least one state"));
    }
    validate_priors(priors, states.len())?;
    let dim = states[0].dim();
    validate_states_dim(states, dim)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::validation(format!(
            "certificate tolerance must be positive and finite, got {tol}"
        )));
    }

    if let Some(elements) = detect_exact_case(states, priors)? {
        let povm = Povm::new(elements)?;
        let success = success_prob(&povm, states, priors)?;
        let residual = hykl_residual(&povm, states, priors)?;
        return Ok(DiscriminationResult {
            povm,
            success_probability: success,
            hykl_residual: residual,
            iterations: 0,
        });
    }

    let m = states.len();
    let weighted: Vec<ComplexMatrix> = states
        .iter()
        .zip(priors)
        .map(|(s, &p)| s.matrix().scale_re(p))
        .collect();

    let start = pgm(states, priors)?;
    let mut elements: Vec<ComplexMatrix> = start.elements().to_vec();
    let mut success = raw_success(&elements, states, priors);
    let mut damping = 1.0f64;

    let mut best_residual = f64::INFINITY;
    let mut best_elements = elements.clone();
    let mut best_iteration = 0usize;

    for iteration in 1..=MAX_SOLVER_ITERATIONS {
        // D_m = p_m ρ_m Λ_m p_m ρ_m, accumulated into G.
        let mut transformed = Vec::with_capacity(m);
        let mut g = ComplexMatrix::zeros(dim, dim);
        for (r_m, lambda_m) in weighted.iter().zip(&elements) {
            let d_m = r_m.mul(lambda_m)?.mul(r_m)?;
            g = g.add(&d_m)?;
            transformed.push(d_m);
        }
        let spectrum = g.hermitian_part().hermitian_eig()?;
        let cutoff = spectrum.eigenvalues[0].max(0.0) * SUPPORT_CUTOFF;
        let inv_sqrt = support_fn_with_kernel(&spectrum, cutoff, |l| 1.0 / l.sqrt(), 0.0);
        let has_kernel = spectrum.eigenvalues.iter().any(|&l| l <= cutoff);
        let kernel_share = if has_kernel {
            Some(support_fn_with_kernel(&spectrum, cutoff, |_| 0.0, 1.0).scale_re(1.0 / m as f64))
        } else {
            None
        };

        let mut next = Vec::with_capacity(m);
        for d_m in &transformed {
            let mut updated = inv_sqrt.mul(d_m)?.mul(&inv_sqrt)?;
            if let Some(kernel) = &kernel_share {
                updated = updated.add(kernel)?;
            }
            updated = updated.hermitian_part();
            if damping < 1.0 {
                let old = &elements[next.len()];
                updated = old
                    .scale_re(1.0 - damping)
                    .add(&updated.scale_re(damping))?;
            }
            next.push(updated);
        }
        elements = next;
        renormalize_to_identity(&mut elements)?;

        let new_success = raw_success(&elements, states, priors);
        if new_success + 1e-13 < success {
            // A regressing step signals overshoot near a degenerate
            // optimum; damp and keep going.
            damping = (damping * 0.5).max(0.125);
        } else if damping < 1.0 {
            damping = (damping * 1.05).min(1.0);
        }
        success = new_success;

        // Residual checks cost an eigendecomposition per state, so they
        // run every iteration only while convergence is typically fast.
        let check = iteration <= 20 || iteration % 10 == 0;
        if check {
            let povm_candidate = Povm::new(elements.clone())?;
            let residual = hykl_residual(&povm_candidate, states, priors)?;
            if residual < best_residual {
                best_residual = residual;
                best_elements = elements.clone();
                best_iteration = iteration;
            }
            if residual <= tol {
                let success = success_prob(&povm_candidate, states, priors)?;
                return Ok(DiscriminationResult {
                    povm: povm_candidate,
                    success_probability: success,
                    hykl_residual: residual,
                    iterations: iteration,
                });
            }
        }
    }

    let _ = (best_elements, best_iteration);
    Err(Error::Convergence {
        tol,
        iterations: MAX_SOLVER_ITERATIONS,
        best_residual,
    })
}

/// Optimal collective decoding of a code: solves the discrimination
/// problem for the code's block outputs under uniform message priors.
pub fn collective_optimal(
    code: &LinearCode,
    states: &Ensemble,
    channel: &KrausChannel,
    tol: f64,
) -> Result<DiscriminationResult> {
    let outputs = code_outputs(code, states, channel)?;
    let priors = vec![1.0 / outputs.len() as f64; outputs.len()];
    optimal_povm(&outputs, &priors, tol)
}

/// Assertion tolerance for the symmetric-channel structure checks below.
const QSC_STRUCTURE_TOL: f64 = 1e-6;

/// Extracts the flip probability of the symmetric 4-ary channel induced by
/// optimally decoding a four-message code.
///
/// Solves the collective discrimination problem, forms the message-level
/// transition matrix `P(m̂ | m) = tr(Λ_m̂ ρ_m)`, and checks that it has the
/// symmetric-channel shape: all twelve off-diagonal entries equal within
/// `1e-6` and every diagonal entry equal to `1 − 3ε` within `1e-6`, where
/// `ε` is the mean off-diagonal entry. Violations return
/// [`Error::Structure`]; success returns `ε`.
pub fn extract_qsc_eps(
    code: &LinearCode,
    states: &Ensemble,
    channel: &KrausChannel,
    tol: f64,
) -> Result<f64> {
    if code.num_messages() != 4 {
        return Err(Error::validation(format!(
            "symmetric 4-ary extraction needs exactly 4 messages, code has {}",
            code.num_messages()
        )));
    }
    let outputs = code_outputs(code, states, channel)?;
    let priors = vec![0.25; 4];
    let result = optimal_povm(&outputs, &priors, tol)?;

    let mut transition = [[0.0f64; 4]; 4];
    for (m, output) in outputs.iter().enumerate() {
        for (m_hat, element) in result.povm.elements().iter().enumerate() {
            transition[m][m_hat] = element.trace_product(output.matrix())?.re.max(0.0);
        }
    }

    let mut off_min = f64::INFINITY;
    let mut off_max = f64::NEG_INFINITY;
    let mut off_sum = 0.0;
    for (m, row) in transition.iter().enumerate() {
        for (m_hat, &p) in row.iter().enumerate() {
            if m != m_hat {
                off_min = off_min.min(p);
                off_max = off_max.max(p);
                off_sum += p;
            }
        }
    }
    if off_max - off_min > QSC_STRUCTURE_TOL {
        return Err(Error::Structure(format!(
            "off-diagonal transition probabilities spread over [{off_min:.9e}, {off_max:.9e}], \
             not a symmetric channel"
        )));
    }
    let eps = off_sum / 12.0;
    for (m, row) in transition.iter().enumerate() {
        let expected = 1.0 - 3.0 * eps;
        if (row[m] - expected).abs() > QSC_STRUCTURE_TOL {
            return Err(Error::Structure(format!(
                "diagonal transition probability {:.9} deviates from 1 − 3ε = {expected:.9}",
                row[m]
            )));
        }
    }
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{adc, eps_bsc, pm_states};

    fn uniform(m: usize) -> Vec<f64> {
        vec![1.0 / m as f64; m]
    }

    fn pm_outputs(gamma: f64) -> Vec<DensityOperator> {
        let channel = adc(gamma).unwrap();
        pm_states()
            .states()
            .iter()
            .map(|s| channel.apply(s).unwrap())
            .collect()
    }

    #[test]
    fn povm_validation_rejects_incomplete_or_negative_sets() {
        let half = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(Povm::new(vec![half.clone()]).is_err(), "sums to I/2");
        assert!(Povm::new(vec![half.clone(), half]).is_ok());
        let over = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, 1.5]).unwrap();
        let under = ComplexMatrix::from_real(2, 2, &[-0.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(
            Povm::new(vec![over, under]).is_err(),
            "negative elements must be rejected even when the sum is right"
        );
        assert!(Povm::new(vec![]).is_err());
    }

    #[test]
    fn pm_povm_is_a_projective_measurement() {
        let povm = pm_povm();
        assert_eq!(povm.len(), 2);
        for e in povm.elements() {
            let squared = e.mul(e).unwrap();
            assert!(squared.max_abs_diff(e) < 1e-14, "elements are projectors");
        }
    }

    #[test]
    fn dmc_validation_and_symmetric_constructors() {
        assert!(Dmc::new(vec![vec![0.5, 0.4]]).is_err(), "row must sum to 1");
        assert!(
            Dmc::new(vec![vec![1.2, -0.2]]).is_err(),
            "entries must be probabilities"
        );
        let bsc = Dmc::bsc(0.1).unwrap();
        assert_eq!(bsc.prob(0, 0), 0.9);
        assert_eq!(bsc.prob(0, 1), 0.1);
        let qsc = Dmc::symmetric(4, 0.05).unwrap();
        assert!((qsc.prob(2, 2) - 0.85).abs() < 1e-15);
        assert_eq!(qsc.prob(2, 0), 0.05);
        assert!(
            Dmc::symmetric(2, 0.6).is_err(),
            "flip probability beyond 1/q"
        );
    }

    #[test]
    fn induced_dmc_of_pm_states_is_the_expected_bsc() {
        // γ = 0.36 gives crossover exactly 0.1.
        let dmc = induced_dmc(&pm_states(), &pm_povm(), &adc(0.36).unwrap()).unwrap();
        assert_eq!(dmc.in_size(), 2);
        assert_eq!(dmc.out_size(), 2);
        assert!((dmc.prob(0, 1) - 0.1).abs() < 1e-14);
        assert!((dmc.prob(1, 0) - 0.1).abs() < 1e-14);
        assert!((dmc.prob(0, 0) - 0.9).abs() < 1e-14);
    }

    #[test]
    fn success_prob_of_projectors_on_orthogonal_states() {
        let outputs = pm_outputs(0.0);
        let s = success_prob(&pm_povm(), &outputs, &uniform(2)).unwrap();
        assert_eq!(s, 1.0, "undamped |±⟩ are perfectly distinguishable");
    }

    #[test]
    fn success_prob_matches_single_use_crossover() {
        for &gamma in &[0.2, 0.5, 0.8] {
            let outputs = pm_outputs(gamma);
            let s = success_prob(&pm_povm(), &outputs, &uniform(2)).unwrap();
            let expected = 1.0 - eps_bsc(gamma).unwrap();
            assert!(
                (s - expected).abs() < 1e-14,
                "γ = {gamma}: {s} vs {expected}"
            );
        }
    }

    #[test]
    fn ml_povm_of_single_use_is_the_symbol_povm() {
        let code = LinearCode::named("trivial_1").unwrap();
        let povm = ml_povm(&code, &pm_states(), &pm_povm(), &adc(0.3).unwrap()).unwrap();
        assert_eq!(povm.len(), 2);
        for (built, original) in povm.elements().iter().zip(pm_povm().elements()) {
            assert!(built.max_abs_diff(original) < 1e-14);
        }
    }

    #[test]
    fn ml_povm_pools_all_outcome_sequences() {
        let code = LinearCode::named("spc_3_2").unwrap();
        let povm = ml_povm(&code, &pm_states(), &pm_povm(), &adc(0.4).unwrap()).unwrap();
        assert_eq!(povm.len(), 4);
        assert_eq!(povm.dim(), 8);
        // Pooled projectors: each element's trace counts pooled sequences,
        // and all 8 sequences must be pooled somewhere.
        let total: f64 = povm.elements().iter().map(|e| e.trace().re).sum();
        assert!((total - 8.0).abs() < 1e-12);
    }

    #[test]
    fn individual_success_agrees_with_its_block_measurement_form() {
        let code = LinearCode::named("spc_3_2").unwrap();
        let states = pm_states();
        let channel = adc(0.5).unwrap();
        let direct = individual_success(&code, &states, &pm_povm(), &channel).unwrap();
        let block = ml_povm(&code, &states, &pm_povm(), &channel).unwrap();
        let outputs = code_outputs(&code, &states, &channel).unwrap();
        let via_block = success_prob(&block, &outputs, &uniform(4)).unwrap();
        assert!(
            (direct - via_block).abs() < 1e-13,
            "outcome enumeration and block POVM must agree: {direct} vs {via_block}"
        );
    }

    #[test]
    fn individual_success_of_spc_matches_closed_form() {
        // (1−ε)³ + ε(1−ε)²: decode correctly when no symbol flips, or when
        // exactly the unprotected pattern flips — hand-enumerable.
        let code = LinearCode::named("spc_3_2").unwrap();
        for &gamma in &[0.2, 0.5, 0.8] {
            let eps = eps_bsc(gamma).unwrap();
            let expected = (1.0 - eps).powi(3) + eps * (1.0 - eps) * (1.0 - eps);
            let got =
                individual_success(&code, &pm_states(), &pm_povm(), &adc(gamma).unwrap()).unwrap();
            assert!(
                (got - expected).abs() < 1e-14,
                "γ = {gamma}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn pgm_of_orthogonal_pure_states_is_projective() {
        let outputs = pm_outputs(0.0);
        let povm = pgm(&outputs, &uniform(2)).unwrap();
        let s = success_prob(&povm, &outputs, &uniform(2)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pgm_is_strictly_suboptimal_for_damped_pm_states() {
        // The pretty good measurement is a genuine warm start here, not the
        // answer: at γ = 0.5 it must land strictly below the optimum.
        let outputs = pm_outputs(0.5);
        let povm = pgm(&outputs, &uniform(2)).unwrap();
        let s = success_prob(&povm, &outputs, &uniform(2)).unwrap();
        let optimal = 1.0 - eps_bsc(0.5).unwrap();
        assert!(s > 0.5, "still informative");
        assert!(
            optimal - s > 1e-4,
            "PGM {s} should trail the optimum {optimal}"
        );
    }

    #[test]
    fn hykl_residual_certifies_the_known_optimal_measurement() {
        // For damped |±⟩ the ± projectors are exactly optimal, so their
        // residual must vanish to machine precision.
        for &gamma in &[0.2, 0.5, 0.8] {
            let outputs = pm_outputs(gamma);
            let r = hykl_residual(&pm_povm(), &outputs, &uniform(2)).unwrap();
            assert!(r < 1e-14, "γ = {gamma}: residual {r}");
        }
    }

    #[test]
    fn hykl_residual_flags_a_suboptimal_measurement() {
        let outputs = pm_outputs(0.5);
        let povm = pgm(&outputs, &uniform(2)).unwrap();
        let r = hykl_residual(&povm, &outputs, &uniform(2)).unwrap();
        assert!(
            r > 1e-4,
            "suboptimal measurement must carry a visible residual"
        );
    }

    #[test]
    fn optimal_povm_matches_the_single_use_closed_form() {
        for &gamma in &[0.1, 0.5, 0.9] {
            let outputs = pm_outputs(gamma);
            let result = optimal_povm(&outputs, &uniform(2), 1e-10).unwrap();
            let expected = (1.0 + (1.0 - gamma).sqrt()) / 2.0;
            assert!(
                (result.success_probability - expected).abs() < 1e-10,
                "γ = {gamma}"
            );
            assert!(result.hykl_residual <= 1e-10);
        }
    }

    #[test]
    fn optimal_povm_resolves_orthogonal_outputs_exactly() {
        let result = optimal_povm(&pm_outputs(0.0), &uniform(2), 1e-10).unwrap();
        assert_eq!(result.success_probability, 1.0);
        assert_eq!(result.iterations, 0, "handled analytically");
        assert!(result.hykl_residual < 1e-12);
    }

    #[test]
    fn optimal_povm_resolves_identical_outputs_exactly() {
        let result = optimal_povm(&pm_outputs(1.0), &uniform(2), 1e-10).unwrap();
        assert!((result.success_probability - 0.5).abs() < 1e-15);
        assert_eq!(result.iterations, 0);
        assert!(result.hykl_residual < 1e-12);
    }

    #[test]
    fn optimal_povm_guesses_the_likeliest_of_identical_states() {
        let outputs = pm_outputs(1.0);
        let result = optimal_povm(&outputs, &[0.3, 0.7], 1e-10).unwrap();
        assert!((result.success_probability - 0.7).abs() < 1e-15);
        assert!(result.hykl_residual < 1e-12);
    }

    #[test]
    fn optimal_povm_validates_inputs() {
        let outputs = pm_outputs(0.5);
        assert!(optimal_povm(&outputs, &[0.5, 0.6], 1e-8).is_err());
        assert!(optimal_povm(&outputs, &uniform(2), 0.0).is_err());
        assert!(optimal_povm(&[], &[], 1e-8).is_err());
    }

    #[test]
    fn extract_qsc_eps_endpoints() {
        let code = LinearCode::named("spc_3_2").unwrap();
        let states = pm_states();
        let eps0 = extract_qsc_eps(&code, &states, &adc(0.0).unwrap(), 1e-8).unwrap();
        assert!(eps0.abs() < 1e-12, "noiseless blocks decode perfectly");
        let eps1 = extract_qsc_eps(&code, &states, &adc(1.0).unwrap(), 1e-8).unwrap();
        assert!(
            (eps1 - 0.25).abs() < 1e-12,
            "full damping erases everything"
        );
    }

    #[test]
    fn extract_qsc_eps_requires_four_messages() {
        let code = LinearCode::named("trivial_1").unwrap();
        let err = extract_qsc_eps(&code, &pm_states(), &adc(0.3).unwrap(), 1e-7).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn default_tol_tiers() {
        assert_eq!(default_tol(2), 1e-7);
        assert_eq!(default_tol(16), 1e-7);
        assert_eq!(default_tol(17), 1e-6);
        assert_eq!(default_tol(128), 1e-6);
    }
}
