//! Exact decoding probabilities and finite-blocklength bounds for symmetric
//! classical channels, plus the capacity comparison between the two
//! decoding architectures.
//!
//! The individual decoder turns each block of channel uses into a classical
//! symmetric channel, so classical coding theory applies verbatim: this
//! module evaluates exact maximum-likelihood success probabilities by
//! outcome enumeration, a sphere-packing-style converse that upper-bounds
//! every `(n, M)_q` code, and a random-coding lower bound on the average
//! code. The same machinery feeds the asymptotic comparison: the binary
//! channel each qubit induces versus the 4-ary channel a jointly decoded
//! three-qubit block induces.

use crate::channel::{adc, binary_entropy, eps_bsc, pm_states};
use crate::codes::{Codeword, LinearCode};
use crate::measurement::{
    default_tol, extract_qsc_eps, for_each_sequence, ml_winner, sequence_likelihoods, Dmc,
};
use crate::{Error, Result};

/// Largest block length accepted by the bound evaluations; binomials are
/// evaluated through log-gamma, which is comfortably accurate in this
/// range.
pub const MAX_BOUND_N: usize = 64;

/// Which bound a [`BoundResult`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Upper bound: no `(n, M)_q` code can decode better.
    ConverseUpper,
    /// Lower bound: the expected success of a uniformly random codebook,
    /// so some code does at least this well.
    RcbLower,
}

/// A bound value together with the parameters it was evaluated at.
#[derive(Clone, Debug)]
pub struct BoundResult {
    /// The bound on the average ML success probability.
    pub value: f64,
    /// Bound direction.
    pub kind: BoundKind,
    /// Block length.
    pub n: usize,
    /// Number of messages.
    pub m: u64,
    /// Channel alphabet size.
    pub q: u8,
    /// Channel error parameter (see the constructors for which
    /// parameterization each bound uses).
    pub eps: f64,
}

/// Capacities of the two induced channels at one damping level, in the
/// units native to each: bits per channel use for the binary channel and
/// 4-ary symbols per block for the jointly decoded one.
#[derive(Clone, Debug)]
pub struct CapacityPair {
    /// Damping probability.
    pub gamma: f64,
    /// Capacity of the per-qubit binary symmetric channel, bits/use.
    pub c_bsc: f64,
    /// Capacity of the induced symmetric 4-ary channel, log₄ units per
    /// three-qubit block (multiply by 2/3 for bits per channel use).
    pub c_qsc: f64,
}

/// `ln C(n, k)` via log-gamma.
fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

/// `C(n, k)` as a float; exact (rounded) whenever the value is below 2⁵³.
fn binomial(n: u64, k: u64) -> f64 {
    let v = ln_binomial(n, k).exp();
    if v < 9.0e15 {
        v.round()
    } else {
        v
    }
}

fn validate_bound_params(n: usize, m: u64, q: u8) -> Result<()> {
    if n == 0 || n > MAX_BOUND_N {
        return Err(Error::validation(format!(
            "block length must lie in 1..={MAX_BOUND_N}, got {n}"
        )));
    }
    if q < 2 {
        return Err(Error::validation(format!(
            "alphabet size must be at least 2, got {q}"
        )));
    }
    if m == 0 {
        return Err(Error::validation("a code needs at least one message"));
    }
    let capacity = (q as f64).powi(n as i32);
    if m as f64 > capacity {
        return Err(Error::validation(format!(
            "{m} messages do not fit in {q}^{n} codewords"
        )));
    }
    Ok(())
}

/// Exact ML success probability of an explicit codebook over a classical
/// channel, computed by enumerating all output sequences:
/// `P = (1/M) Σ_y P(y | x_{g(y)})` with `g` maximum-likelihood decoding
/// under uniform message priors (ties to the smallest message index).
///
/// Codewords may be arbitrary — linearity is not used — which is what the
/// random-coding comparisons need. Symbols index rows of the transition
/// matrix.
pub fn ml_success_words(words: &[Codeword], dmc: &Dmc) -> Result<f64> {
    let first = words
        .first()
        .ok_or_else(|| Error::validation("codebook must contain at least one codeword"))?;
    let n = first.len();
    if n == 0 {
        return Err(Error::validation("codewords must be nonempty"));
    }
    if words.iter().any(|w| w.len() != n) {
        return Err(Error::validation("codewords must share one length"));
    }
    if words
        .iter()
        .any(|w| w.symbols().iter().any(|&s| s as usize >= dmc.in_size()))
    {
        return Err(Error::validation(format!(
            "codeword symbols must index the {} channel inputs",
            dmc.in_size()
        )));
    }
    let mut total = 0.0;
    let mut likelihoods = vec![0.0; words.len()];
    for_each_sequence(dmc.out_size(), n, |seq| {
        sequence_likelihoods(words, dmc, seq, &mut likelihoods);
        total += likelihoods[ml_winner(&likelihoods)];
        Ok(())
    })?;
    Ok((total / words.len() as f64).clamp(0.0, 1.0))
}

/// Exact ML success probability of a linear code over a matched classical
/// channel (square, one row per code symbol). See [`ml_success_words`].
pub fn ml_success_exact(code: &LinearCode, dmc: &Dmc) -> Result<f64> {
    if dmc.in_size() != code.q() as usize || dmc.out_size() != dmc.in_size() {
        return Err(Error::validation(format!(
            "code over q = {} needs a square {0}x{0} transition matrix, got {}x{}",
            code.q(),
            dmc.in_size(),
            dmc.out_size()
        )));
    }
    ml_success_words(code.codewords(), dmc)
}

/// Sphere-packing-style converse: an upper bound on the average ML success
/// probability of every `(n, M)_q` code on the symmetric `q`-ary channel
/// whose per-specific-wrong-symbol probability is `eps ∈ [0, 1/q]`.
///
/// An optimal decoder can pool at most `q^n / M` output sequences per
/// message on average; the bound fills that budget with the most probable
/// error patterns, whole weight shells first:
/// `Σ_{j<t} C(n,j)(q−1)^j ε^j (1−(q−1)ε)^{n−j} + A_t ε^t (1−(q−1)ε)^{n−t}`,
/// where `t` is the largest shell still fitting and
/// `A_t = q^n/M − Σ_{j<t} C(n,j)(q−1)^j` the leftover budget.
pub fn qsc_converse(n: usize, m: u64, q: u8, eps: f64) -> Result<BoundResult> {
    validate_bound_params(n, m, q)?;
    let qf = q as f64;
    if !(0.0..=1.0 / qf).contains(&eps) {
        return Err(Error::validation(format!(
            "per-wrong-symbol probability must lie in [0, 1/{q}], got {eps}"
        )));
    }

    let budget = qf.powi(n as i32) / m as f64;
    let mut t = 0usize;
    let mut a_t = budget;
    let mut shell_sum = 0.0;
    for j in 0..=n {
        let remaining = budget - shell_sum;
        if remaining >= 0.0 {
            t = j;
            a_t = remaining;
        } else {
            break;
        }
        shell_sum += binomial(n as u64, j as u64) * (qf - 1.0).powi(j as i32);
    }

    let keep = 1.0 - (qf - 1.0) * eps;
    let mut value = 0.0;
    for j in 0..t {
        value += binomial(n as u64, j as u64)
            * (qf - 1.0).powi(j as i32)
            * eps.powi(j as i32)
            * keep.powi((n - j) as i32);
    }
    value += a_t * eps.powi(t as i32) * keep.powi((n - t) as i32);

    Ok(BoundResult {
        value: value.clamp(0.0, 1.0),
        kind: BoundKind::ConverseUpper,
        n,
        m,
        q,
        eps,
    })
}

/// Random-coding lower bound: the exact expected ML success probability of
/// a codebook drawn uniformly at random (with replacement) for the
/// symmetric `q`-ary channel whose per-symbol total error probability is
/// `eps ∈ [0, 1 − 1/q]`, with likelihood ties split uniformly.
///
/// Conditioned on the error pattern having weight `i`, the transmitted
/// word is decoded when every competing random codeword is strictly less
/// likely and any `l`-way tie is won with probability `1/(l+1)`:
/// `Σ_i C(n,i) ε^i (1−ε)^{n−i} Σ_l C(M−1,l) p_i^l s_i^{M−1−l} / (l+1)`,
/// where `p_i` is the probability that a uniform codeword sits at distance
/// `i` from a fixed sequence and `s_i` the probability it sits strictly
/// further.
pub fn qsc_rcb(n: usize, m: u64, q: u8, eps: f64) -> Result<BoundResult> {
    validate_bound_params(n, m, q)?;
    let qf = q as f64;
    if !(0.0..=1.0 - 1.0 / qf).contains(&eps) {
        return Err(Error::validation(format!(
            "per-symbol error probability must lie in [0, 1 − 1/{q}], got {eps}"
        )));
    }

    // Distance distribution of a uniformly random codeword.
    let shells: Vec<f64> = (0..=n)
        .map(|i| {
            (ln_binomial(n as u64, i as u64) + i as f64 * (qf - 1.0).ln() - n as f64 * qf.ln())
                .exp()
        })
        .collect();
    let mut tails = vec![0.0f64; n + 2];
    for i in (0..=n).rev() {
        tails[i] = tails[i + 1] + shells[i];
    }

    let mut value = 0.0;
    for i in 0..=n {
        let channel_weight =
            binomial(n as u64, i as u64) * eps.powi(i as i32) * (1.0 - eps).powi((n - i) as i32);
        if channel_weight == 0.0 {
            continue;
        }
        let p_i = shells[i];
        let s_i = tails[i + 1];
        let ln_p = p_i.ln();
        let mut tie_sum = 0.0;
        for l in 0..m {
            let better = (m - 1 - l) as f64;
            // s_i = 0 kills every term that still needs a strictly-worse
            // competitor; only the all-tied term survives.
            if s_i == 0.0 && better > 0.0 {
                continue;
            }
            let ln_term = ln_binomial(m - 1, l)
                + l as f64 * ln_p
                + if better > 0.0 { better * s_i.ln() } else { 0.0 }
                - ((l + 1) as f64).ln();
            tie_sum += ln_term.exp();
        }
        value += channel_weight * tie_sum;
    }

    Ok(BoundResult {
        value: value.clamp(0.0, 1.0),
        kind: BoundKind::RcbLower,
        n,
        m,
        q,
        eps,
    })
}

/// Capacity of the binary symmetric channel, `1 − H(eps)` bits per use,
/// for crossover `eps ∈ [0, 1/2]`.
pub fn c_bsc(eps: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::validation(format!(
            "crossover probability must lie in [0, 1/2], got {eps}"
        )));
    }
    Ok(1.0 - binary_entropy(eps)?)
}

/// Capacity of the symmetric 4-ary channel in log₄ units,
/// `(2 − H(3eps) − 3eps·log₂3) / 2`, for per-wrong-symbol probability
/// `eps ∈ [0, 1/4]` (zero capacity at the top of the range).
///
/// Arguments within `1e-9` outside the range are clamped; the slack
/// absorbs the certificate tolerance of numerically extracted channel
/// parameters.
pub fn c_qsc(eps: f64) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !(-SLACK..=0.25 + SLACK).contains(&eps) {
        return Err(Error::validation(format!(
            "per-wrong-symbol probability must lie in [0, 1/4], got {eps}"
        )));
    }
    let eps = eps.clamp(0.0, 0.25);
    let total = 3.0 * eps;
    Ok((2.0 - binary_entropy(total)? - total * 3f64.log2()) / 2.0)
}

/// Both capacities at one damping level: the binary channel from measuring
/// each qubit separately, and the 4-ary channel from optimally decoding
/// three-qubit parity-check blocks (extracted numerically, certified to
/// `tol`).
pub fn capacity_pair(gamma: f64, tol: f64) -> Result<CapacityPair> {
    let code = LinearCode::named("spc_3_2").expect("built-in code");
    let states = pm_states();
    let channel = adc(gamma)?;
    let eps_collective = extract_qsc_eps(&code, &states, &channel, tol)?;
    Ok(CapacityPair {
        gamma,
        c_bsc: c_bsc(eps_bsc(gamma)?)?,
        c_qsc: c_qsc(eps_collective)?,
    })
}

/// Smallest damping level (to the requested resolution) at which the
/// jointly decoded blocks outcommunicate the per-qubit channel:
/// the first sign change of `(2/3)·c_qsc − c_bsc`, located by a `0.05`
/// coarse scan from zero and bisection inside the bracketing cell.
///
/// Returns [`Error::Structure`] if no sign change appears below `γ = 0.995`
/// (beyond which the extraction solves become too ill-conditioned to
/// bracket meaningfully).
pub fn capacity_crossing(resolution: f64) -> Result<f64> {
    if !(resolution > 0.0 && resolution.is_finite() && resolution < 0.5) {
        return Err(Error::validation(format!(
            "resolution must lie in (0, 0.5), got {resolution}"
        )));
    }
    let advantage = |gamma: f64| -> Result<f64> {
        let pair = capacity_pair(gamma, default_tol(8))?;
        Ok(2.0 / 3.0 * pair.c_qsc - pair.c_bsc)
    };

    const SCAN_STEP: f64 = 0.05;
    const SCAN_END: f64 = 0.995;
    let mut lo = 0.0;
    let mut hi = None;
    let mut gamma = SCAN_STEP;
    while gamma < SCAN_END + 1e-12 {
        let g = gamma.min(SCAN_END);
        if advantage(g)? > 0.0 {
            hi = Some(g);
            break;
        }
        lo = g;
        gamma += SCAN_STEP;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::Structure(format!("no capacity crossing found in [0, {SCAN_END}]"))
    })?;

    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if advantage(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
