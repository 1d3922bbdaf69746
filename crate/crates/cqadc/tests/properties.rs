//! Randomized invariant checks for the algebraic layers: matrix algebra,
//! channel action, entropy utilities, and the classical bound formulas.

use cqadc::bounds::{c_bsc, c_qsc, ml_success_exact, qsc_converse, qsc_rcb};
use cqadc::channel::{adc, binary_entropy, eps_bsc, pm_states, DensityOperator};
use cqadc::codes::LinearCode;
use cqadc::linalg::ComplexMatrix;
use cqadc::measurement::{induced_dmc, pm_povm, Dmc};
use num_complex::Complex64;
use proptest::prelude::*;

/// Strategy for one finite complex entry with both parts in [-1, 1].
fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0f64..=1.0, -1.0f64..=1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Strategy for a dense square complex matrix of the given dimension.
fn complex_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex_entry(), dim * dim)
        .prop_map(move |entries| ComplexMatrix::new(dim, dim, entries).expect("finite entries"))
}

/// Strategy for a random Hermitian matrix of the given dimension.
fn hermitian_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_matrix(dim).prop_map(|a| a.hermitian_part())
}

/// Strategy for a random qubit density operator ρ = AA†/tr(AA†).
fn qubit_state() -> impl Strategy<Value = DensityOperator> {
    complex_matrix(2)
        .prop_filter("need a nonzero seed matrix", |a| a.frobenius_norm() > 1e-3)
        .prop_map(|a| {
            let gram = a.mul(&a.adjoint()).expect("square shapes");
            let normalized = gram.scale_re(1.0 / gram.trace().re);
            DensityOperator::new(normalized).expect("normalized Gram matrix is a state")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(
        a in complex_matrix(2),
        b in complex_matrix(2),
        c in complex_matrix(2),
    ) {
        let left = a.kron(&b).unwrap().kron(&c).unwrap();
        let right = a.kron(&b.kron(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn kron_trace_is_multiplicative(a in hermitian_matrix(2), b in hermitian_matrix(2)) {
        let product = a.kron(&b).unwrap().trace();
        let expected = a.trace() * b.trace();
        prop_assert!((product - expected).norm() <= 1e-12);
    }

    #[test]
    fn trace_norm_dominates_trace(a in hermitian_matrix(3)) {
        let trace_norm = a.trace_norm().unwrap();
        prop_assert!(trace_norm + 1e-10 >= a.trace().re.abs());
    }

    #[test]
    fn eigendecomposition_reconstructs_random_hermitian(a in hermitian_matrix(6)) {
        let spectrum = a.hermitian_eig().unwrap();
        let mut recon = ComplexMatrix::zeros(6, 6);
        for (k, &lambda) in spectrum.eigenvalues.iter().enumerate() {
            let column: Vec<Complex64> = (0..6).map(|i| spectrum.eigenvectors[(i, k)]).collect();
            let mut rank_one = Vec::with_capacity(36);
            for i in 0..6 {
                for j in 0..6 {
                    rank_one.push(lambda * column[i] * column[j].conj());
                }
            }
            recon = recon.add(&ComplexMatrix::new(6, 6, rank_one).unwrap()).unwrap();
        }
        prop_assert!(recon.max_abs_diff(&a) <= 1e-10);
    }

    #[test]
    fn damping_preserves_trace_and_positivity(rho in qubit_state(), gamma in 0.0f64..=1.0) {
        let channel = adc(gamma).unwrap();
        let out = channel.apply(&rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(out.matrix().trace().im.abs() <= 1e-12);
        prop_assert!(out.matrix().is_psd(1e-10).unwrap());
    }

    #[test]
    fn block_outputs_of_product_states_are_states(
        rho0 in qubit_state(),
        rho1 in qubit_state(),
        gamma in 0.0f64..=1.0,
    ) {
        let channel = adc(gamma).unwrap();
        let block = channel.apply_product(&[rho0, rho1]).unwrap();
        prop_assert_eq!(block.dim(), 4);
        prop_assert!((block.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(block.matrix().is_psd(1e-10).unwrap());
    }

    #[test]
    fn binary_entropy_is_bounded_and_symmetric(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&h));
        let mirrored = binary_entropy(1.0 - p).unwrap();
        prop_assert!((h - mirrored).abs() <= 1e-12);
    }

    #[test]
    fn crossover_grows_with_damping(lo in 0.0f64..=1.0, hi in 0.0f64..=1.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        prop_assert!(eps_bsc(lo).unwrap() <= eps_bsc(hi).unwrap() + 1e-15);
    }

    #[test]
    fn symmetric_channel_rows_are_distributions(delta in 0.0f64..=0.25) {
        let dmc = Dmc::symmetric(4, delta).unwrap();
        for x in 0..4 {
            let row_sum: f64 = (0..4).map(|y| dmc.prob(x, y)).sum();
            prop_assert!((row_sum - 1.0).abs() <= 1e-12);
            for y in 0..4 {
                let expected = if x == y { 1.0 - 3.0 * delta } else { delta };
                prop_assert!((dmc.prob(x, y) - expected).abs() <= 1e-15);
            }
        }
    }
}

#[test]
fn plus_minus_signaling_induces_the_predicted_crossover() {
    for k in 0..=20 {
        let gamma = k as f64 / 20.0;
        let dmc = induced_dmc(&pm_states(), &pm_povm(), &adc(gamma).unwrap()).unwrap();
        let eps = eps_bsc(gamma).unwrap();
        let reference = Dmc::bsc(eps).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!(
                    (dmc.prob(x, y) - reference.prob(x, y)).abs() <= 1e-12,
                    "induced transition ({x},{y}) at gamma={gamma} drifted from the closed form"
                );
            }
        }
    }
}

#[test]
fn converse_equals_the_parity_check_success_across_the_crossover_range() {
    let code = LinearCode::named("spc_3_2").unwrap();
    for k in 1..100 {
        let eps = 0.005 * k as f64;
        let exact = ml_success_exact(&code, &Dmc::symmetric(2, eps).unwrap()).unwrap();
        let bound = qsc_converse(3, 4, 2, eps).unwrap().value;
        assert!(
            (exact - bound).abs() <= 1e-10,
            "triple-repetition-dual success and converse disagree at eps={eps}: {exact} vs {bound}"
        );
    }
}

#[test]
fn bounds_decrease_as_the_channel_degrades() {
    let mut previous_converse = f64::INFINITY;
    for k in 0..=100 {
        let eps = 0.25 * k as f64 / 100.0;
        let value = qsc_converse(4, 6, 4, eps).unwrap().value;
        assert!(
            value <= previous_converse + 1e-12,
            "converse increased at eps={eps}"
        );
        previous_converse = value;
    }

    let mut previous_rcb = f64::INFINITY;
    for k in 0..=100 {
        let eps = 0.75 * k as f64 / 100.0;
        let value = qsc_rcb(4, 6, 4, eps).unwrap().value;
        assert!(
            value <= previous_rcb + 1e-12,
            "achievability bound increased at eps={eps}"
        );
        previous_rcb = value;
    }

    let mut previous_bsc = f64::INFINITY;
    for k in 0..=100 {
        let eps = 0.5 * k as f64 / 100.0;
        let value = c_bsc(eps).unwrap();
        assert!(
            value <= previous_bsc + 1e-12,
            "c_bsc increased at eps={eps}"
        );
        previous_bsc = value;
    }

    let mut previous_qsc = f64::INFINITY;
    for k in 0..=100 {
        let eps = 0.25 * k as f64 / 100.0;
        let value = c_qsc(eps).unwrap();
        assert!(
            value <= previous_qsc + 1e-12,
            "c_qsc increased at eps={eps}"
        );
        previous_qsc = value;
    }
}
