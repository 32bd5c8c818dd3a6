use std::f64::consts::{FRAC_PI_2, PI};

use kerrcat::fock::{
    annihilation, cat_state, coherent_state, creation, hamiltonian, CatParity, FockDensityMatrix, TruncatedSpace,
};
use kerrcat::lindblad::{lindblad_rhs, standard_jumps};
use kerrcat::liouville::{
    closed_form_spectrum, effective_evolve, effective_liouvillian, lep_detuning, lep_detuning_for, numeric_spectrum,
    unvec, vec, CatBasisParams, SystemParams,
};
use kerrcat::observables::{phase_difference, uhlmann_fidelity, QubitDensityMatrix};
use kerrcat::C64;
use nalgebra::{DMatrix, DVector, Matrix2};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = SystemParams> {
    (0.8f64..2.5, 1e3f64..2e4, 0.0f64..2e3, -3.0f64..3.0).prop_map(|(alpha, kappa_hz, kphi_hz, rel)| {
        let base = SystemParams::from_hz(0.0, 6.7e6, 6.7e6 * alpha * alpha, kappa_hz, kphi_hz).unwrap();
        let lep = lep_detuning(&base).unwrap();
        base.with_delta(rel * lep)
    })
}

fn density_strategy(dim: usize) -> impl Strategy<Value = DMatrix<C64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |raw| {
        let a = DMatrix::from_fn(dim, dim, |i, j| C64::new(raw[2 * (i * dim + j)], raw[2 * (i * dim + j) + 1]));
        let m = &a * a.adjoint();
        let tr = m.trace();
        m / tr
    })
}

fn qubit_strategy() -> impl Strategy<Value = QubitDensityMatrix> {
    (0.0f64..PI, 0.0f64..2.0 * PI, 0.0f64..1.0).prop_map(|(theta, phi, r)| {
        let (s, c) = (theta.sin(), theta.cos());
        let b = kerrcat::observables::BlochVector { x: r * s * phi.cos(), y: r * s * phi.sin(), z: r * c };
        QubitDensityMatrix::from_bloch(b).unwrap()
    })
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ladder_commutator_is_identity_below_cutoff(dim in 3usize..40) {
        let space = TruncatedSpace::new(dim).unwrap();
        let a = annihilation(space).matrix().clone();
        let ad = creation(space).matrix().clone();
        let comm = &a * &ad - &ad * &a;
        for i in 0..dim - 1 {
            for j in 0..dim - 1 {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((comm[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cat_states_are_normalized_parity_eigenstates(alpha in 0.3f64..2.5) {
        let space = TruncatedSpace::new(40).unwrap();
        for (parity, odd) in [(CatParity::Plus, false), (CatParity::Minus, true)] {
            let psi = cat_state(alpha, parity, space).unwrap();
            prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
            let wrong: f64 = psi.iter().enumerate().filter(|(n, _)| (n % 2 == 1) != odd).map(|(_, z)| z.norm_sqr()).sum();
            prop_assert!(wrong < 1e-28);
        }
    }

    #[test]
    fn lindblad_rhs_is_traceless_and_hermitian(params in params_strategy(), rho in density_strategy(10)) {
        let space = TruncatedSpace::new(10).unwrap();
        let rho = FockDensityMatrix::new(space, rho).unwrap();
        let h = hamiltonian(&params, space);
        let d = lindblad_rhs(&rho, &h, &standard_jumps(&params, space)).unwrap();
        let scale = max_abs(&d).max(params.kerr);
        prop_assert!(d.trace().norm() <= 1e-12 * scale);
        prop_assert!(max_abs(&(&d - d.adjoint())) <= 1e-12 * scale);
    }

    #[test]
    fn effective_evolution_preserves_trace_and_hermiticity(params in params_strategy(), rho0 in qubit_strategy(), t in 0.0f64..1e-3) {
        let out = effective_evolve(&rho0, &params, &[0.0, t]).unwrap();
        for q in &out {
            let m = q.matrix();
            prop_assert!((m.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
            prop_assert!((m[(0, 1)] - m[(1, 0)].conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn closed_form_eigenpairs_satisfy_liouvillian(params in params_strategy()) {
        let spectrum = closed_form_spectrum(&params);
        let l = effective_liouvillian(&params);
        let scale = l.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (e, m) in spectrum.eigenvalues().iter().zip(spectrum.eigenmatrices()) {
            if spectrum.at_ep {
                continue;
            }
            let v = vec(&m);
            let r = l.matrix() * v - v * *e;
            prop_assert!(r.norm() <= 1e-9 * scale * v.norm(), "residual {:e}", r.norm());
        }
    }

    #[test]
    fn numeric_and_closed_form_eigenvalues_agree(params in params_strategy()) {
        let closed = closed_form_spectrum(&params);
        let numeric = numeric_spectrum(&effective_liouvillian(&params)).unwrap();
        let scale = params.kappa * params.alpha().powi(2);
        for (a, b) in closed.eigenvalues().iter().zip(numeric.eigenvalues()) {
            prop_assert!((a - b).norm() <= 1e-9 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn steady_state_is_a_density_matrix_with_zero_eigenvalue(params in params_strategy()) {
        let s = closed_form_spectrum(&params);
        prop_assert!(s.e1.norm() < 1e-12 * params.kappa);
        prop_assert!(s.e2.im.abs() < 1e-12 * params.kappa && s.e2.re < 0.0);
        let q = QubitDensityMatrix::new(s.rho_ss);
        prop_assert!(q.is_ok());
    }

    #[test]
    fn phase_difference_is_gauge_invariant(params in params_strategy(), mag in 0.1f64..10.0, arg in -PI..PI) {
        let s = closed_form_spectrum(&params);
        let z = C64::from_polar(mag, arg);
        for m in [s.rho3, s.rho4] {
            let phi = phase_difference(&m).unwrap();
            let scaled = phase_difference(&(m * z)).unwrap();
            prop_assert!((phi - scaled).abs() < 1e-12);
            prop_assert!((0.0..=PI).contains(&phi));
        }
    }

    #[test]
    fn phase_difference_follows_the_arcsin_law(params in params_strategy()) {
        let lep = lep_detuning(&params).unwrap();
        let ratio = params.delta.abs() / lep;
        prop_assume!((ratio - 1.0).abs() > 1e-6);
        let phi = phase_difference(&closed_form_spectrum(&params).rho3).unwrap();
        let expect = if ratio < 1.0 { ratio.asin() } else { FRAC_PI_2 };
        prop_assert!((phi - expect).abs() < 1e-8, "phi {phi} expect {expect}");
    }

    #[test]
    fn lep_scales_linearly_with_kappa(alpha in 0.8f64..2.5, kappa in 1e3f64..1e6, factor in 0.1f64..10.0) {
        let a = lep_detuning_for(alpha, kappa).unwrap();
        let b = lep_detuning_for(alpha, kappa * factor).unwrap();
        prop_assert!((b / a - factor).abs() < 1e-12 * factor);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in density_strategy(5), b in density_strategy(5)) {
        let f_ab = uhlmann_fidelity(&a, &b).unwrap();
        let f_ba = uhlmann_fidelity(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&f_ab));
        prop_assert!((f_ab - f_ba).abs() < 1e-9);
    }

    #[test]
    fn fidelity_of_pure_states_is_overlap(re in -2.0f64..2.0, im in -2.0f64..2.0, re2 in -2.0f64..2.0, im2 in -2.0f64..2.0) {
        let space = TruncatedSpace::new(40).unwrap();
        let psi = coherent_state(C64::new(re, im), space).unwrap();
        let phi = coherent_state(C64::new(re2, im2), space).unwrap();
        let proj = |v: &DVector<C64>| v * v.adjoint();
        let f = uhlmann_fidelity(&proj(&psi), &proj(&phi)).unwrap();
        let overlap = psi.dotc(&phi).norm_sqr();
        prop_assert!((f - overlap).abs() < 1e-10, "F {f} overlap {overlap}");
    }

    #[test]
    fn vec_round_trip(re in prop::array::uniform8(-5.0f64..5.0)) {
        let m = Matrix2::new(C64::new(re[0], re[1]), C64::new(re[2], re[3]), C64::new(re[4], re[5]), C64::new(re[6], re[7]));
        prop_assert_eq!(unvec(&vec(&m)), m);
    }
}

#[test]
fn cat_params_match_reference_point() {
    let cat = CatBasisParams::new(&SystemParams::reference());
    assert!((cat.alpha - 1.5209973).abs() < 1e-7);
    assert!((cat.p2_minus - 0.039145).abs() < 1e-6);
}
