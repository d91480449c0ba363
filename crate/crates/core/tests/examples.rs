use ep3sense_core::cubic::{cubic_coeffs, ep2_discriminant, CubicCoeffs};
use ep3sense_core::device::*;
use ep3sense_core::eigen::*;
use ep3sense_core::params::defaults;
use ep3sense_core::sensing::*;
use ep3sense_core::spectrum::*;
use ep3sense_core::units::{mhz_to_rad, rad_to_mhz};
use ep3sense_core::*;
use num_complex::Complex64 as C;
use std::f64::consts::TAU;

fn gamma() -> f64 {
    mhz_to_rad(defaults::GAMMA_MHZ)
}

fn device_ports() -> (f64, f64) {
    (mhz_to_rad(defaults::KAPPA1_MHZ), mhz_to_rad(defaults::KAPPA2_MHZ))
}

fn away() -> SymmetricParams {
    SymmetricParams::on_manifold(gamma(), mhz_to_rad(defaults::G_AWAY_MHZ)).unwrap()
}

#[test]
fn device_hamiltonian_cavity_entry() {
    let sym = SymmetricParams::from_mhz(3.0, 3.46, 1.73).unwrap();
    let (k1, k2) = device_ports();
    let p = SystemParams::from_symmetric(&sym, k1, k2).unwrap();
    let h = build_hamiltonian(&p);
    assert!((h[0][0] - C::new(0.0, TAU * 6.0)).norm() < 1e-12);
    assert!((p.kappa_int - TAU * 2.0).abs() < 1e-12);
}

#[test]
fn ep3_locations() {
    let p = locate_ep3(gamma()).unwrap();
    assert!((rad_to_mhz(p.g_ep3) - 3.4641).abs() < 1e-3);
    assert!((rad_to_mhz(p.delta_ep3) - 1.7321).abs() < 1e-3);

    let unit = locate_ep3(3f64.sqrt() / 2.0).unwrap();
    assert!((unit.g_ep3 - 1.0).abs() < 1e-15);
    assert!((unit.delta_ep3 - 0.5).abs() < 1e-15);

    let g5 = mhz_to_rad(5.0);
    let p5 = locate_ep3(g5).unwrap();
    assert!((rad_to_mhz(p5.g_ep3) - 5.7735).abs() < 1e-4);
    assert!((rad_to_mhz(p5.delta_ep3) - 2.8868).abs() < 1e-4);
    assert!(verify_ep3(g5, &p5).unwrap().passes(g5, &Tolerances::default()));
}

#[test]
fn ep3_coefficients_vanish() {
    let k = cubic_coeffs(&SymmetricParams::ep3(gamma()).unwrap());
    assert_eq!(k.c0, C::new(0.0, 0.0));
    assert_eq!(k.c1, C::new(0.0, 0.0));
    assert_eq!(ep2_discriminant(&k), C::new(0.0, 0.0));
    let rounded = cubic_coeffs(&SymmetricParams::from_mhz(3.0, 3.46, 1.73).unwrap());
    assert!(rounded.c0.norm() < 0.1 * gamma().powi(3));
    assert!(rounded.c1.norm() < 0.1 * gamma().powi(2));
}

#[test]
fn ep3_vector_coalescence() {
    let sym = SymmetricParams::ep3(gamma()).unwrap();
    let v = eigenvectors_on_manifold(&sym).unwrap();
    let r3 = 3f64.sqrt();
    let target = normalize([C::new(1.0, 0.0), C::new(-0.5, -r3 / 2.0), C::new(0.5, -r3 / 2.0)]);
    for vec in v.vectors {
        let d: f64 = (0..3).map(|i| (vec[i] - target[i]).norm_sqr()).sum::<f64>().sqrt();
        assert!(d < 1e-12, "{vec:?}");
    }
}

#[test]
fn away_point_eigenvalues_and_vectors() {
    let sym = away();
    let closed = eigenvalues_on_manifold(&sym).unwrap();
    assert!((rad_to_mhz(closed.0[1].re) - 5.216).abs() < 5e-4);
    assert!(closed.multiset_distance(&symmetric_eigenvalues(&sym)) < 1e-9 * sym.g);
    let v = eigenvectors_on_manifold(&sym).unwrap();
    assert!(v.max_residual(&symmetric_hamiltonian(&sym)) <= 1e-9 * sym.g);
    assert!(v.max_pairwise_vector_distance() > 0.1);
    assert!(ep2_discriminant(&cubic_coeffs(&sym)).norm() > 0.0);
    assert!(is_pseudo_hermitian_spectrum(&closed));
}

#[test]
fn pseudo_hermitian_closure_examples() {
    let z = |re, im| C::new(re, im);
    assert!(is_pseudo_hermitian_spectrum(&cubic::ComplexTriple([z(0.0, 0.0), z(1.5, 0.7), z(1.5, -0.7)])));
    let decoupled = cubic::cardano_roots(&CubicCoeffs::new(z(0.0, 2.0), z(3.0, 0.0)));
    assert!(!is_pseudo_hermitian_spectrum(&decoupled));
}

#[test]
fn cpa_closed_form_matches_general_spectrum() {
    let (k1, k2) = device_ports();
    for sym in [away(), SymmetricParams::ep3(gamma()).unwrap()] {
        let p = SystemParams::from_symmetric(&sym, k1, k2).unwrap();
        let drive = cpa_drive(&p).unwrap();
        let grid = linear_grid(-10.0, 10.0, 401);
        let general = total_output_spectrum(&p, &drive, &grid, -300.0).unwrap();
        let closed = cpa_spectrum_closed_form(&sym, k1, k2, &grid, -300.0).unwrap();
        for (a, b) in general.values.iter().zip(&closed.values) {
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-12), "{a} {b}");
        }
    }
}

#[test]
fn cpa_drive_ratios() {
    let sym = away();
    let p = SystemParams::from_symmetric(&sym, 4.0 * TAU * 4.0, TAU * 4.0).unwrap();
    let d = cpa_drive(&p).unwrap();
    assert_eq!((d.p, d.phi), (4.0, 0.0));
}

#[test]
fn ep3_cpa_trace_dip_at_origin() {
    let sym = SymmetricParams::ep3(gamma()).unwrap();
    let (k1, k2) = device_ports();
    let p = SystemParams::from_symmetric(&sym, k1, k2).unwrap();
    let drive = cpa_drive(&p).unwrap();
    let trace = total_output_spectrum(&p, &drive, &default_grid(), defaults::MODEL_FLOOR_DB).unwrap();
    let dip = find_dip(&trace, |nu| total_output(&p, &drive, mhz_to_rad(nu)).unwrap()).unwrap();
    assert_eq!(format!("{:.6}", dip.dip_location), "0.000000");
    assert_eq!(dip.dip_value_db, defaults::MODEL_FLOOR_DB);
    let experimental = total_output_spectrum(&p, &drive, &default_grid(), defaults::EXPERIMENTAL_FLOOR_DB).unwrap();
    let min_db = experimental.values_db.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min_db <= defaults::EXPERIMENTAL_FLOOR_DB);
}

#[test]
fn perturbed_dip_tracks_central_eigenvalue() {
    let settings = ChainSettings::device(defaults::EXPERIMENTAL_FLOOR_DB);
    let chain = sensitivity_chain(gamma(), mhz_to_rad(0.025), &settings).unwrap();
    assert!((chain.perturbed_dip.dip_location - 0.67).abs() < 0.02, "{}", chain.perturbed_dip.dip_location);
    assert!((chain.perturbed_dip.dip_location - chain.exact_shift_mhz).abs() < 0.01);
}

#[test]
fn eigenshift_at_the_anchor_point() {
    let sym = SymmetricParams::ep3(gamma()).unwrap();
    assert_eq!(exact_eigenshift(&sym, &Perturbation::new(0.0).unwrap()).unwrap(), 0.0);
    let shift = rad_to_mhz(exact_eigenshift(&sym, &Perturbation::from_mhz(0.025).unwrap()).unwrap());
    // Frozen from the continued cubic; the cube-root approximation gives 0.669.
    assert!((shift - 0.686_134).abs() < 1e-5, "{shift}");
    let approx = rad_to_mhz(cube_root_response(sym.g, mhz_to_rad(0.025)));
    assert!((approx - 0.67).abs() < 0.01);
}

#[test]
fn shift_relation_examples() {
    let sym = SymmetricParams::ep3(gamma()).unwrap();
    assert_eq!(delta_b_of_shift(&sym, 0.0).unwrap(), 0.0);
    let g2 = sym.g * sym.g;
    for w in [0.1, 1.0, 4.2] {
        let w2 = w * w;
        let reduced = w2 * w * (w2 + g2) / (g2 * g2 + 2.0 * w2 * (w2 + 2.0 * g2));
        assert!((delta_b_of_shift(&sym, w).unwrap() - reduced).abs() <= 1e-13 * reduced);
    }
    let small_form = 0.67f64.powi(3) / 3.46f64.powi(2);
    assert!((small_form - 0.025).abs() < 2e-4);
    // The full relation differs from the small-Ω′ form by O(Ω′²/g²) ≈ 4%.
    let full = rad_to_mhz(delta_b_of_shift(&sym, mhz_to_rad(0.67)).unwrap());
    assert!((full - 0.022_47).abs() < 1e-4, "{full}");
    assert!(((full - small_form) / small_form).abs() < 0.15);
}

#[test]
fn cube_root_law_tracks_exact_shift() {
    let sym = SymmetricParams::ep3(gamma()).unwrap();
    for k in 0..=40 {
        let db_mhz = 10f64.powf(-4.0 + 2.0 * k as f64 / 40.0);
        let db = mhz_to_rad(db_mhz);
        let exact = exact_eigenshift(&sym, &Perturbation::new(db).unwrap()).unwrap();
        let law = cube_root_response(sym.g, db);
        assert!(((law - exact) / exact).abs() <= 0.02, "Δ_B/2π = {db_mhz}");
    }
    assert_eq!(cube_root_response(sym.g, 0.0), 0.0);
}

#[test]
fn linear_law_coefficient() {
    let sym = away();
    let coef = linear_response(&sym, 1.0).unwrap();
    assert!((coef - 0.2256).abs() < 1e-4);
    assert!((rad_to_mhz(linear_response(&sym, mhz_to_rad(0.025)).unwrap()) - 0.00564).abs() < 1e-5);
    let small = mhz_to_rad(1e-4);
    let exact = exact_eigenshift(&sym, &Perturbation::new(small).unwrap()).unwrap();
    assert!((exact / small - coef).abs() < 1e-4);
    assert_eq!(linear_response(&sym, 0.0).unwrap(), 0.0);
}

#[test]
fn slope_fits() {
    let xs: Vec<f64> = (0..50).map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / 49.0)).collect();
    for (sym, expected) in [(SymmetricParams::ep3(gamma()).unwrap(), 1.0 / 3.0), (away(), 1.0)] {
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .map(|&x| (x, rad_to_mhz(exact_eigenshift(&sym, &Perturbation::from_mhz(x).unwrap()).unwrap())))
            .collect();
        let fit = fit_loglog_slope(&pts, (1e-4, 1e-2)).unwrap();
        assert!((fit.slope - expected).abs() <= 0.02, "{fit:?}");
    }
}

#[test]
fn sensitivity_arithmetic_examples() {
    let g_ep3 = g_ep3_factor(mhz_to_rad(3.46), mhz_to_rad(0.025));
    assert!((g_ep3 - 26.8).abs() < 0.1);
    let g_cpa = g_cpa_factor(-91.5, -70.0, 0.67).unwrap();
    assert!((g_cpa - 32.1).abs() < 0.05);
    assert!((synthetic_sensitivity(32.1, 26.8) - 860.0).abs() < 1.0);
    assert_eq!(synthetic_sensitivity(0.0, 26.8), 0.0);
    let b = detectable_b_min(1e-13, 860.0, 28.0).unwrap();
    assert!((b - 4.2e-21).abs() < 0.05e-21);
}

#[test]
fn floor_choice_shifts_cpa_factor() {
    let model = sensitivity_chain(gamma(), mhz_to_rad(0.025), &ChainSettings::device(-120.0)).unwrap();
    let exp = sensitivity_chain(gamma(), mhz_to_rad(0.025), &ChainSettings::device(-91.5)).unwrap();
    let expected = 28.5 / exp.report.delta_omega;
    assert!((model.report.g_cpa - exp.report.g_cpa - expected).abs() < 1e-9);
}

#[test]
fn pipeline_product_matches_direct_ratio() {
    let chain = sensitivity_chain(gamma(), mhz_to_rad(0.025), &ChainSettings::device(-91.5)).unwrap();
    let r = chain.report;
    let direct = (chain.perturbed_dip.dip_value_db - chain.unperturbed_dip.dip_value_db) / r.delta_b;
    assert!(((r.g_syn - direct) / direct).abs() <= 0.01);
    assert!(((r.g_syn - r.g_cpa * r.g_ep3) / r.g_syn).abs() <= 1e-9);
    assert!(r.delta_b_min > 0.0);
}

#[test]
fn device_examples() {
    let t = MagnonTuning::default();
    assert!((magnon_frequency(&t, 9e-7).unwrap() - 0.0252).abs() < 1e-12);
    let shifted = MagnonTuning::new(28.0, 7800.0).unwrap();
    let one = magnon_frequency(&shifted, 0.1).unwrap() - 7800.0;
    let two = magnon_frequency(&shifted, 0.2).unwrap() - 7800.0;
    assert!((two - 2.0 * one).abs() < 1e-9);
    let pc = PositionCoupling::default();
    assert!((coupling_vs_position(&pc, 12.5).unwrap() - 12.0).abs() < 1e-12);
    assert!((coupling_vs_position(&pc, 6.25).unwrap() - 8.485_281).abs() < 1e-6);
}

#[test]
fn rotation_table_reproduces_knots() {
    let csv = "theta_deg,freq_mhz\n0,9150\n45,9000\n90,8850\n135,9000\n180,9150\n270,8850\n";
    let table = RotationTable::from_reader(csv.as_bytes()).unwrap();
    for &(theta, f) in table.knots() {
        assert_eq!(RotationModel::Table(table.clone()).frequency(theta).unwrap(), f);
    }
    let analytic = RotationModel::Analytic { span_mhz: ROTATION_SPAN_MHZ, mean_mhz: 9000.0 };
    assert_eq!(analytic.frequency(0.0).unwrap(), 9150.0);
}
