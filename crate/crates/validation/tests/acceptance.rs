//! Acceptance checks for the model and the `reproduce` command.
//!
//! Runs every criterion, prints one `criterion N: PASS|FAIL` line for each
//! and exits non-zero if any failed.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ep3sense::commands::reproduce;
use ep3sense::figures::Figure;
use ep3sense_core::cubic::{monic_cubic_roots, ComplexTriple};
use ep3sense_core::eigen::{
    eigenvectors_on_manifold, symmetric_eigenvalues, symmetric_hamiltonian, symmetric_eigenvalues_from_delta_sq,
};
use ep3sense_core::sensing::{central_eigenvalue_sweep, fit_loglog_slope};
use ep3sense_core::spectrum::{linear_grid, mn_functions, mn_symmetric, total_output_expanded};
use ep3sense_core::units::{mhz_to_rad, rad_to_mhz};
use ep3sense_core::*;
use oracle::{characteristic_coeffs, companion_roots, langevin_total_output};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMA_MHZ: f64 = 3.0;
const G_AWAY_MHZ: f64 = 4.59;
const DELTA_B_MHZ: f64 = 0.025;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn gamma() -> f64 {
    mhz_to_rad(GAMMA_MHZ)
}

fn ep3() -> SymmetricParams {
    SymmetricParams::ep3(gamma()).expect("EP3 parameters")
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn ep3_location() -> Outcome {
    let start = Instant::now();
    let point = locate_ep3(gamma()).expect("locate_ep3");
    let elapsed = start.elapsed();
    let (g, d) = (rad_to_mhz(point.g_ep3), rad_to_mhz(point.delta_ep3));
    let pass = within(g, 3.4641, 1e-3) && within(d, 1.7321, 1e-3) && elapsed < Duration::from_millis(1);
    Outcome::new(
        pass,
        format!("g_EP3 = {g:.6} MHz, Delta_EP3 = {d:.6} MHz, {:.4} ms", ms(elapsed)),
    )
}

fn triple_degeneracy() -> Outcome {
    let sym = ep3();
    let roots = symmetric_eigenvalues(&sym);
    let vectors = eigenvectors_on_manifold(&sym).expect("eigenvectors at EP3");
    let root_norm = roots.max_norm() / sym.gamma;
    let vector_dist = vectors.max_pairwise_vector_distance();
    let (a2, a1, a0) = characteristic_coeffs(&symmetric_hamiltonian(&sym));
    let companion = companion_roots(a2, a1, a0);
    let oracle_dist = roots.multiset_distance(&companion) / sym.gamma;
    let pass = root_norm <= 1e-8 && vector_dist <= 1e-4 && oracle_dist <= 1e-4;
    Outcome::new(
        pass,
        format!(
            "max |Omega|/gamma = {root_norm:.2e}, eigenvector spread = {vector_dist:.2e}, companion distance/gamma = {oracle_dist:.2e}"
        ),
    )
}

fn eigenshift_anchor() -> Outcome {
    let shift = exact_eigenshift(&ep3(), &Perturbation::from_mhz(DELTA_B_MHZ).expect("perturbation"))
        .expect("eigenshift");
    let shift_mhz = rad_to_mhz(shift);
    Outcome::new(
        within(shift_mhz, 0.67, 0.01),
        format!("Delta_omega = {shift_mhz:.6} MHz (target 0.67 +/- 0.01)"),
    )
}

fn slope_laws() -> Outcome {
    let start = Instant::now();
    let dbs_mhz: Vec<f64> = (0..50).map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / 49.0)).collect();
    let dbs: Vec<f64> = dbs_mhz.iter().map(|&x| mhz_to_rad(x)).collect();
    let away = SymmetricParams::on_manifold(gamma(), mhz_to_rad(G_AWAY_MHZ)).expect("manifold point");
    let fit = |sym: &SymmetricParams| {
        let shifts = central_eigenvalue_sweep(sym, &dbs).expect("sweep");
        let pts: Vec<(f64, f64)> = dbs_mhz
            .iter()
            .zip(&shifts)
            .map(|(&b, w)| (b, rad_to_mhz(w.re.abs())))
            .collect();
        fit_loglog_slope(&pts, (1e-4, 1e-2)).expect("fit").slope
    };
    let (s_ep3, s_away) = (fit(&ep3()), fit(&away));
    let elapsed = start.elapsed();
    let pass = within(s_ep3, 1.0 / 3.0, 0.02) && within(s_away, 1.0, 0.02) && elapsed < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!("slope at EP3 = {s_ep3:.4}, slope at g = 4.59 MHz = {s_away:.4}, {:.1} ms", ms(elapsed)),
    )
}

fn sensitivity() -> Outcome {
    let chain = sensitivity_chain(gamma(), mhz_to_rad(DELTA_B_MHZ), &ChainSettings::device(-91.5))
        .expect("sensitivity chain");
    let r = chain.report;
    let checks = [
        ("G_EP3", r.g_ep3, 26.8, 0.3),
        ("G_CPA", r.g_cpa, 32.1, 0.5),
        ("G_syn", r.g_syn, 860.0, 20.0),
        ("dB_min", r.delta_b_min, 4.2e-21, 0.2e-21),
    ];
    let pass = checks.iter().all(|&(_, v, t, tol)| within(v, t, tol));
    let detail = checks
        .iter()
        .map(|&(name, v, t, tol)| {
            let verdict = if within(v, t, tol) { "ok" } else { "off" };
            format!("{name} = {v:.4e} (target {t:e} +/- {tol:e}, {verdict})")
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(pass, detail)
}

fn cpa_zeros() -> Outcome {
    let sym = SymmetricParams::on_manifold(gamma(), mhz_to_rad(G_AWAY_MHZ)).expect("manifold point");
    let params = SystemParams::from_symmetric(&sym, mhz_to_rad(4.0), mhz_to_rad(4.0)).expect("params");
    let drive = cpa_drive(&params).expect("cpa drive");
    let out = |nu_mhz: f64| total_output(&params, &drive, mhz_to_rad(nu_mhz)).expect("total output");
    let zero_mhz = rad_to_mhz((3.0 * sym.g * sym.g - 4.0 * sym.gamma * sym.gamma).sqrt());
    let placed = within(zero_mhz, 5.216, 5e-4);
    let zeros = [0.0, zero_mhz, -zero_mhz].map(out);
    let off = [2.5, -2.5].map(out);
    let max_zero = zeros.iter().copied().fold(0.0, f64::max);
    let min_off = off.iter().copied().fold(f64::INFINITY, f64::min);
    let literal = [5.216, -5.216].map(out).iter().copied().fold(0.0, f64::max);
    Outcome::new(
        placed && max_zero <= 1e-18 && min_off >= 1e-6,
        format!(
            "zeros at 0, +/-{zero_mhz:.6} MHz: max |S|^2 = {max_zero:.2e}; at +/-2.5 MHz: min |S|^2 = {min_off:.2e}; at the rounded +/-5.216 MHz: {literal:.2e}"
        ),
    )
}

fn random_c(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

fn random_system(r: &mut ChaCha8Rng) -> SystemParams {
    SystemParams {
        kappa1: TAU * r.random_range(0.1..8.0),
        kappa2: TAU * r.random_range(0.1..8.0),
        kappa_int: TAU * r.random_range(0.0..4.0),
        gamma1: TAU * r.random_range(0.1..6.0),
        gamma2: TAU * r.random_range(0.1..6.0),
        g1: TAU * r.random_range(0.0..8.0),
        g2: TAU * r.random_range(0.0..8.0),
        delta1: TAU * r.random_range(-6.0..6.0),
        delta2: TAU * r.random_range(-6.0..6.0),
        omega_c: 0.0,
    }
}

fn oracle_suites() -> Outcome {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut worst_roots = 0.0f64;
    for _ in 0..1000 {
        let (a2, a1, a0) = (random_c(&mut r), random_c(&mut r), random_c(&mut r));
        let ours = monic_cubic_roots(a2, a1, a0);
        worst_roots = worst_roots.max(ours.multiset_distance(&companion_roots(a2, a1, a0)));
    }
    let mut worst_output = 0.0f64;
    for _ in 0..1000 {
        let p = random_system(&mut r);
        let drive = DriveParams::new(10f64.powf(r.random_range(-2.0..2.0)), r.random_range(-PI..PI))
            .expect("drive");
        let omega = TAU * r.random_range(-10.0..10.0);
        let reference = langevin_total_output(&p, &drive, omega);
        let closed = total_output_expanded(&p, &drive, omega).expect("closed form");
        worst_output = worst_output.max((closed - reference).abs() / reference.abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_roots <= 1e-9 && worst_output <= 1e-10 && elapsed < Duration::from_secs(10);
    Outcome::new(
        pass,
        format!(
            "cubic roots: max distance {worst_roots:.2e}; total output: max relative error {worst_output:.2e}; {:.0} ms",
            ms(elapsed)
        ),
    )
}

fn m_consistency() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut worst_abs = 0.0f64;
    for _ in 0..100 {
        let gamma = TAU * r.random_range(0.5..5.0);
        let sym = SymmetricParams::new(gamma, TAU * r.random_range(0.0..8.0), TAU * r.random_range(-6.0..6.0))
            .expect("params");
        let k1 = gamma + TAU * r.random_range(0.0..4.0);
        let k2 = gamma + TAU * r.random_range(0.0..4.0);
        let p = SystemParams::from_symmetric(&sym, k1, k2).expect("params");
        for nu in linear_grid(-10.0, 10.0, 101) {
            let omega = TAU * nu;
            let (m_main, _) = mn_symmetric(&sym, k1, k2, omega);
            let (m_gen, _) = mn_functions(&p, omega).expect("m");
            let diff = (m_main - m_gen).abs();
            worst_abs = worst_abs.max(diff);
            worst = worst.max(diff / m_gen.abs().max(1.0));
        }
    }
    Outcome::new(
        worst_abs <= 1e-12,
        format!("max |dm| = {worst_abs:.2e} rad/us (relative {worst:.2e})"),
    )
}

fn conjugation_closed(t: &ComplexTriple) -> bool {
    t.multiset_distance(&t.conj()) <= 1e-9 * t.max_norm().max(1.0)
}

fn spectral_symmetry() -> Outcome {
    let gamma = gamma();
    let g_ep3 = ep3().g;
    let mut open = 0;
    let mut complex_above = 0;
    let mut worst_imag = 0.0f64;
    for ratio in linear_grid(0.5, 2.0, 200) {
        let g = ratio * g_ep3;
        let roots = symmetric_eigenvalues_from_delta_sq(gamma, g, g * g - gamma * gamma);
        if !conjugation_closed(&roots) {
            open += 1;
        }
        if ratio >= 1.0 {
            let imag = roots.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            worst_imag = worst_imag.max(imag);
            if imag > 1e-9 {
                complex_above += 1;
            }
        }
    }
    Outcome::new(
        open == 0 && complex_above == 0,
        format!(
            "{open} of 200 spectra not conjugation-closed; {complex_above} complex above g_EP3 (max |Im| = {worst_imag:.2e})"
        ),
    )
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/golden")
}

fn golden_determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir"));
    let mut problems = Vec::new();
    let mut files = 0;
    for fig in Figure::ALL {
        let first = reproduce(fig, a.path()).expect("reproduce");
        reproduce(fig, b.path()).expect("reproduce");
        for path in first {
            files += 1;
            let name = path.file_name().expect("file name").to_owned();
            let bytes = std::fs::read(&path).expect("read output");
            if std::fs::read(b.path().join(&name)).ok().as_ref() != Some(&bytes) {
                problems.push(format!("{} differs between runs", name.to_string_lossy()));
            }
            match std::fs::read(golden_dir().join(&name)) {
                Ok(golden) if golden == bytes => {}
                Ok(_) => problems.push(format!("{} differs from golden", name.to_string_lossy())),
                Err(_) => problems.push(format!("{} has no golden", name.to_string_lossy())),
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("{files} files identical across runs and to goldens")
    } else {
        problems.join("; ")
    };
    Outcome::new(problems.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "EP3 location", ep3_location),
        (2, "triple degeneracy", triple_degeneracy),
        (3, "eigenshift anchor", eigenshift_anchor),
        (4, "slope laws", slope_laws),
        (5, "sensitivity chain", sensitivity),
        (6, "CPA zeros", cpa_zeros),
        (7, "oracle equivalence", oracle_suites),
        (8, "m consistency", m_consistency),
        (9, "spectral symmetry", spectral_symmetry),
        (10, "golden determinism", golden_determinism),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let outcome = check();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} ({name}): {verdict}: {}", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
