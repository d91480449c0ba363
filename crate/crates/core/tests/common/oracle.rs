//! Independent reference computations built on dense linear algebra.
#![allow(dead_code)]

use ep3sense_core::cubic::ComplexTriple;
use ep3sense_core::eigen::Matrix3 as Dense;
use ep3sense_core::{DriveParams, SystemParams};
use nalgebra::{Matrix3, Vector3};
use ep3sense_core::Complex64 as C;

/// Eigenvalues of a dense 3×3 complex matrix from the diagonal of its
/// complex Schur form.
pub fn dense_eigenvalues(m: &Dense) -> ComplexTriple {
    let a = Matrix3::from_fn(|i, j| m[i][j]);
    let t = a
        .try_schur(f64::EPSILON, 100_000)
        .expect("Schur iteration converged")
        .unpack()
        .1;
    ComplexTriple([t[(0, 0)], t[(1, 1)], t[(2, 2)]])
}

/// Coefficients (a₂, a₁, a₀) of det(z − M) = z³ + a₂z² + a₁z + a₀, expanded
/// from the entries of `m`.
pub fn characteristic_coeffs(m: &Dense) -> (C, C, C) {
    let trace = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    (-trace, minors, -det)
}

/// Roots of z³ + a₂z² + a₁z + a₀ as eigenvalues of the companion matrix.
pub fn companion_roots(a2: C, a1: C, a0: C) -> ComplexTriple {
    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    dense_eigenvalues(&[[-a2, -a1, -a0], [one, zero, zero], [zero, one, zero]])
}

/// |S_tot|² from the steady state of the driven Langevin equations solved
/// directly by LU, with a_out = √(2κ_j)·a − a_in on each port.
pub fn langevin_total_output(p: &SystemParams, drive: &DriveParams, omega: f64) -> f64 {
    let i = C::new(0.0, 1.0);
    let k = p.kappa_total();
    let m = Matrix3::new(
        k - i * omega,
        i * p.g1,
        i * p.g2,
        i * p.g1,
        p.gamma1 - i * (omega - p.delta1),
        C::new(0.0, 0.0),
        i * p.g2,
        C::new(0.0, 0.0),
        p.gamma2 - i * (omega - p.delta2),
    );
    let u = C::from_polar(drive.p.sqrt(), -drive.phi);
    let (s1, s2) = ((2.0 * p.kappa1).sqrt(), (2.0 * p.kappa2).sqrt());
    let b = Vector3::new(s1 * u + s2, C::new(0.0, 0.0), C::new(0.0, 0.0));
    let x = m.lu().solve(&b).expect("non-singular Langevin system");
    let a = x[0];
    let out1 = s1 * a - u;
    let out2 = s2 * a - C::new(1.0, 0.0);
    out1.norm_sqr() + out2.norm_sqr()
}
