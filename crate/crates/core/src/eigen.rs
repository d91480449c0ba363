//! Eigenstructure of the three-mode non-Hermitian Hamiltonian.
//!
//! The cavity mode (index 0) carries the effective gain iκ_c; the magnon
//! modes (indices 1 and 2) sit at detunings Δ_j with damping γ_j. On the
//! manifold g² = Δ² + γ² of the symmetric case the Hamiltonian is
//! pseudo-Hermitian, and at g = 2γ/√3 all three eigenpairs coalesce.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::{cardano_roots, cubic_coeffs, monic_cubic_roots, ComplexTriple, CubicCoeffs};
use crate::error::{ensure_positive, Result};
use crate::params::{SymmetricParams, SystemParams, Tolerances};

type C = Complex64;

/// Dense complex 3×3 matrix, row-major.
pub type Matrix3 = [[C; 3]; 3];

/// A complex 3-vector.
pub type Vector3 = [C; 3];

const ZERO: C = C::new(0.0, 0.0);

/// H = [[iκ_c, g₁, g₂], [g₁, Δ₁ − iγ₁, 0], [g₂, 0, Δ₂ − iγ₂]].
pub fn build_hamiltonian(params: &SystemParams) -> Matrix3 {
    let g1 = C::new(params.g1, 0.0);
    let g2 = C::new(params.g2, 0.0);
    [
        [C::new(0.0, params.kappa_c()), g1, g2],
        [g1, C::new(params.delta1, -params.gamma1), ZERO],
        [g2, ZERO, C::new(params.delta2, -params.gamma2)],
    ]
}

/// Hamiltonian of the symmetric case (κ_c = 2γ, Δ₁ = −Δ₂ = Δ).
pub fn symmetric_hamiltonian(sym: &SymmetricParams) -> Matrix3 {
    let g = C::new(sym.g, 0.0);
    [
        [C::new(0.0, 2.0 * sym.gamma), g, g],
        [g, C::new(sym.delta, -sym.gamma), ZERO],
        [g, ZERO, C::new(-sym.delta, -sym.gamma)],
    ]
}

pub fn trace(m: &Matrix3) -> C {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn mat_vec(m: &Matrix3, v: &Vector3) -> Vector3 {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

pub fn vector_norm(v: &Vector3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_norm(m: &Matrix3) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖(H − ΩI)v‖ for a unit vector `v`.
pub fn eigen_residual(h: &Matrix3, value: C, v: &Vector3) -> f64 {
    let hv = mat_vec(h, v);
    let r: Vector3 = [0, 1, 2].map(|i| hv[i] - value * v[i]);
    vector_norm(&r)
}

/// Scales `v` to unit Euclidean norm with its first nonzero entry real and
/// positive. A zero vector is returned unchanged.
pub fn normalize(v: Vector3) -> Vector3 {
    let norm = vector_norm(&v);
    let Some(lead) = v.iter().copied().find(|z| z.norm() > 0.0) else {
        return v;
    };
    let phase = lead.conj() / lead.norm();
    v.map(|z| z * phase / norm)
}

/// Eigenvalues of an arbitrary 3×3 matrix from its characteristic
/// polynomial λ³ − tr λ² + M λ − det = 0 (M: sum of principal 2×2 minors).
pub fn matrix_eigenvalues(m: &Matrix3) -> ComplexTriple {
    let tr = trace(m);
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    monic_cubic_roots(-tr, minors, -det)
}

/// Eigenvalues of the symmetric Hamiltonian via its depressed cubic.
pub fn symmetric_eigenvalues(sym: &SymmetricParams) -> ComplexTriple {
    cardano_roots(&cubic_coeffs(sym))
}

/// √(3g² − 4γ²): positive real above the EP3, positive imaginary below.
pub(crate) fn manifold_splitting(gamma: f64, g: f64) -> C {
    let (a, b) = (3.0 * g * g, 4.0 * gamma * gamma);
    let radicand = if (a - b).abs() <= 16.0 * f64::EPSILON * (a + b) {
        0.0
    } else {
        a - b
    };
    C::new(radicand, 0.0).sqrt()
}

/// Closed-form manifold eigenvalues (0, +√(3g² − 4γ²), −√(3g² − 4γ²)).
pub fn eigenvalues_on_manifold(sym: &SymmetricParams) -> Result<ComplexTriple> {
    eigenvalues_on_manifold_with(sym, &Tolerances::default())
}

pub fn eigenvalues_on_manifold_with(sym: &SymmetricParams, tol: &Tolerances) -> Result<ComplexTriple> {
    sym.require_manifold(tol.algebraic)?;
    let r = manifold_splitting(sym.gamma, sym.g);
    Ok(ComplexTriple([ZERO, r, -r]))
}

/// Eigenvalues together with unit-normalized right eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigentripleWithVectors {
    pub values: ComplexTriple,
    pub vectors: [Vector3; 3],
}

impl EigentripleWithVectors {
    /// Largest ‖(H − Ω_k I)v_k‖ over the three pairs.
    pub fn max_residual(&self, h: &Matrix3) -> f64 {
        (0..3)
            .map(|k| eigen_residual(h, self.values.0[k], &self.vectors[k]))
            .fold(0.0, f64::max)
    }

    pub fn max_pairwise_vector_distance(&self) -> f64 {
        let d = |a: &Vector3, b: &Vector3| {
            vector_norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
        };
        let [a, b, c] = &self.vectors;
        d(a, b).max(d(a, c)).max(d(b, c))
    }
}

/// Closed-form eigenvectors |Φ₀⟩, |Φ₊⟩, |Φ₋⟩ of the pseudo-Hermitian
/// Hamiltonian, paired with the eigenvalues 0, +√(3g² − 4γ²), −√(3g² − 4γ²).
pub fn eigenvectors_on_manifold(sym: &SymmetricParams) -> Result<EigentripleWithVectors> {
    eigenvectors_on_manifold_with(sym, &Tolerances::default())
}

pub fn eigenvectors_on_manifold_with(
    sym: &SymmetricParams,
    tol: &Tolerances,
) -> Result<EigentripleWithVectors> {
    sym.require_manifold(tol.algebraic)?;
    ensure_positive("g", sym.g)?;
    let values = eigenvalues_on_manifold_with(sym, tol)?;
    let g = C::new(sym.g, 0.0);
    let gamma = C::new(0.0, sym.gamma);
    // Δ on the manifold; its sign selects which sphere is above the cavity.
    let s = C::new(sym.delta, 0.0);
    let r = values.0[1];
    let one = C::new(1.0, 0.0);

    let phi0 = [one, (-s - gamma) / g, (s - gamma) / g];
    let phi_plus = [one, g / (r - s + gamma), g / (r + s + gamma)];
    let phi_minus = [one, g / (-r - s + gamma), g / (-r + s + gamma)];
    Ok(EigentripleWithVectors {
        values,
        vectors: [normalize(phi0), normalize(phi_plus), normalize(phi_minus)],
    })
}

/// Location of the third-order exceptional point on the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ep3Point {
    pub g_ep3: f64,
    pub delta_ep3: f64,
}

/// g_EP3 = 2γ/√3 and Δ_EP3 = γ/√3.
pub fn locate_ep3(gamma: f64) -> Result<Ep3Point> {
    ensure_positive("gamma", gamma)?;
    let root3 = 3f64.sqrt();
    Ok(Ep3Point {
        g_ep3: 2.0 * gamma / root3,
        delta_ep3: gamma / root3,
    })
}

/// Numerical confirmation that a located EP3 is a triple coalescence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ep3Check {
    /// Largest |Ω| among the Cardano roots.
    pub max_root_norm: f64,
    pub max_eigenvalue_distance: f64,
    pub max_eigenvector_distance: f64,
}

impl Ep3Check {
    pub fn passes(&self, gamma: f64, tol: &Tolerances) -> bool {
        let value_tol = 1e-8 * gamma;
        self.max_root_norm <= value_tol
            && self.max_eigenvalue_distance <= value_tol
            && self.max_eigenvector_distance <= tol.coalescence
    }
}

pub fn verify_ep3(gamma: f64, point: &Ep3Point) -> Result<Ep3Check> {
    let sym = SymmetricParams::new(gamma, point.g_ep3, point.delta_ep3)?;
    let roots = symmetric_eigenvalues(&sym);
    let vectors = eigenvectors_on_manifold(&sym)?;
    Ok(Ep3Check {
        max_root_norm: roots.max_norm(),
        max_eigenvalue_distance: roots.max_pairwise_distance(),
        max_eigenvector_distance: vectors.max_pairwise_vector_distance(),
    })
}

/// True iff the multiset of eigenvalues is closed under complex conjugation
/// to the default relative tolerance.
pub fn is_pseudo_hermitian_spectrum(triple: &ComplexTriple) -> bool {
    is_pseudo_hermitian_spectrum_with(triple, &Tolerances::default())
}

pub fn is_pseudo_hermitian_spectrum_with(triple: &ComplexTriple, tol: &Tolerances) -> bool {
    let scale = triple.max_norm().max(1.0);
    triple.multiset_distance(&triple.conj()) <= tol.algebraic * scale
}

/// Squared detuning values on the two EP2 lines for coupling `g`.
///
/// Solves 27c₀² + 4c₁³ = 0, which for the symmetric case reads
/// (3γ² − 2g² − x)³ = 27γ²(x + γ² − g²)² with x = Δ², and keeps the real
/// non-negative roots in ascending order.
pub fn ep2_delta_squared(gamma: f64, g: f64) -> Vec<f64> {
    let (y2, g2) = (gamma * gamma, g * g);
    let a = 3.0 * y2 - 2.0 * g2;
    let b = y2 - g2;
    let k = 27.0 * y2;
    // (a − x)³ − k(x + b)² = 0  ⇔  x³ + (k − 3a)x² + (3a² + 2kb)x + (kb² − a³) = 0
    let roots = monic_cubic_roots(
        C::new(k - 3.0 * a, 0.0),
        C::new(3.0 * a * a + 2.0 * k * b, 0.0),
        C::new(k * b * b - a * a * a, 0.0),
    );
    let scale = roots.max_norm().max(1.0);
    let mut out: Vec<f64> = roots
        .0
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * scale && z.re >= -1e-12 * scale)
        .map(|z| z.re.max(0.0))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenvalues of an arbitrary symmetric-case point given Δ², including
/// Δ² < 0 (the analytic continuation of the manifold below g = γ).
pub fn symmetric_eigenvalues_from_delta_sq(gamma: f64, g: f64, delta_sq: f64) -> ComplexTriple {
    cardano_roots(&CubicCoeffs::symmetric_from_delta_sq(gamma, g, delta_sq))
}
