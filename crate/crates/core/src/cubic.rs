//! Depressed complex cubics Ω³ + c₁Ω + c₀ = 0 and their closed-form roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::SymmetricParams;

type C = Complex64;

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Coefficients of the depressed cubic Ω³ + c₁Ω + c₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub c0: C,
    pub c1: C,
}

impl CubicCoeffs {
    pub fn new(c0: C, c1: C) -> Self {
        Self { c0, c1 }
    }

    /// Characteristic polynomial of the symmetric Hamiltonian written in
    /// terms of Δ² so that it can also be evaluated where Δ² < 0.
    ///
    /// Both coefficients are differences of O(γ²) terms. A difference that is
    /// below the rounding noise of its own terms is returned as an exact zero,
    /// which is what makes the EP3 a true triple root in floating point.
    pub fn symmetric_from_delta_sq(gamma: f64, g: f64, delta_sq: f64) -> Self {
        let (g2, y2) = (g * g, gamma * gamma);
        let gap = snap(delta_sq + y2 - g2, delta_sq.abs() + y2 + g2);
        let c1 = snap(3.0 * y2 - 2.0 * g2 - delta_sq, 3.0 * y2 + 2.0 * g2 + delta_sq.abs());
        Self {
            c0: C::new(0.0, 2.0 * gamma * gap),
            c1: C::new(c1, 0.0),
        }
    }

    /// Evaluates Ω³ + c₁Ω + c₀.
    #[inline]
    pub fn eval(&self, omega: C) -> C {
        (omega * omega + self.c1) * omega + self.c0
    }

    /// Scale used for relative residual checks: max(1, |c₀|, |c₁|^{3/2}).
    pub fn residual_scale(&self) -> f64 {
        1f64.max(self.c0.norm()).max(self.c1.norm().powf(1.5))
    }
}

/// c₀ = 2iγ(Δ² + γ² − g²), c₁ = 3γ² − 2g² − Δ².
pub fn cubic_coeffs(sym: &SymmetricParams) -> CubicCoeffs {
    CubicCoeffs::symmetric_from_delta_sq(sym.gamma, sym.g, sym.delta * sym.delta)
}

/// 27c₀² + 4c₁³, which vanishes on the EP2 lines.
pub fn ep2_discriminant(coeffs: &CubicCoeffs) -> C {
    27.0 * coeffs.c0 * coeffs.c0 + 4.0 * coeffs.c1 * coeffs.c1 * coeffs.c1
}

/// Rounds `value` to zero when it is indistinguishable from the rounding
/// noise of terms whose magnitudes sum to `magnitude`.
#[inline]
fn snap(value: f64, magnitude: f64) -> f64 {
    if value.abs() <= 16.0 * f64::EPSILON * magnitude {
        0.0
    } else {
        value
    }
}

/// Three complex eigenvalues Ω⁽⁰⁾, Ω⁽¹⁾, Ω⁽²⁾.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexTriple(pub [C; 3]);

impl ComplexTriple {
    pub fn sum(&self) -> C {
        self.0.iter().sum()
    }

    /// e₁e₂ + e₁e₃ + e₂e₃.
    pub fn pair_sum(&self) -> C {
        let [a, b, c] = self.0;
        a * b + a * c + b * c
    }

    pub fn product(&self) -> C {
        self.0.iter().product()
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_pairwise_distance(&self) -> f64 {
        let [a, b, c] = self.0;
        (a - b).norm().max((a - c).norm()).max((b - c).norm())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn shifted(&self, by: C) -> Self {
        Self(self.0.map(|z| z + by))
    }

    pub fn map(&self, f: impl Fn(C) -> C) -> Self {
        Self(self.0.map(f))
    }

    /// Distance between the two multisets: the smallest, over all pairings,
    /// of the largest paired distance.
    pub fn multiset_distance(&self, other: &ComplexTriple) -> f64 {
        PERMUTATIONS
            .iter()
            .map(|p| {
                (0..3)
                    .map(|i| (self.0[i] - other.0[p[i]]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Reorders `self` so that entry `i` continues entry `i` of `previous`,
    /// using the assignment with minimal total distance.
    pub fn matched_to(&self, previous: &ComplexTriple) -> ComplexTriple {
        let best = PERMUTATIONS
            .iter()
            .min_by(|p, q| {
                let cost = |perm: &[usize; 3]| -> f64 {
                    (0..3).map(|i| (previous.0[i] - self.0[perm[i]]).norm()).sum()
                };
                cost(p).total_cmp(&cost(q))
            })
            .expect("non-empty permutation table");
        ComplexTriple([self.0[best[0]], self.0[best[1]], self.0[best[2]]])
    }
}

/// Principal complex cube root.
fn principal_cbrt(z: C) -> C {
    if z == C::new(0.0, 0.0) {
        return z;
    }
    let (r, theta) = z.to_polar();
    C::from_polar(r.cbrt(), theta / 3.0)
}

/// Roots of Ω³ + c₁Ω + c₀ = 0.
///
/// The Cardano form is evaluated with the principal cube root of the
/// larger-magnitude radical, the second radical is paired through
/// u·v = −c₁/3, and each root is then polished by Newton's method on the
/// cubic. Root order follows (u + v, uω + vω², uω² + vω) with ω = e^{2πi/3}.
pub fn cardano_roots(coeffs: &CubicCoeffs) -> ComplexTriple {
    let CubicCoeffs { c0, c1 } = *coeffs;
    let q = -0.5 * c0;
    let s = (c0 * c0 / 4.0 + c1 * c1 * c1 / 27.0).sqrt();
    let (plus, minus) = (q + s, q - s);
    let radical = if plus.norm() >= minus.norm() { plus } else { minus };
    let u = principal_cbrt(radical);
    if u.norm() == 0.0 {
        // Both radicals vanish only for c₀ = c₁ = 0.
        return ComplexTriple([C::new(0.0, 0.0); 3]);
    }
    let v = -c1 / (3.0 * u);
    let w = C::new(-0.5, 0.5 * 3f64.sqrt());
    let w2 = w * w;
    let raw = ComplexTriple([u + v, u * w + v * w2, u * w2 + v * w]);

    let polished = raw.map(|z| newton_polish(coeffs, z));
    if vieta_consistent(coeffs, &polished) {
        polished
    } else {
        // Newton merged two roots that are nearly degenerate; rebuild the
        // pair from the best-converged root by deflation.
        deflate_from_best(coeffs, &polished)
    }
}

/// Roots of the monic cubic Ω³ + a₂Ω² + a₁Ω + a₀ = 0, computed by shifting
/// to the depressed form and applying [`cardano_roots`].
pub fn monic_cubic_roots(a2: C, a1: C, a0: C) -> ComplexTriple {
    let shift = a2 / 3.0;
    let p = a1 - a2 * shift;
    let q = a0 - a1 * shift + 2.0 * shift * shift * shift;
    cardano_roots(&CubicCoeffs::new(q, p)).shifted(-shift)
}

fn newton_polish(coeffs: &CubicCoeffs, mut z: C) -> C {
    let mut residual = coeffs.eval(z).norm();
    for _ in 0..12 {
        if residual == 0.0 {
            break;
        }
        let slope = 3.0 * z * z + coeffs.c1;
        if slope.norm() == 0.0 {
            break;
        }
        let next = z - coeffs.eval(z) / slope;
        let next_residual = coeffs.eval(next).norm();
        if !(next_residual < residual) {
            break;
        }
        z = next;
        residual = next_residual;
    }
    z
}

fn vieta_consistent(coeffs: &CubicCoeffs, roots: &ComplexTriple) -> bool {
    let scale = roots.max_norm().max(1.0);
    let tol = 1e-10;
    roots.sum().norm() <= tol * scale
        && (roots.pair_sum() - coeffs.c1).norm() <= tol * scale * scale
        && (roots.product() + coeffs.c0).norm() <= tol * scale * scale * scale
}

fn deflate_from_best(coeffs: &CubicCoeffs, roots: &ComplexTriple) -> ComplexTriple {
    let best = roots
        .0
        .iter()
        .copied()
        .min_by(|a, b| coeffs.eval(*a).norm().total_cmp(&coeffs.eval(*b).norm()))
        .expect("three roots");
    // Remaining pair: z² + best·z + (best² + c₁) = 0.
    let b = best;
    let c = best * best + coeffs.c1;
    let disc = (b * b - 4.0 * c).sqrt();
    let big = if (-b + disc).norm() >= (-b - disc).norm() {
        0.5 * (-b + disc)
    } else {
        0.5 * (-b - disc)
    };
    let small = if big.norm() == 0.0 { big } else { c / big };
    ComplexTriple([best, newton_polish(coeffs, big), newton_polish(coeffs, small)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn triple_root_at_origin() {
        let r = cardano_roots(&CubicCoeffs::new(c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(r.max_norm(), 0.0);
    }

    #[test]
    fn decoupled_system_roots() {
        // γ = 1, g = 0, Δ = 0: diagonal eigenvalues {2i, −i, −i}.
        let coeffs = CubicCoeffs::new(c(0.0, 2.0), c(3.0, 0.0));
        let r = cardano_roots(&coeffs);
        let expected = ComplexTriple([c(0.0, 2.0), c(0.0, -1.0), c(0.0, -1.0)]);
        assert!(r.multiset_distance(&expected) < 1e-7, "{r:?}");
        for z in r.0 {
            assert!(coeffs.eval(z).norm() <= 1e-9 * coeffs.residual_scale());
        }
        assert_eq!(ep2_discriminant(&coeffs), c(0.0, 0.0));
    }

    #[test]
    fn coefficients_by_substitution() {
        let k = cubic_coeffs(&SymmetricParams::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(k.c0, c(0.0, 2.0));
        assert_eq!(k.c1, c(3.0, 0.0));
    }

    #[test]
    fn monic_shift_matches_expanded_roots() {
        // (z − 1)(z − 2i)(z + 3) = z³ + (2 − 2i)z² + (−3 − 4i)z + 6i
        let r = monic_cubic_roots(c(2.0, -2.0), c(-3.0, -4.0), c(0.0, 6.0));
        let expected = ComplexTriple([c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        assert!(r.multiset_distance(&expected) < 1e-12);
    }

    #[test]
    fn matching_restores_order() {
        let prev = ComplexTriple([c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        let next = ComplexTriple([c(-1.1, 0.0), c(0.05, 0.0), c(0.9, 0.0)]);
        let m = next.matched_to(&prev);
        assert_eq!(m.0, [c(0.05, 0.0), c(0.9, 0.0), c(-1.1, 0.0)]);
    }
}
