//! Complex 2x2 matrix kernel: arithmetic, closed-form eigendecomposition,
//! and the eigenvalue-to-action probability extraction.

use std::ops::{Add, Mul};

use num_complex::Complex64;

/// Dense complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl CMatrix2 {
    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> CMatrix2 {
        CMatrix2 { m11, m12, m21, m22 }
    }

    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> CMatrix2 {
        CMatrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn zero() -> CMatrix2 {
        let z = Complex64::new(0.0, 0.0);
        CMatrix2::new(z, z, z, z)
    }

    pub fn identity() -> CMatrix2 {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        CMatrix2::new(o, z, z, o)
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn adjoint(&self) -> CMatrix2 {
        CMatrix2::new(
            self.m11.conj(),
            self.m21.conj(),
            self.m12.conj(),
            self.m22.conj(),
        )
    }

    pub fn scale(&self, s: f64) -> CMatrix2 {
        CMatrix2::new(
            self.m11.scale(s),
            self.m12.scale(s),
            self.m21.scale(s),
            self.m22.scale(s),
        )
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.m11
            .norm()
            .max(self.m12.norm())
            .max(self.m21.norm())
            .max(self.m22.norm())
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m11 * v[0] + self.m12 * v[1],
            self.m21 * v[0] + self.m22 * v[1],
        ]
    }

    pub fn approx_eq(&self, other: &CMatrix2, tol: f64) -> bool {
        (self.m11 - other.m11).norm() <= tol
            && (self.m12 - other.m12).norm() <= tol
            && (self.m21 - other.m21).norm() <= tol
            && (self.m22 - other.m22).norm() <= tol
    }

    pub fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for CMatrix2 {
    type Output = CMatrix2;

    fn add(self, rhs: CMatrix2) -> CMatrix2 {
        CMatrix2::new(
            self.m11 + rhs.m11,
            self.m12 + rhs.m12,
            self.m21 + rhs.m21,
            self.m22 + rhs.m22,
        )
    }
}

impl Mul for CMatrix2 {
    type Output = CMatrix2;

    fn mul(self, rhs: CMatrix2) -> CMatrix2 {
        CMatrix2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

/// One eigenvalue with a unit-norm eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub vector: [Complex64; 2],
}

/// Both eigenpairs, ordered by descending eigenvalue modulus (ties broken by
/// descending real part, then descending imaginary part). For a defective
/// matrix the second vector duplicates the first and `defective` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    pub first: EigenPair,
    pub second: EigenPair,
    pub defective: bool,
}

fn eigen_order(a: Complex64, b: Complex64) -> bool {
    // True when `a` should come first.
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na != nb {
        return na > nb;
    }
    if a.re != b.re {
        return a.re > b.re;
    }
    a.im >= b.im
}

fn normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let mut out = [v[0].unscale(n), v[1].unscale(n)];
    // Canonical phase: rotate so the dominant component is real positive.
    let lead = if out[0].norm_sqr() >= out[1].norm_sqr() {
        out[0]
    } else {
        out[1]
    };
    let mag = lead.norm();
    if mag > 0.0 {
        let phase = lead.unscale(mag).conj();
        out = [out[0] * phase, out[1] * phase];
    }
    out
}

/// Kernel vector of (M - lambda I), or None when the candidate rows vanish
/// (scalar matrix).
fn kernel_vector(m: &CMatrix2, lambda: Complex64, tol: f64) -> Option<[Complex64; 2]> {
    let c1 = [m.m12, lambda - m.m11];
    let c2 = [lambda - m.m22, m.m21];
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
    let best = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    if best.1 <= tol * tol {
        None
    } else {
        Some(normalize(best.0))
    }
}

/// Closed-form eigendecomposition from the characteristic polynomial
/// `lambda^2 - tr(M) lambda + det(M)`.
pub fn eigen2(m: &CMatrix2) -> EigenDecomposition {
    let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let e2 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];

    let scale = m.max_abs();
    if scale <= f64::MIN_POSITIVE {
        // Zero matrix: eigenvalue 0 with the canonical basis.
        let z = Complex64::new(0.0, 0.0);
        return EigenDecomposition {
            first: EigenPair {
                lambda: z,
                vector: e1,
            },
            second: EigenPair {
                lambda: z,
                vector: e2,
            },
            defective: false,
        };
    }

    let n = m.scale(1.0 / scale);
    let tr = n.trace();
    let det = n.det();
    let sq = (tr * tr - det.scale(4.0)).sqrt();
    // Take the root of larger magnitude first to avoid cancellation.
    let q_plus = tr + sq;
    let q_minus = tr - sq;
    let l1 = if q_plus.norm_sqr() >= q_minus.norm_sqr() {
        q_plus.unscale(2.0)
    } else {
        q_minus.unscale(2.0)
    };
    let l2 = tr - l1;
    let (l1, l2) = if eigen_order(l1, l2) { (l1, l2) } else { (l2, l1) };

    let tol = 1e-14;
    let v1 = kernel_vector(&n, l1, tol);
    let v2 = kernel_vector(&n, l2, tol);

    let (vec1, vec2, defective) = match (v1, v2) {
        (Some(a), Some(b)) => {
            let repeated = (l1 - l2).norm() <= 1e-12;
            if repeated {
                // Equal eigenvalues with a one-dimensional eigenspace.
                (a, a, true)
            } else {
                (a, b, false)
            }
        }
        // A vanishing kernel row means the matrix is (that eigenvalue times)
        // the identity, so every vector qualifies; use the canonical basis.
        (None, None) => (e1, e2, false),
        (Some(a), None) => (a, e2, false),
        (None, Some(b)) => (e1, b, false),
    };

    EigenDecomposition {
        first: EigenPair {
            lambda: l1.scale(scale),
            vector: vec1,
        },
        second: EigenPair {
            lambda: l2.scale(scale),
            vector: vec2,
        },
        defective,
    }
}

/// How eigenvalue magnitudes become a probability distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `p_i = |lambda_i|^2 / (|lambda_1|^2 + |lambda_2|^2)`.
    #[default]
    ModulusSquared,
    /// `p_i = |lambda_i| / (|lambda_1| + |lambda_2|)`.
    Modulus,
}

/// Eigenvalue moduli below this are treated as zero.
pub const DEGENERATE_EPSILON: f64 = 1e-12;

/// Extract the two action probabilities from a decision matrix.
///
/// The leading eigenvalue (largest modulus) is assigned to action 1 when its
/// eigenvector leans toward the first basis component, to action 2 when it
/// leans toward the second, and to action 1 on an exact tie; the other
/// eigenvalue takes the remaining action. A matrix with both eigenvalues
/// below [`DEGENERATE_EPSILON`] yields (0.5, 0.5).
pub fn action_probabilities_with(m: &CMatrix2, norm: Normalization) -> (f64, f64) {
    let dec = eigen2(m);
    let n1 = dec.first.lambda.norm();
    let n2 = dec.second.lambda.norm();
    if n1 < DEGENERATE_EPSILON && n2 < DEGENERATE_EPSILON {
        return (0.5, 0.5);
    }
    let (w1, w2) = match norm {
        Normalization::ModulusSquared => (n1 * n1, n2 * n2),
        Normalization::Modulus => (n1, n2),
    };
    let p_first = w1 / (w1 + w2);
    let v = dec.first.vector;
    if v[0].norm_sqr() >= v[1].norm_sqr() {
        (p_first, 1.0 - p_first)
    } else {
        (1.0 - p_first, p_first)
    }
}

pub fn action_probabilities(m: &CMatrix2) -> (f64, f64) {
    action_probabilities_with(m, Normalization::default())
}
