//! Complex linear algebra on the two fixed Hilbert-space dimensions used in
//! this crate: single qubits (2×2) and the Alice⊗Bob pair (4×4).
//!
//! Observables are restricted to the X–Z plane of the Bloch sphere, so a
//! single angle identifies each one. Two-qubit states are density matrices in
//! the product basis |00⟩, |01⟩, |10⟩, |11⟩ with qubit 1 = Alice, qubit 2 =
//! Bob and 0 ↔ H, 1 ↔ V.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Validation thresholds for state matrices.
///
/// `algebraic` bounds Hermiticity and trace defects, `positivity` bounds how
/// far below zero the smallest eigenvalue may sit before a matrix is
/// rejected.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub algebraic: f64,
    pub positivity: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        algebraic: 1e-12,
        positivity: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

macro_rules! impl_square_matrix {
    ($name:ident, $n:expr) => {
        impl $name {
            pub const DIM: usize = $n;

            pub fn zero() -> Self {
                $name([[C_ZERO; $n]; $n])
            }

            pub fn identity() -> Self {
                let mut m = Self::zero();
                for i in 0..$n {
                    m.0[i][i] = C_ONE;
                }
                m
            }

            pub fn from_real(entries: [[f64; $n]; $n]) -> Self {
                let mut m = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] = re(entries[i][j]);
                    }
                }
                m
            }

            /// Conjugate transpose.
            pub fn adjoint(&self) -> Self {
                let mut m = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] = self.0[j][i].conj();
                    }
                }
                m
            }

            pub fn trace(&self) -> Complex64 {
                (0..$n).map(|i| self.0[i][i]).sum()
            }

            pub fn scale(&self, factor: f64) -> Self {
                let mut m = *self;
                for row in m.0.iter_mut() {
                    for entry in row.iter_mut() {
                        *entry *= factor;
                    }
                }
                m
            }

            /// Largest entrywise deviation from `other`.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                let mut worst = 0.0f64;
                for i in 0..$n {
                    for j in 0..$n {
                        worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
                    }
                }
                worst
            }

            /// Largest entrywise deviation from the conjugate transpose.
            pub fn hermiticity_defect(&self) -> f64 {
                self.max_abs_diff(&self.adjoint())
            }

            pub fn mul_vec(&self, v: &[Complex64; $n]) -> [Complex64; $n] {
                let mut out = [C_ZERO; $n];
                for i in 0..$n {
                    for j in 0..$n {
                        out[i] += self.0[i][j] * v[j];
                    }
                }
                out
            }
        }

        impl std::ops::Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                let mut m = self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] += rhs.0[i][j];
                    }
                }
                m
            }
        }

        impl std::ops::Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                let mut m = self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] -= rhs.0[i][j];
                    }
                }
                m
            }
        }

        impl std::ops::Mul for $name {
            type Output = $name;
            fn mul(self, rhs: $name) -> $name {
                let mut m = $name::zero();
                for i in 0..$n {
                    for k in 0..$n {
                        let aik = self.0[i][k];
                        if aik == C_ZERO {
                            continue;
                        }
                        for j in 0..$n {
                            m.0[i][j] += aik * rhs.0[k][j];
                        }
                    }
                }
                m
            }
        }
    };
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// 4×4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl_square_matrix!(Mat2, 2);
impl_square_matrix!(Mat4, 4);

impl Mat2 {
    /// Tensor product `self ⊗ other` in the basis |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn kron(&self, other: &Mat2) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[i][j] * other.0[k][l];
                    }
                }
            }
        }
        m
    }
}

/// Outer product |ψ⟩⟨ψ| of a single-qubit amplitude vector.
pub fn outer2(ket: &[Complex64; 2]) -> Mat2 {
    let mut m = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.0[i][j] = ket[i] * ket[j].conj();
        }
    }
    m
}

/// Outer product |ψ⟩⟨ψ| of a two-qubit amplitude vector.
pub fn outer4(ket: &[Complex64; 4]) -> Mat4 {
    let mut m = Mat4::zero();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = ket[i] * ket[j].conj();
        }
    }
    m
}

/// Which qubit of the pair an operation acts on (qubit 1 = Alice, qubit 2 =
/// the qubit shared by the two Bobs).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qubit {
    Alice,
    Bob,
}

/// Embed a single-qubit operator into the two-qubit space, acting as the
/// identity on the other factor.
pub fn embed(op: &Mat2, on: Qubit) -> Mat4 {
    match on {
        Qubit::Alice => op.kron(&Mat2::identity()),
        Qubit::Bob => Mat2::identity().kron(op),
    }
}

/// A dichotomic qubit observable confined to the X–Z plane, `cos(angle)·X +
/// sin(angle)·Z`, measured from the X axis toward Z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableXZ {
    angle: f64,
}

impl ObservableXZ {
    pub fn new(angle: f64) -> Self {
        assert!(angle.is_finite(), "observable angle must be finite");
        Self { angle }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn matrix(&self) -> Mat2 {
        let (s, c) = self.angle.sin_cos();
        Mat2::from_real([[s, c], [c, -s]])
    }

    /// Projectors onto the +1 and −1 eigenspaces, `(I ± M)/2`.
    pub fn projectors(&self) -> (Mat2, Mat2) {
        let m = self.matrix();
        let id = Mat2::identity();
        ((id + m).scale(0.5), (id - m).scale(0.5))
    }
}

/// Shorthand constructor for [`ObservableXZ`].
pub fn observable(angle: f64) -> ObservableXZ {
    ObservableXZ::new(angle)
}

/// A validated 4×4 density operator over the Alice⊗Bob pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: Mat4,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness under
    /// the default [`Tolerances`].
    pub fn new(rho: Mat4) -> Result<Self> {
        Self::with_tolerances(rho, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(rho: Mat4, tol: &Tolerances) -> Result<Self> {
        let herm = rho.hermiticity_defect();
        if herm > tol.algebraic {
            return Err(Error::NotHermitian(herm));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > tol.algebraic || trace.im.abs() > tol.algebraic {
            return Err(Error::NotUnitTrace(trace.re));
        }
        let min_eig = hermitian_eigenvalues4(&rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol.positivity {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(Self { rho })
    }

    /// For internal use on matrices that are valid by construction.
    pub(crate) fn new_unchecked(rho: Mat4) -> Self {
        debug_assert!(rho.hermiticity_defect() < 1e-9, "state lost Hermiticity");
        debug_assert!((rho.trace().re - 1.0).abs() < 1e-9, "state lost unit trace");
        Self { rho }
    }

    pub fn from_pure(ket: &[Complex64; 4]) -> Result<Self> {
        let norm_sqr: f64 = ket.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { rho: outer4(ket) })
    }

    pub fn rho(&self) -> &Mat4 {
        &self.rho
    }
}

/// The maximally entangled reference state (|00⟩ + |11⟩)/√2.
pub fn phi_plus() -> TwoQubitState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitState::new_unchecked(outer4(&[re(s), C_ZERO, C_ZERO, re(s)]))
}

/// The two-qubit state I/4.
pub fn maximally_mixed() -> TwoQubitState {
    TwoQubitState::new_unchecked(Mat4::identity().scale(0.25))
}

/// ⟨observable(a) ⊗ observable(b)⟩ on `state`, by direct trace evaluation.
///
/// Validity of the input is enforced by the [`TwoQubitState`] constructor;
/// the imaginary residue of the trace is checked to be below 1e−12 and
/// discarded.
pub fn correlator(state: &TwoQubitState, a: f64, b: f64) -> f64 {
    let joint = observable(a).matrix().kron(&observable(b).matrix());
    let value = (*state.rho() * joint).trace();
    debug_assert!(
        value.im.abs() < 1e-12,
        "correlator picked up an imaginary part"
    );
    value.re
}

/// Reduced single-qubit state of the chosen subsystem.
pub fn partial_trace(state: &TwoQubitState, keep: Qubit) -> Mat2 {
    let rho = state.rho();
    let mut out = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.0[i][j] = match keep {
                Qubit::Alice => rho.0[2 * i][2 * j] + rho.0[2 * i + 1][2 * j + 1],
                Qubit::Bob => rho.0[i][j] + rho.0[2 + i][2 + j],
            };
        }
    }
    out
}

fn mat4_conjugate(u: &Mat4, a: &Mat4) -> Mat4 {
    u.adjoint() * *a * *u
}

/// Eigenvalues of a Hermitian 4×4 matrix by cyclic complex Jacobi rotations.
pub(crate) fn hermitian_eigenvalues4(m: &Mat4) -> [f64; 4] {
    let mut a = *m;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += a.0[p][q].norm_sqr();
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let beta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * r);
                let t = -beta.signum() / (beta.abs() + (1.0 + beta * beta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let mut rot = Mat4::identity();
                rot.0[p][p] = re(c);
                rot.0[p][q] = -phase * s;
                rot.0[q][p] = phase.conj() * s;
                rot.0[q][q] = re(c);
                a = mat4_conjugate(&rot, &a);
            }
        }
    }
    [a.0[0][0].re, a.0[1][1].re, a.0[2][2].re, a.0[3][3].re]
}
