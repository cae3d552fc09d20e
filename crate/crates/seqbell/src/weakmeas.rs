//! Two-outcome weak measurement of an X–Z observable with tunable strength.
//!
//! The strength parameter θ ∈ [0, π/4] interpolates between a projective
//! measurement (θ = 0) and no measurement at all (θ = π/4). The precision
//! factor G = cos 2θ is the information gained per outcome and the quality
//! factor F = sin 2θ is the coherence left behind; the family saturates
//! G² + F² = 1, which is what makes it optimal.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::qmath::{embed, observable, Mat2, Mat4, ObservableXZ, Qubit, TwoQubitState};

/// A dichotomic measurement outcome. The ancilla readout 0 maps to `Plus`,
/// 1 to `Minus`, so that ⟨outcome⟩ = +G·⟨observable⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

/// A weak measurement: strength θ plus the X–Z angle of the measured
/// observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakMeasurement {
    theta: f64,
    basis_angle: f64,
}

impl WeakMeasurement {
    /// θ = 0 is projective, θ = π/4 leaves the state untouched.
    pub fn from_theta(theta: f64, basis_angle: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&theta) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        Ok(Self { theta, basis_angle })
    }

    /// Construct from the precision factor G ∈ [0, 1] via θ = arccos(G)/2.
    pub fn from_precision(g: f64, basis_angle: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::PrecisionOutOfRange(g));
        }
        Ok(Self {
            theta: g.acos() / 2.0,
            basis_angle,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn basis_angle(&self) -> f64 {
        self.basis_angle
    }

    /// Precision factor G = cos 2θ.
    pub fn precision(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// Quality factor F = sin 2θ.
    pub fn quality(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    pub fn observable(&self) -> ObservableXZ {
        observable(self.basis_angle)
    }

    /// The Kraus pair K₊ = cosθ·Π₊ + sinθ·Π₋ and K₋ = sinθ·Π₊ + cosθ·Π₋,
    /// with Π± the eigenprojectors of the measured observable.
    pub fn kraus_pair(&self) -> KrausPair {
        let (pi_plus, pi_minus) = self.observable().projectors();
        let (s, c) = self.theta.sin_cos();
        KrausPair {
            k_plus: pi_plus.scale(c) + pi_minus.scale(s),
            k_minus: pi_plus.scale(s) + pi_minus.scale(c),
        }
    }
}

/// The two Kraus operators of a weak measurement, indexed by outcome.
/// Both are Hermitian and positive semidefinite, and they satisfy
/// K₊†K₊ + K₋†K₋ = I.
#[derive(Clone, Copy, Debug)]
pub struct KrausPair {
    pub k_plus: Mat2,
    pub k_minus: Mat2,
}

impl KrausPair {
    pub fn operator(&self, outcome: Outcome) -> &Mat2 {
        match outcome {
            Outcome::Plus => &self.k_plus,
            Outcome::Minus => &self.k_minus,
        }
    }

    /// Largest entrywise deviation of K₊†K₊ + K₋†K₋ from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self.k_plus.adjoint() * self.k_plus + self.k_minus.adjoint() * self.k_minus;
        sum.max_abs_diff(&Mat2::identity())
    }
}

/// Outcome-averaged channel ρ → K₊ρK₊† + K₋ρK₋† on the chosen qubit.
///
/// Algebraically this equals F·ρ + (1−F)·(Π₊ρΠ₊ + Π₋ρΠ₋).
pub fn apply_unconditional(
    state: &TwoQubitState,
    wm: &WeakMeasurement,
    on: Qubit,
) -> TwoQubitState {
    let pair = wm.kraus_pair();
    let mut rho = Mat4::zero();
    for outcome in Outcome::BOTH {
        let k = embed(pair.operator(outcome), on);
        rho = rho + k * *state.rho() * k.adjoint();
    }
    TwoQubitState::new_unchecked(rho)
}

/// Post-measurement state and probability of one outcome branch.
///
/// Returns [`Error::ZeroProbabilityBranch`] when the branch cannot occur;
/// the state would be undefined there.
pub fn apply_conditional(
    state: &TwoQubitState,
    wm: &WeakMeasurement,
    on: Qubit,
    outcome: Outcome,
) -> Result<(TwoQubitState, f64)> {
    let k = embed(wm.kraus_pair().operator(outcome), on);
    let unnormalized = k * *state.rho() * k.adjoint();
    let p = unnormalized.trace().re;
    if p < 1e-13 {
        return Err(Error::ZeroProbabilityBranch);
    }
    Ok((TwoQubitState::new_unchecked(unnormalized.scale(1.0 / p)), p))
}

/// The ancilla-coupling unitary realizing the weak measurement by dilation,
/// in the basis |system, ancilla⟩ = |00⟩, |01⟩, |10⟩, |11⟩:
///
/// ```text
///   ⎛ cosθ  −sinθ    0      0   ⎞
///   ⎜ sinθ   cosθ    0      0   ⎟
///   ⎜  0      0     sinθ  −cosθ ⎟
///   ⎝  0      0     cosθ   sinθ ⎠
/// ```
///
/// Acting on ψ ⊗ |0⟩ and reading the ancilla in the 0/1 basis induces the
/// Kraus pair of a θ-strength measurement in the system's 0/1 basis.
pub fn ancilla_unitary(theta: f64) -> Mat4 {
    let (s, c) = theta.sin_cos();
    Mat4::from_real([
        [c, -s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, s, -c],
        [0.0, 0.0, c, s],
    ])
}

/// Kraus operators induced by [`ancilla_unitary`]: M_k = (I ⊗ ⟨k|) U (I ⊗ |0⟩).
pub fn dilation_kraus(theta: f64) -> KrausPair {
    let u = ancilla_unitary(theta);
    let mut ops = [Mat2::zero(), Mat2::zero()];
    for (k, op) in ops.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                op.0[i][j] = u.0[2 * i + k][2 * j];
            }
        }
    }
    let [k_plus, k_minus] = ops;
    KrausPair { k_plus, k_minus }
}
