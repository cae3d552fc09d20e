//! Jones-calculus simulation of the dual-rail weak-measurement optics.
//!
//! A photon carries a polarization qubit (H/V) and occupies one of three
//! parallel spatial modes. Half-wave plates act on polarization within
//! selected modes; beam displacers shift the V component one step along the
//! mode ladder while H passes straight through. The full network splits the
//! input, rotates each arm by the strength plates, swaps the polarization
//! and spatial degrees of freedom, and reads the measurement outcome off the
//! spatial mode, realizing the same Kraus pair as [`crate::weakmeas`].
//!
//! Plate angles carry the usual factor-of-two conventions: a plate at φ/2
//! maps the basis {cos φ|H⟩ + sin φ|V⟩, …} onto {H, V}, and that basis
//! diagonalizes the X–Z observable at angle π/2 − 2φ. The conversion lives
//! in [`observable_angle`] / [`basis_angle`] so the rest of the crate never
//! repeats it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{outer4, re, Mat2, TwoQubitState};
use crate::weakmeas::{KrausPair, Outcome};

/// Photon polarization, `H` ↔ logical 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// One of the three parallel spatial modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialMode {
    #[serde(rename = "l")]
    Lower,
    #[serde(rename = "c")]
    Center,
    #[serde(rename = "u")]
    Upper,
}

impl SpatialMode {
    pub const ALL: [SpatialMode; 3] = [SpatialMode::Lower, SpatialMode::Center, SpatialMode::Upper];

    fn index(self) -> usize {
        match self {
            SpatialMode::Lower => 0,
            SpatialMode::Center => 1,
            SpatialMode::Upper => 2,
        }
    }
}

/// Joint polarization ⊗ spatial-mode amplitudes. The squared norm may drop
/// below one only when routing discards amplitude; the networks built here
/// are loss-free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualRailState {
    amp: [[Complex64; 3]; 2],
}

impl DualRailState {
    pub fn vacuum() -> Self {
        Self {
            amp: [[re(0.0); 3]; 2],
        }
    }

    /// A polarization qubit occupying a single spatial mode.
    pub fn from_polarization(qubit: &[Complex64; 2], mode: SpatialMode) -> Result<Self> {
        let norm_sqr: f64 = qubit.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let mut state = Self::vacuum();
        state.amp[0][mode.index()] = qubit[0];
        state.amp[1][mode.index()] = qubit[1];
        Ok(state)
    }

    pub fn amplitude(&self, pol: Polarization, mode: SpatialMode) -> Complex64 {
        self.amp[pol.index()][mode.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    /// Polarization amplitudes within one spatial mode.
    pub fn polarization_in(&self, mode: SpatialMode) -> [Complex64; 2] {
        [self.amp[0][mode.index()], self.amp[1][mode.index()]]
    }

    /// Probability of finding the photon in `mode`.
    pub fn mode_probability(&self, mode: SpatialMode) -> f64 {
        self.polarization_in(mode)
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Post-select on `mode`: normalized polarization state and the
    /// probability of that outcome.
    pub fn project_mode(&self, mode: SpatialMode) -> Result<([Complex64; 2], f64)> {
        let raw = self.polarization_in(mode);
        let p = raw.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if p < 1e-13 {
            return Err(Error::ZeroPostSelection);
        }
        let scale = p.sqrt();
        Ok(([raw[0] / scale, raw[1] / scale], p))
    }
}

/// Ordering of the mode ladder a beam displacer steps along. The two
/// layouts differ in where the auxiliary third mode sits relative to the
/// pair of working rails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BdOrder {
    /// l < c < u (the central mode lies between the rails).
    LowerCenterUpper,
    /// l < u < c (the auxiliary mode lies above both rails).
    LowerUpperCenter,
}

impl BdOrder {
    fn ladder(self) -> [SpatialMode; 3] {
        match self {
            BdOrder::LowerCenterUpper => {
                [SpatialMode::Lower, SpatialMode::Center, SpatialMode::Upper]
            }
            BdOrder::LowerUpperCenter => {
                [SpatialMode::Lower, SpatialMode::Upper, SpatialMode::Center]
            }
        }
    }
}

/// Displacement direction along the ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BdDirection {
    Up,
    Down,
}

/// One element of an optical network.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    /// Half-wave plate at `plate_angle`, covering the listed modes.
    Hwp {
        plate_angle: f64,
        modes: Vec<SpatialMode>,
    },
    /// Beam displacer: V moves one step along the ladder, H passes through.
    /// V amplitude stepping off the ladder is discarded as loss.
    Bd {
        order: BdOrder,
        direction: BdDirection,
    },
    /// Reroute two spatial modes into each other (both polarizations).
    ModeSwap { a: SpatialMode, b: SpatialMode },
}

impl OpticalElement {
    pub fn hwp(plate_angle: f64, modes: &[SpatialMode]) -> Self {
        OpticalElement::Hwp {
            plate_angle,
            modes: modes.to_vec(),
        }
    }

    pub fn apply(&self, state: &DualRailState) -> DualRailState {
        match self {
            OpticalElement::Hwp { plate_angle, modes } => {
                let jones = hwp(*plate_angle);
                let mut out = *state;
                for mode in modes {
                    let m = mode.index();
                    let vec = [state.amp[0][m], state.amp[1][m]];
                    let rotated = jones.mul_vec(&vec);
                    out.amp[0][m] = rotated[0];
                    out.amp[1][m] = rotated[1];
                }
                out
            }
            OpticalElement::Bd { order, direction } => {
                let ladder = order.ladder();
                let mut out = *state;
                // V amplitudes move one ladder step; H stays put
                for slot in out.amp[1].iter_mut() {
                    *slot = re(0.0);
                }
                for (pos, mode) in ladder.iter().enumerate() {
                    let v = state.amp[1][mode.index()];
                    if v == re(0.0) {
                        continue;
                    }
                    let target = match direction {
                        BdDirection::Up => pos.checked_add(1).filter(|&p| p < 3),
                        BdDirection::Down => pos.checked_sub(1),
                    };
                    if let Some(t) = target {
                        out.amp[1][ladder[t].index()] += v;
                    }
                }
                out
            }
            OpticalElement::ModeSwap { a, b } => {
                let mut out = *state;
                for pol in 0..2 {
                    out.amp[pol].swap(a.index(), b.index());
                }
                out
            }
        }
    }

    /// Flat description for the JSON circuit export.
    pub fn descriptor(&self) -> ElementDescriptor {
        match self {
            OpticalElement::Hwp { plate_angle, modes } => ElementDescriptor {
                kind: "hwp".into(),
                angle: Some(*plate_angle),
                modes: modes.clone(),
            },
            OpticalElement::Bd { order, direction } => ElementDescriptor {
                kind: match direction {
                    BdDirection::Up => "bd_up".into(),
                    BdDirection::Down => "bd_down".into(),
                },
                angle: None,
                modes: order.ladder().to_vec(),
            },
            OpticalElement::ModeSwap { a, b } => ElementDescriptor {
                kind: "mode_swap".into(),
                angle: None,
                modes: vec![*a, *b],
            },
        }
    }
}

/// Element description as exported to JSON: `{kind, angle, modes}`.
#[derive(Clone, Debug, Serialize)]
pub struct ElementDescriptor {
    pub kind: String,
    pub angle: Option<f64>,
    pub modes: Vec<SpatialMode>,
}

/// Apply a sequence of elements.
pub fn apply_network(elements: &[OpticalElement], input: &DualRailState) -> DualRailState {
    elements
        .iter()
        .fold(*input, |state, element| element.apply(&state))
}

/// JSON circuit description for a network.
pub fn circuit_json(elements: &[OpticalElement]) -> String {
    let descriptors: Vec<ElementDescriptor> = elements.iter().map(|e| e.descriptor()).collect();
    serde_json::to_string_pretty(&descriptors).expect("descriptors serialize")
}

/// Jones matrix of an ideal half-wave plate at plate angle `h`:
/// [[cos 2h, sin 2h], [sin 2h, −cos 2h]].
///
/// The two canonical settings used by the routing stages are returned
/// exactly: h = 0 reflects about H and h = π/4 exchanges H and V.
pub fn hwp(plate_angle: f64) -> Mat2 {
    if plate_angle == 0.0 {
        return Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]);
    }
    if plate_angle == FRAC_PI_4 {
        return Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]);
    }
    let (s, c) = (2.0 * plate_angle).sin_cos();
    Mat2::from_real([[c, s], [s, -c]])
}

/// X–Z observable angle measured by a plate pair set for basis angle `phi`,
/// i.e. the observable whose +1 eigenstate is cos φ|H⟩ + sin φ|V⟩.
pub fn observable_angle(phi: f64) -> f64 {
    FRAC_PI_2 - 2.0 * phi
}

/// Inverse of [`observable_angle`]: the polarization basis angle whose
/// measurement realizes the X–Z observable at `angle`.
pub fn basis_angle(angle: f64) -> f64 {
    (FRAC_PI_2 - angle) / 2.0
}

/// The polarization↔spatial swap stage: a beam-displacer pair around a 45°
/// plate on the upper rail, with the auxiliary mode above both rails.
/// Restricted to the rails it maps |H,l⟩→|H,l⟩, |H,u⟩→|V,l⟩, |V,l⟩→|H,u⟩,
/// |V,u⟩→|V,u⟩ exactly.
pub fn swap_network() -> Vec<OpticalElement> {
    vec![
        OpticalElement::Bd {
            order: BdOrder::LowerUpperCenter,
            direction: BdDirection::Up,
        },
        OpticalElement::hwp(FRAC_PI_4, &[SpatialMode::Upper]),
        OpticalElement::Bd {
            order: BdOrder::LowerUpperCenter,
            direction: BdDirection::Down,
        },
    ]
}

/// The full weak-measurement network: basis rotation into H/V, a beam
/// displacer splitting the polarizations onto the two rails, the two
/// strength plates (the V-arm rotation is the composite of its physical
/// plate pair), the swap stage, and the basis rotation back in each rail.
///
/// Mode l carries the +1 outcome, mode u the −1 outcome.
pub fn weak_measurement_network(theta: f64, phi: f64) -> Vec<OpticalElement> {
    let mut elements = vec![
        OpticalElement::hwp(phi / 2.0, &[SpatialMode::Lower]),
        OpticalElement::Bd {
            order: BdOrder::LowerUpperCenter,
            direction: BdDirection::Up,
        },
        OpticalElement::hwp(theta / 2.0, &[SpatialMode::Lower]),
        OpticalElement::hwp(FRAC_PI_2 - theta / 2.0, &[SpatialMode::Upper]),
    ];
    elements.extend(swap_network());
    elements.push(OpticalElement::hwp(phi / 2.0, &[SpatialMode::Lower]));
    elements.push(OpticalElement::hwp(phi / 2.0, &[SpatialMode::Upper]));
    elements
}

/// Run a polarization qubit through the weak-measurement network.
///
/// The output carries amplitude α'(cosθ|l⟩ + sinθ|u⟩) on the +1 eigenstate
/// of the measured basis and β'(sinθ|l⟩ + cosθ|u⟩) on the −1 eigenstate,
/// where (α', β') are the input components in that basis.
pub fn simulate_weak_measurement(
    theta: f64,
    phi: f64,
    input: &[Complex64; 2],
) -> Result<DualRailState> {
    let state = DualRailState::from_polarization(input, SpatialMode::Lower)?;
    Ok(apply_network(&weak_measurement_network(theta, phi), &state))
}

/// Kraus pair induced by the network with spatial-mode readout: columns are
/// the mode-l (+1) and mode-u (−1) output amplitudes of basis inputs.
pub fn induced_kraus(theta: f64, phi: f64) -> KrausPair {
    let mut k_plus = Mat2::zero();
    let mut k_minus = Mat2::zero();
    for (col, basis) in [[re(1.0), re(0.0)], [re(0.0), re(1.0)]].iter().enumerate() {
        let out = simulate_weak_measurement(theta, phi, basis).expect("basis input is normalized");
        for row in 0..2 {
            let pol = Polarization::BOTH[row];
            k_plus.0[row][col] = out.amplitude(pol, SpatialMode::Lower);
            k_minus.0[row][col] = out.amplitude(pol, SpatialMode::Upper);
        }
    }
    KrausPair { k_plus, k_minus }
}

/// The simplified single-outcome layout: the photon enters the central
/// mode, the displacer pair splits and recombines around it, and finding
/// the photon back in the central mode heralds the chosen outcome.
///
/// `outcome` selects the plate setting: φ/2 realizes the +1 branch, and
/// rotating the outer plates to φ/2 + π/4 realizes the −1 branch of the
/// same measurement.
pub fn postselected_network(theta: f64, phi: f64, outcome: Outcome) -> Vec<OpticalElement> {
    let plate = match outcome {
        Outcome::Plus => phi / 2.0,
        Outcome::Minus => phi / 2.0 + FRAC_PI_4,
    };
    vec![
        OpticalElement::hwp(plate, &[SpatialMode::Center]),
        OpticalElement::Bd {
            order: BdOrder::LowerCenterUpper,
            direction: BdDirection::Up,
        },
        OpticalElement::hwp(theta / 2.0, &[SpatialMode::Center]),
        OpticalElement::hwp(FRAC_PI_4 + theta / 2.0, &[SpatialMode::Upper]),
        OpticalElement::Bd {
            order: BdOrder::LowerCenterUpper,
            direction: BdDirection::Down,
        },
        OpticalElement::hwp(plate, &[SpatialMode::Center]),
    ]
}

/// Post-selected weak measurement in the simplified layout: the normalized
/// polarization state found in the central mode and the post-selection
/// probability.
pub fn simulate_postselected(
    theta: f64,
    phi: f64,
    outcome: Outcome,
    input: &[Complex64; 2],
) -> Result<([Complex64; 2], f64)> {
    let state = DualRailState::from_polarization(input, SpatialMode::Center)?;
    let output = apply_network(&postselected_network(theta, phi, outcome), &state);
    output.project_mode(SpatialMode::Center)
}

/// Outcome of [`swap_check`]: the basis-mapping table, unitarity on the
/// rail subspace, and agreement with the canonical exchange matrix.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SwapCheck {
    pub table_exact: bool,
    pub unitarity_defect: f64,
    pub exchange_defect: f64,
}

impl SwapCheck {
    pub fn pass(&self) -> bool {
        self.table_exact && self.unitarity_defect == 0.0 && self.exchange_defect == 0.0
    }
}

/// Verify the swap stage: each of the four (polarization, rail) basis
/// states must map to its exchanged partner exactly, and the stage must act
/// on the rail subspace as the canonical 4×4 exchange permutation.
pub fn swap_check() -> SwapCheck {
    let network = swap_network();
    let rails = [SpatialMode::Lower, SpatialMode::Upper];
    // matrix of the stage restricted to (pol ⊗ rail), basis order
    // |H,l⟩, |H,u⟩, |V,l⟩, |V,u⟩
    let mut matrix = [[re(0.0); 4]; 4];
    for (col, (pol, rail)) in Polarization::BOTH
        .iter()
        .flat_map(|p| rails.iter().map(move |r| (*p, *r)))
        .enumerate()
    {
        let mut input = DualRailState::vacuum();
        input.amp[pol.index()][rail.index()] = re(1.0);
        let output = apply_network(&network, &input);
        for (row, (pol_out, rail_out)) in Polarization::BOTH
            .iter()
            .flat_map(|p| rails.iter().map(move |r| (*p, *r)))
            .enumerate()
        {
            matrix[row][col] = output.amplitude(pol_out, rail_out);
        }
    }

    // |H,l⟩→|H,l⟩, |H,u⟩→|V,l⟩, |V,l⟩→|H,u⟩, |V,u⟩→|V,u⟩
    let exchange = [
        [re(1.0), re(0.0), re(0.0), re(0.0)],
        [re(0.0), re(0.0), re(1.0), re(0.0)],
        [re(0.0), re(1.0), re(0.0), re(0.0)],
        [re(0.0), re(0.0), re(0.0), re(1.0)],
    ];
    let mut exchange_defect = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            exchange_defect = exchange_defect.max((matrix[i][j] - exchange[i][j]).norm());
        }
    }

    let mut unitarity_defect = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut dot = re(0.0);
            for row in &matrix {
                dot += row[i].conj() * row[j];
            }
            let target = if i == j { re(1.0) } else { re(0.0) };
            unitarity_defect = unitarity_defect.max((dot - target).norm());
        }
    }

    SwapCheck {
        table_exact: exchange_defect == 0.0,
        unitarity_defect,
        exchange_defect,
    }
}

/// The source state produced in the laboratory, (|HH⟩ − |VV⟩)/√2.
pub fn experimental_source() -> TwoQubitState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitState::new_unchecked(outer4(&[re(s), re(0.0), re(0.0), re(-s)]))
}

/// The experimental source after the local Z correction on Bob's qubit,
/// which maps it onto the (|00⟩ + |11⟩)/√2 reference state used by the
/// analysis modules.
pub fn corrected_source() -> TwoQubitState {
    let z = hwp(0.0);
    let correction = crate::qmath::embed(&z, crate::qmath::Qubit::Bob);
    TwoQubitState::new_unchecked(correction * *experimental_source().rho() * correction.adjoint())
}
