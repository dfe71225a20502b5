//! Matrix elements of single-qubit operators in the labeled basis and the
//! selection rules they obey.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::basis::{
    basis_matrix, build_basis_state, enumerate_paths, full_labeled_basis, LabeledState,
};
use crate::error::{invalid, Error, Result};
use crate::operators::{exchange_operator, single_spin_operator, Axis, DenseOperator};
use crate::spin::HalfInt;

/// Magnitude below which a matrix element counts as vanishing.
pub const FORBIDDEN_TOL: f64 = 1e-12;

/// Tolerance for identities that hold up to accumulated roundoff.
pub const IDENTITY_TOL: f64 = 1e-10;

/// `⟨bra|op|ket⟩`
pub fn matrix_element(bra: &LabeledState, op: &DenseOperator, ket: &LabeledState) -> Result<C64> {
    for v in [&bra.vector, &ket.vector] {
        if v.len() != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                found: v.len(),
            });
        }
    }
    Ok(bra.vector.dotc(&(op.matrix() * &ket.vector)))
}

/// The operator expressed in the given states: `V† A V`.
pub fn labeled_matrix(op: &DenseOperator, states: &[LabeledState]) -> Result<DMatrix<C64>> {
    if let Some(s) = states.iter().find(|s| s.vector.len() != op.dim()) {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: s.vector.len(),
        });
    }
    let v = basis_matrix(states);
    Ok(v.adjoint() * op.matrix() * v)
}

/// Largest violation of
/// `(Oₙ′ + Oₙ)⟨λ,Oₙ,m|s_α⁽ⁿ⁾|λ′,Oₙ′,m′⟩ = m δ_{λλ′} δ_{OₙOₙ′} δ_{mm′}`
/// over every pair of the basis quantized along `axis`.
pub fn verify_final_step_identity(n: usize, axis: Axis) -> Result<f64> {
    if !(2..=8).contains(&n) {
        return invalid(format!(
            "final-step identity check needs 2 <= n <= 8, got {n}"
        ));
    }
    let states = full_labeled_basis(n, axis)?;
    let s = labeled_matrix(&single_spin_operator(axis, n, n)?, &states)?;
    let labels: Vec<f64> = states
        .iter()
        .map(|st| st.path.final_step_label().expect("n >= 2").as_f64())
        .collect();
    let mut worst = 0.0f64;
    for (a, bra) in states.iter().enumerate() {
        for (b, ket) in states.iter().enumerate() {
            let lhs = s[(a, b)] * (labels[a] + labels[b]);
            // same λ, same Oₙ and same m means the same basis state
            let rhs = if a == b { bra.m.as_f64() } else { 0.0 };
            debug_assert!(a != b || bra.path == ket.path);
            worst = worst.max((lhs - C64::from(rhs)).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateLabel {
    pub path: String,
    pub j: String,
    pub m: String,
}

impl From<&LabeledState> for StateLabel {
    fn from(s: &LabeledState) -> Self {
        StateLabel {
            path: s.path.to_string(),
            j: s.final_spin().to_string(),
            m: s.m.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementEntry {
    pub bra: StateLabel,
    pub ket: StateLabel,
    pub re: f64,
    pub im: f64,
}

/// Classification of the nonzero elements of `s_axis⁽ⁱ⁾` in the z-quantized
/// labeled basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixElementReport {
    pub n: usize,
    pub axis: Axis,
    pub qubit: usize,
    pub pairs_examined: usize,
    /// Elements with magnitude at least [`FORBIDDEN_TOL`].
    pub nonzero: Vec<ElementEntry>,
    /// Nonzero element counts keyed by `"J_bra->J_ket"`.
    pub counts_by_sector: BTreeMap<String, usize>,
    /// Nonzero elements whose bra and ket projections differ.
    pub m_mixing_count: usize,
    /// Largest element with `|ΔJₙ| ≥ 2`.
    pub max_forbidden_delta_j: f64,
    /// Largest element between two `Jₙ = 0` states.
    pub max_ground_block: f64,
    /// Largest element linking a `Jₙ = 0` state to a sector other than `Jₙ = 1`.
    pub max_ground_to_other: f64,
    pub delta_j_rule_holds: bool,
    pub ground_block_vanishes: bool,
    pub ground_connects_only_to_j1: bool,
}

impl MatrixElementReport {
    pub fn all_pass(&self) -> bool {
        self.delta_j_rule_holds && self.ground_block_vanishes && self.ground_connects_only_to_j1
    }
}

pub fn selection_rule_scan(n: usize, i: usize, axis: Axis) -> Result<MatrixElementReport> {
    if !(1..=8).contains(&n) || i == 0 || i > n {
        return invalid(format!(
            "selection scan needs 1 <= i <= n <= 8, got i = {i}, n = {n}"
        ));
    }
    let states = full_labeled_basis(n, Axis::Z)?;
    let s = labeled_matrix(&single_spin_operator(axis, i, n)?, &states)?;
    let mut nonzero = Vec::new();
    let mut counts_by_sector = BTreeMap::new();
    let mut m_mixing_count = 0;
    let mut max_forbidden_delta_j = 0.0f64;
    let mut max_ground_block = 0.0f64;
    let mut max_ground_to_other = 0.0f64;
    for (a, bra) in states.iter().enumerate() {
        for (b, ket) in states.iter().enumerate() {
            let z = s[(a, b)];
            let (jb, jk) = (bra.final_spin(), ket.final_spin());
            if (jb - jk).twice().abs() >= 4 {
                max_forbidden_delta_j = max_forbidden_delta_j.max(z.norm());
            }
            if jb == HalfInt::ZERO && jk == HalfInt::ZERO {
                max_ground_block = max_ground_block.max(z.norm());
            }
            if (jb == HalfInt::ZERO && jk != HalfInt::ONE)
                || (jk == HalfInt::ZERO && jb != HalfInt::ONE)
            {
                max_ground_to_other = max_ground_to_other.max(z.norm());
            }
            if z.norm() < FORBIDDEN_TOL {
                continue;
            }
            if bra.m != ket.m {
                m_mixing_count += 1;
            }
            *counts_by_sector.entry(format!("{jb}->{jk}")).or_insert(0) += 1;
            nonzero.push(ElementEntry {
                bra: bra.into(),
                ket: ket.into(),
                re: z.re,
                im: z.im,
            });
        }
    }
    Ok(MatrixElementReport {
        n,
        axis,
        qubit: i,
        pairs_examined: states.len() * states.len(),
        nonzero,
        counts_by_sector,
        m_mixing_count,
        max_forbidden_delta_j,
        max_ground_block,
        max_ground_to_other,
        delta_j_rule_holds: max_forbidden_delta_j < FORBIDDEN_TOL,
        ground_block_vanishes: max_ground_block < FORBIDDEN_TOL,
        ground_connects_only_to_j1: max_ground_to_other < FORBIDDEN_TOL,
    })
}

/// The two `J₄ = 0` states in lexicographic path order.
pub fn four_qubit_code_words() -> Result<[LabeledState; 2]> {
    let paths = enumerate_paths(4, HalfInt::ZERO);
    Ok([
        build_basis_state(&paths[0], HalfInt::ZERO, Axis::Z)?,
        build_basis_state(&paths[1], HalfInt::ZERO, Axis::Z)?,
    ])
}

/// `⟨c_a|op|c_b⟩` over the two four-qubit code words.
pub fn code_block(op: &DenseOperator) -> Result<Matrix2<C64>> {
    if op.n_qubits() != 4 {
        return invalid("code block is defined on four qubits");
    }
    let words = four_qubit_code_words()?;
    let mut block = Matrix2::zeros();
    for (a, bra) in words.iter().enumerate() {
        for (b, ket) in words.iter().enumerate() {
            block[(a, b)] = matrix_element(bra, op, ket)?;
        }
    }
    Ok(block)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorDetectionReport {
    pub passed: bool,
    /// Largest Frobenius norm of any single-qubit code block.
    pub worst_block_norm: f64,
    /// `(qubit, axis, block norm)` for every single-qubit operator.
    pub blocks: Vec<(usize, Axis, f64)>,
}

/// Checks that all twelve `s_α⁽ⁱ⁾` have a vanishing block on the `J₄ = 0`
/// code space.
pub fn error_detection_check() -> Result<ErrorDetectionReport> {
    let mut blocks = Vec::with_capacity(12);
    for i in 1..=4 {
        for axis in Axis::ALL {
            let norm = code_block(&single_spin_operator(axis, i, 4)?)?.norm();
            blocks.push((i, axis, norm));
        }
    }
    let worst_block_norm = blocks.iter().map(|b| b.2).fold(0.0, f64::max);
    Ok(ErrorDetectionReport {
        passed: worst_block_norm < FORBIDDEN_TOL,
        worst_block_norm,
        blocks,
    })
}

/// Largest entrywise deviation of `s_α⁽ⁱ⁾` from `E_in s_α⁽ⁿ⁾ E_in`.
pub fn exchange_conjugation_check(i: usize, n: usize, axis: Axis) -> Result<f64> {
    if i >= n {
        return invalid(format!(
            "exchange conjugation needs i < n, got i = {i}, n = {n}"
        ));
    }
    let e = exchange_operator(i, n, n)?;
    let conjugated = &(&e * &single_spin_operator(axis, n, n)?) * &e;
    Ok(conjugated.max_abs_diff(&single_spin_operator(axis, i, n)?))
}
