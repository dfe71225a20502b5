//! The supercoherent logical qubit: the two `J₄ = 0` states of four qubits,
//! encoded gates driven by exchange couplings, the gate-strength tradeoff,
//! and the eight-qubit ground space.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3xX};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::basis::LabeledState;
use crate::error::{invalid, Error, Result};
use crate::open_system::{validate_density, LindbladModel, Propagator};
use crate::operators::{exchange_operator, total_spin_squared, DenseOperator, LABEL_TOL};
use crate::selection::four_qubit_code_words;

/// Rank tolerance for the real span of 2×2 generators.
const RANK_TOL: f64 = 1e-10;

/// The two code words, ordered `(½,0,½,0)` then `(½,1,½,0)`.
pub fn logical_basis() -> Result<[LabeledState; 2]> {
    four_qubit_code_words()
}

/// 16×2 isometry whose columns are the code words.
fn code_isometry() -> Result<DMatrix<C64>> {
    let [c0, c1] = logical_basis()?;
    Ok(DMatrix::from_columns(&[c0.vector, c1.vector]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalState {
    pub a: C64,
    pub b: C64,
    pub vector: DVector<C64>,
}

pub fn encode(a: C64, b: C64) -> Result<LogicalState> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return invalid(format!(
            "logical amplitudes must be normalized, |a|²+|b|² = {norm}"
        ));
    }
    let [c0, c1] = logical_basis()?;
    let vector = c0.vector * a + c1.vector * b;
    Ok(LogicalState { a, b, vector })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedState {
    /// The code-space block in the logical basis, normalized to unit trace.
    pub logical: Matrix2<C64>,
    /// `1 − Tr(P₀ρ)`
    pub leakage: f64,
}

/// The code-space block of an arbitrary 16×16 operator, unnormalized.
pub fn code_space_block(op: &DMatrix<C64>) -> Result<Matrix2<C64>> {
    if op.nrows() != 16 || op.ncols() != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: op.nrows(),
        });
    }
    let w = code_isometry()?;
    let b = w.adjoint() * op * &w;
    Ok(Matrix2::new(b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]))
}

pub fn decode(rho: &DMatrix<C64>) -> Result<DecodedState> {
    validate_density(rho, 16)?;
    let block = code_space_block(rho)?;
    let kept = block.trace().re;
    if kept <= 1e-15 {
        return invalid("state has no population in the code space");
    }
    Ok(DecodedState {
        logical: block / C64::from(kept),
        leakage: 1.0 - kept,
    })
}

/// `P₀E_ijP₀` in the logical basis.
pub fn projected_generator(i: usize, j: usize) -> Result<Matrix2<C64>> {
    if !(1 <= i && i < j && j <= 4) {
        return invalid(format!(
            "exchange pair must satisfy 1 <= i < j <= 4, got ({i}, {j})"
        ));
    }
    code_space_block(exchange_operator(i, j, 4)?.matrix())
}

/// Pauli coordinates `(c_x, c_y, c_z)` of the traceless Hermitian part of `m`.
pub fn pauli_coordinates(m: &Matrix2<C64>) -> [f64; 3] {
    let h = (m + m.adjoint()) * C64::from(0.5);
    [
        h[(0, 1)].re,
        -h[(0, 1)].im,
        0.5 * (h[(0, 0)].re - h[(1, 1)].re),
    ]
}

/// Dimension of the real span of the traceless Hermitian parts.
pub fn real_span_dimension(ms: &[Matrix2<C64>]) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let cols: Vec<_> = ms
        .iter()
        .map(|m| nalgebra::Vector3::from(pauli_coordinates(m)))
        .collect();
    Matrix3xX::from_columns(&cols).rank(RANK_TOL)
}

/// Dimension of the Lie algebra generated by `generators` under `i[·,·]`,
/// restricted to traceless Hermitian parts.
pub fn lie_closure_dimension(generators: &[Matrix2<C64>]) -> usize {
    let i = C64::new(0.0, 1.0);
    let mut span: Vec<Matrix2<C64>> = generators.to_vec();
    let mut dim = real_span_dimension(&span);
    loop {
        let mut grown = span.clone();
        for a in &span {
            for b in &span {
                grown.push((a * b - b * a) * i);
            }
        }
        let new_dim = real_span_dimension(&grown);
        if new_dim == dim {
            return dim;
        }
        // keep the basis small: only independent elements survive
        span = independent_subset(&grown);
        dim = new_dim;
    }
}

fn independent_subset(ms: &[Matrix2<C64>]) -> Vec<Matrix2<C64>> {
    let mut out: Vec<Matrix2<C64>> = Vec::new();
    for m in ms {
        out.push(*m);
        if real_span_dimension(&out) < out.len() {
            out.pop();
        }
    }
    out
}

/// Algebra generated by the projected exchanges of all six pairs.
pub fn encoded_algebra_dimension() -> Result<usize> {
    let mut gens = Vec::with_capacity(6);
    for i in 1..=4 {
        for j in i + 1..=4 {
            gens.push(projected_generator(i, j)?);
        }
    }
    Ok(lie_closure_dimension(&gens))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityValue {
    pub value: f64,
    /// Set when `δ ≥ Δ`, outside the perturbative regime.
    pub out_of_regime: bool,
}

/// `F = δ·e^{β(Δ−δ)}`, with unit proportionality constant.
pub fn gate_fidelity(delta: f64, gap: f64, beta: f64) -> Result<FidelityValue> {
    if !(delta.is_finite() && delta > 0.0) {
        return invalid(format!("gate strength must be positive, got {delta}"));
    }
    if !(gap.is_finite() && gap > 0.0) {
        return invalid(format!("energy gap must be positive, got {gap}"));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return invalid(format!(
            "inverse temperature must be positive and finite, got {beta}"
        ));
    }
    Ok(FidelityValue {
        value: delta * (beta * (gap - delta)).exp(),
        out_of_regime: delta >= gap,
    })
}

/// `δ₀ = kT = 1/β`, the maximizer of [`gate_fidelity`].
pub fn optimal_delta(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return invalid(format!(
            "inverse temperature must be positive and finite, got {beta}"
        ));
    }
    Ok(1.0 / beta)
}

/// Grid search for the maximum of `F` over `δ = step, 2·step, …, ≤ max`.
/// Returns `(δ*, F(δ*))`; ties keep the smaller `δ`.
pub fn grid_argmax(gap: f64, beta: f64, step: f64, max: f64) -> Result<(f64, f64)> {
    if !(step.is_finite() && step > 0.0 && max >= step) {
        return invalid(format!(
            "grid needs 0 < step <= max, got step {step}, max {max}"
        ));
    }
    let count = (max / step + 1e-9).floor() as usize;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 1..=count {
        let delta = k as f64 * step;
        let f = gate_fidelity(delta, gap, beta)?.value;
        if f > best.1 {
            best = (delta, f);
        }
    }
    Ok(best)
}

/// Exchange couplings `δ_ij E_ij` switched on for `duration`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodedGateSpec {
    pub couplings: Vec<((usize, usize), f64)>,
    pub duration: f64,
}

impl EncodedGateSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return invalid(format!(
                "gate duration must be non-negative, got {}",
                self.duration
            ));
        }
        for &((i, j), d) in &self.couplings {
            if !(1 <= i && i < j && j <= 4) {
                return invalid(format!(
                    "exchange pair must satisfy 1 <= i < j <= 4, got ({i}, {j})"
                ));
            }
            if !d.is_finite() {
                return invalid("coupling strengths must be finite");
            }
        }
        Ok(())
    }

    /// Couplings stronger than a tenth of the gap.
    pub fn warnings(&self, gap: f64) -> Vec<String> {
        self.couplings
            .iter()
            .filter(|(_, d)| d.abs() > 0.1 * gap)
            .map(|((i, j), d)| format!("coupling ({i},{j}) = {d} exceeds 0.1 of the gap {gap}"))
            .collect()
    }

    pub fn control_hamiltonian(&self) -> Result<DenseOperator> {
        self.validate()?;
        let mut h = DenseOperator::zeros(4)?;
        for &((i, j), d) in &self.couplings {
            h = &h + &exchange_operator(i, j, 4)?.scale(d);
        }
        Ok(h)
    }

    /// `exp(−i·t·Σ δ_ij P₀E_ijP₀)` on the logical qubit.
    pub fn ideal_unitary(&self) -> Result<Matrix2<C64>> {
        self.validate()?;
        let mut g = Matrix2::zeros();
        for &((i, j), d) in &self.couplings {
            g += projected_generator(i, j)? * C64::from(d);
        }
        Ok(hermitian_exp(&g, -self.duration))
    }
}

/// `exp(i·t·H)` for a 2×2 Hermitian `H`.
fn hermitian_exp(h: &Matrix2<C64>, t: f64) -> Matrix2<C64> {
    let a0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let [cx, cy, cz] = pauli_coordinates(h);
    let r = (cx * cx + cy * cy + cz * cz).sqrt();
    let i = C64::new(0.0, 1.0);
    let phase = (i * (a0 * t)).exp();
    if r == 0.0 {
        return Matrix2::identity() * phase;
    }
    let (nx, ny, nz) = (cx / r, cy / r, cz / r);
    let n_sigma = Matrix2::new(
        C64::from(nz),
        C64::new(nx, -ny),
        C64::new(nx, ny),
        C64::from(-nz),
    );
    (Matrix2::identity() * C64::from((r * t).cos()) + n_sigma * (i * (r * t).sin())) * phase
}

/// The six logical axis states `±x, ±y, ±z` as amplitude pairs.
pub fn axis_states() -> [(C64, C64); 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        (C64::from(1.0), C64::from(0.0)),
        (C64::from(0.0), C64::from(1.0)),
        (C64::from(r), C64::from(r)),
        (C64::from(r), C64::from(-r)),
        (C64::from(r), C64::new(0.0, r)),
        (C64::from(r), C64::new(0.0, -r)),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome {
    /// Nearest unitary to the achieved logical map, phase-aligned to `ideal`.
    pub achieved: Matrix2<C64>,
    pub ideal: Matrix2<C64>,
    /// Largest entrywise deviation between `achieved` and `ideal`.
    pub unitary_error: f64,
    /// State fidelity with the ideal output, averaged over the six axis
    /// states. Leaked population counts as error.
    pub average_fidelity: f64,
    pub warnings: Vec<String>,
}

/// Runs the gate under `H₀ + Σ δ_ij E_ij` plus the model's dissipators.
pub fn gate_under_noise(spec: &EncodedGateSpec, model: &LindbladModel) -> Result<GateOutcome> {
    let ideal = spec.ideal_unitary()?;
    let driven = model.with_hamiltonian_term(&spec.control_hamiltonian()?)?;
    let map = if spec.duration == 0.0 {
        DMatrix::identity(256, 256)
    } else {
        let steps = (spec.duration / driven.default_dt()).ceil().max(1.0) as usize;
        Propagator::new(&driven, spec.duration / steps as f64)?.evolution_map(steps)
    };
    let apply = |op: DMatrix<C64>| -> DMatrix<C64> {
        let v = &map * DVector::from_column_slice(op.as_slice());
        DMatrix::from_column_slice(16, 16, v.as_slice())
    };

    let w = code_isometry()?;
    let images: Vec<Matrix2<C64>> = (0..2)
        .map(|a| {
            let x = w.column(a) * w.column(0).adjoint();
            code_space_block(&apply(x))
        })
        .collect::<Result<_>>()?;
    // images[a] = U|a⟩⟨0|U†; pick the row k where U_k0 is largest
    let k = if images[0][(0, 0)].re >= images[0][(1, 1)].re {
        0
    } else {
        1
    };
    let u_k0 = images[0][(k, k)].re.max(0.0).sqrt();
    if u_k0 == 0.0 {
        return Err(Error::Estimation(
            "logical map annihilates the code space".into(),
        ));
    }
    let raw = Matrix2::new(
        images[0][(0, k)] / u_k0,
        images[1][(0, k)] / u_k0,
        images[0][(1, k)] / u_k0,
        images[1][(1, k)] / u_k0,
    );
    let svd = raw.svd(true, true);
    let mut achieved = svd.u.expect("requested") * svd.v_t.expect("requested");
    let overlap = (ideal.adjoint() * achieved).trace();
    if overlap.norm() > 0.0 {
        achieved *= (overlap / overlap.norm()).conj();
    }
    let unitary_error = (achieved - ideal)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let mut total = 0.0;
    for (a, b) in axis_states() {
        let input = encode(a, b)?.vector;
        let target = ideal * nalgebra::Vector2::new(a, b);
        let expected = w.column(0) * target[0] + w.column(1) * target[1];
        let out = apply(&input * input.adjoint());
        total += expected.dotc(&(&out * &expected)).re;
    }
    Ok(GateOutcome {
        achieved,
        ideal,
        unitary_error,
        average_fidelity: total / 6.0,
        warnings: spec.warnings(model.spec.delta()),
    })
}

/// Ground space of the eight-qubit collective Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub dimension: usize,
    /// 256 × dimension, orthonormal columns.
    pub basis: DMatrix<C64>,
    /// Distance of each `|c_a⟩⊗|c_b⟩` from the space, for (a,b) = 00, 01, 10, 11.
    pub product_residuals: [f64; 4],
    /// `‖(𝐈−P)E_ij P‖_F` for every pair `i < j`.
    pub exchange_residuals: Vec<((usize, usize), f64)>,
}

/// The `J₈ = 0` eigenspace of `(S⃗⁽⁸⁾)²`, found by diagonalization.
pub fn h8_ground_space() -> Result<GroundSpace> {
    let s2 = total_spin_squared(8, 8)?;
    let eig = s2.into_matrix().symmetric_eigen();
    let cols: Vec<DVector<C64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e.abs() < LABEL_TOL)
        .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
        .collect();
    let basis = DMatrix::from_columns(&cols);
    let distance = |v: &DVector<C64>| (v - &basis * (basis.adjoint() * v)).norm();

    let [c0, c1] = logical_basis()?;
    let words = [&c0.vector, &c1.vector];
    let mut product_residuals = [0.0; 4];
    for (a, wa) in words.iter().enumerate() {
        for (b, wb) in words.iter().enumerate() {
            product_residuals[2 * a + b] = distance(&wa.kronecker(wb));
        }
    }

    let mut exchange_residuals = Vec::with_capacity(28);
    for i in 1..=8 {
        for j in i + 1..=8 {
            let eb = exchange_operator(i, j, 8)?.matrix() * &basis;
            let leaked = &eb - &basis * (basis.adjoint() * &eb);
            exchange_residuals.push(((i, j), leaked.norm()));
        }
    }
    Ok(GroundSpace {
        dimension: cols.len(),
        basis,
        product_residuals,
        exchange_residuals,
    })
}
