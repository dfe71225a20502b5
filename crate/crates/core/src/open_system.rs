//! Thermal Markovian dynamics of four qubits coupled to independent baths.
//!
//! Each `s_α⁽ⁱ⁾` is split into blocks `P_J′ s_α⁽ⁱ⁾ P_J` between the `J`
//! sectors of the collective Hamiltonian. Blocks that change the energy become
//! absorption and emission jump operators with Bose–Einstein rates; blocks
//! inside a sector get a temperature-independent rate `gamma0`. Densities are
//! vectorized column-major and propagated with a fixed-step fourth-order
//! Runge–Kutta map.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{full_labeled_basis, irrep_table};
use crate::error::{invalid, Error, Result};
use crate::operators::{
    collective_hamiltonian, single_spin_operator, Axis, DenseOperator, HamiltonianForm, SystemSpec,
};
use crate::spin::HalfInt;

/// Allowed trace drift before integration is declared failed.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Tolerance for density-matrix validity (trace, Hermiticity, positivity).
pub const DENSITY_TOL: f64 = 1e-8;

const QUBITS: usize = 4;

#[derive(Debug, Clone)]
pub struct Sector {
    pub j: HalfInt,
    pub projector: DenseOperator,
    pub rank: usize,
}

/// Spectral projectors of `(S⃗⁽ⁿ⁾)²`, ordered by increasing `J`.
#[derive(Debug, Clone)]
pub struct SectorProjectors {
    pub n: usize,
    pub sectors: Vec<Sector>,
}

impl SectorProjectors {
    pub fn get(&self, j: HalfInt) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.j == j)
    }

    /// Population `Tr(P_J ρ)` of every sector, in sector order.
    pub fn populations(&self, rho: &DMatrix<C64>) -> Vec<f64> {
        self.sectors
            .iter()
            .map(|s| trace_product(s.projector.matrix(), rho).re)
            .collect()
    }
}

/// `Tr(A B)` without forming the product.
fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let d = a.nrows();
    let mut acc = C64::from(0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn sector_projectors(n: usize) -> Result<SectorProjectors> {
    if n > 8 {
        return invalid(format!("sector projectors support n <= 8, got {n}"));
    }
    let states = full_labeled_basis(n, Axis::Z)?;
    let dim = 1usize << n;
    let mut sectors = Vec::new();
    for row in irrep_table(n)?.rows {
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        let mut rank = 0;
        for s in states.iter().filter(|s| s.final_spin() == row.j) {
            p += &s.vector * s.vector.adjoint();
            rank += 1;
        }
        sectors.push(Sector {
            j: row.j,
            projector: DenseOperator::new(n, p)?.mark_hermitian()?,
            rank,
        });
    }
    Ok(SectorProjectors { n, sectors })
}

/// `P_to s_axis⁽ⁱ⁾ P_from`, taking sector `from_j` to sector `to_j`.
#[derive(Debug, Clone)]
pub struct TransitionOperator {
    pub qubit: usize,
    pub axis: Axis,
    pub from_j: HalfInt,
    pub to_j: HalfInt,
    pub matrix: DenseOperator,
}

impl TransitionOperator {
    /// Whether the selection rules permit a nonzero block.
    pub fn is_allowed(&self) -> bool {
        (self.to_j - self.from_j).twice().abs() <= 2
            && !(self.from_j == HalfInt::ZERO && self.to_j == HalfInt::ZERO)
    }
}

fn blocks_of(
    op: &DenseOperator,
    qubit: usize,
    axis: Axis,
    sectors: &SectorProjectors,
) -> Vec<TransitionOperator> {
    let mut out = Vec::with_capacity(sectors.sectors.len().pow(2));
    for from in &sectors.sectors {
        let right = op * &from.projector;
        for to in &sectors.sectors {
            out.push(TransitionOperator {
                qubit,
                axis,
                from_j: from.j,
                to_j: to.j,
                matrix: &to.projector * &right,
            });
        }
    }
    out
}

/// All sector blocks of `s_axis⁽ⁱ⁾` on four qubits, including the ones the
/// selection rules force to zero.
pub fn transition_decomposition(i: usize, axis: Axis, n: usize) -> Result<Vec<TransitionOperator>> {
    if n != QUBITS {
        return invalid(format!(
            "transition decomposition is defined for four qubits, got {n}"
        ));
    }
    let s = single_spin_operator(axis, i, n)?;
    Ok(blocks_of(&s, i, axis, &sector_projectors(n)?))
}

/// Bose–Einstein occupation `1/(e^{β·gap} − 1)`. `beta` may be `+∞`.
pub fn thermal_occupation(beta: f64, energy_gap: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return invalid(format!("inverse temperature must be positive, got {beta}"));
    }
    if !(energy_gap.is_finite() && energy_gap > 0.0) {
        return invalid(format!("energy gap must be positive, got {energy_gap}"));
    }
    Ok(1.0 / (beta * energy_gap).exp_m1())
}

/// Per-channel coupling magnitudes `g_{i,α}` for the four qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings(pub [[f64; 3]; QUBITS]);

impl Couplings {
    pub fn uniform(g: f64) -> Self {
        Couplings([[g; 3]; QUBITS])
    }

    pub fn get(&self, qubit: usize, axis: Axis) -> f64 {
        self.0[qubit - 1][axis.index()]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Couplings(self.0.map(|row| row.map(|g| g * factor)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpKind {
    /// Raises the energy; rate `g²·n(T)`.
    Absorption,
    /// Lowers the energy; rate `g²·(n(T)+1)`.
    Emission,
    /// Stays inside one sector; rate `gamma0`.
    Dephasing,
}

#[derive(Debug, Clone)]
pub struct JumpTerm {
    pub op: TransitionOperator,
    pub kind: JumpKind,
    /// Energy exchanged with the bath, `(Δ/2)·f(m,n)`; zero for dephasing.
    pub gap: f64,
    pub rate: f64,
}

/// `f(m,n) = n(n+1) − m(m+1)`
pub fn transition_weight(from: HalfInt, to: HalfInt) -> f64 {
    to.casimir() - from.casimir()
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub spec: SystemSpec,
    pub beta: f64,
    pub couplings: Couplings,
    /// Rate of the in-sector blocks; `None` means `g_{i,α}²` per channel.
    pub gamma0: Option<f64>,
    pub hamiltonian: DenseOperator,
    pub jumps: Vec<JumpTerm>,
    pub sectors: SectorProjectors,
}

/// Builds the four-qubit thermal model. Energy-changing blocks with
/// `J < J′` contribute an absorption jump `P_J′ s P_J` and an emission jump
/// `P_J s P_J′`; in-sector blocks other than `J = 0` contribute dephasing.
pub fn build_model(
    spec: SystemSpec,
    beta: f64,
    couplings: Couplings,
    gamma0: Option<f64>,
) -> Result<LindbladModel> {
    if spec.n() != QUBITS {
        return invalid(format!(
            "thermal model is defined for four qubits, got {}",
            spec.n()
        ));
    }
    if beta.is_nan() || beta <= 0.0 {
        return invalid(format!("inverse temperature must be positive, got {beta}"));
    }
    if couplings
        .0
        .iter()
        .flatten()
        .any(|g| !(g.is_finite() && *g >= 0.0))
    {
        return invalid("couplings must be finite and non-negative");
    }
    if let Some(g0) = gamma0 {
        if !(g0.is_finite() && g0 >= 0.0) {
            return invalid(format!("gamma0 must be finite and non-negative, got {g0}"));
        }
    }
    let sectors = sector_projectors(QUBITS)?;
    let hamiltonian = collective_hamiltonian(&spec, HamiltonianForm::SpinSquared)?;
    let mut jumps = Vec::new();
    for qubit in 1..=QUBITS {
        for axis in Axis::ALL {
            let g2 = couplings.get(qubit, axis).powi(2);
            let s = single_spin_operator(axis, qubit, QUBITS)?;
            for block in blocks_of(&s, qubit, axis, &sectors) {
                if !block.is_allowed() {
                    continue;
                }
                let (from, to) = (block.from_j, block.to_j);
                let term = if from == to {
                    JumpTerm {
                        op: block,
                        kind: JumpKind::Dephasing,
                        gap: 0.0,
                        rate: gamma0.unwrap_or(g2),
                    }
                } else {
                    let gap = spec.delta() / 2.0 * transition_weight(from.min(to), from.max(to));
                    let occupation = thermal_occupation(beta, gap)?;
                    if to > from {
                        JumpTerm {
                            op: block,
                            kind: JumpKind::Absorption,
                            gap,
                            rate: g2 * occupation,
                        }
                    } else {
                        JumpTerm {
                            op: block,
                            kind: JumpKind::Emission,
                            gap,
                            rate: g2 * (occupation + 1.0),
                        }
                    }
                };
                jumps.push(term);
            }
        }
    }
    Ok(LindbladModel {
        spec,
        beta,
        couplings,
        gamma0,
        hamiltonian,
        jumps,
        sectors,
    })
}

impl LindbladModel {
    /// Same dissipators, Hamiltonian `H₀ + extra`.
    pub fn with_hamiltonian_term(&self, extra: &DenseOperator) -> Result<Self> {
        if extra.dim() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.hamiltonian.dim(),
                found: extra.dim(),
            });
        }
        let hamiltonian = (&self.hamiltonian + extra).mark_hermitian()?;
        Ok(LindbladModel {
            hamiltonian,
            ..self.clone()
        })
    }

    /// Keeps only the jump terms selected by `keep`.
    pub fn retain_jumps(&self, keep: impl Fn(&JumpTerm) -> bool) -> Self {
        let mut out = self.clone();
        out.jumps.retain(keep);
        out
    }

    pub fn without_dissipators(&self) -> Self {
        self.retain_jumps(|_| false)
    }

    pub fn ground_projector(&self) -> &DenseOperator {
        &self.sectors.sectors[0].projector
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).fold(0.0, f64::max)
    }

    /// Upper bound on the total escape rate from any state:
    /// `Σ γ ‖A‖²` with `‖A‖ ≤ ‖s‖ = ½`.
    pub fn escape_rate_bound(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate * 0.25).sum()
    }

    /// `0.01·min(1/‖H‖, 1/γ_max)` where `‖H‖` is bounded by `3Δ` plus the
    /// entrywise weight of any added control terms.
    pub fn default_dt(&self) -> f64 {
        let energy = self.spec.delta().max(self.hamiltonian.max_abs() / 3.0);
        let rate = self.max_rate();
        let mut scale = 1.0 / energy;
        if rate > 0.0 {
            scale = scale.min(1.0 / rate);
        }
        0.01 * scale
    }

    /// First-order leakage rate out of the ground block for the physical
    /// state `psi`: `Σ_abs γ ⟨ψ|A†A|ψ⟩`.
    pub fn first_order_leakage_rate(&self, psi: &DVector<C64>) -> f64 {
        self.jumps
            .iter()
            .filter(|j| j.kind == JumpKind::Absorption)
            .map(|j| j.rate * (j.op.matrix.matrix() * psi).norm_squared())
            .sum()
    }

    /// `dρ/dt` evaluated directly on a density matrix.
    pub fn apply_generator(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let h = self.hamiltonian.matrix();
        let i = C64::new(0.0, 1.0);
        let mut out = (h * rho - rho * h) * (-i);
        for j in &self.jumps {
            if j.rate == 0.0 {
                continue;
            }
            let a = j.op.matrix.matrix();
            let ad = a.adjoint();
            let ada = &ad * a;
            out += (a * rho * &ad - (&ada * rho + rho * &ada) * C64::from(0.5)) * C64::from(j.rate);
        }
        out
    }

    /// The Liouvillian on column-major `vec(ρ)`.
    pub fn generator(&self) -> DMatrix<C64> {
        let d = self.dim();
        let id = DMatrix::<C64>::identity(d, d);
        let h = self.hamiltonian.matrix();
        let minus_i = C64::new(0.0, -1.0);
        let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * minus_i;
        for j in &self.jumps {
            if j.rate == 0.0 {
                continue;
            }
            let a = j.op.matrix.matrix();
            let ada = a.adjoint() * a;
            let term = a.conjugate().kronecker(a)
                - (id.kronecker(&ada) + ada.transpose().kronecker(&id)) * C64::from(0.5);
            l += term * C64::from(j.rate);
        }
        l
    }
}

/// Fixed-step RK4 map `T = Σ_{k≤4} (hL)^k/k!` on vectorized operators.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    step: DMatrix<C64>,
    dt: f64,
}

impl Propagator {
    pub fn new(model: &LindbladModel, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        let l = model.generator() * C64::from(dt);
        let n = l.nrows();
        let mut step = DMatrix::<C64>::identity(n, n);
        let mut term = DMatrix::<C64>::identity(n, n);
        for k in 1..=4 {
            term = &l * &term * C64::from(1.0 / k as f64);
            step += &term;
        }
        Ok(Propagator {
            dim: model.dim(),
            step,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.step * v
    }

    /// `T^steps` by repeated squaring.
    pub fn evolution_map(&self, mut steps: usize) -> DMatrix<C64> {
        let n = self.step.nrows();
        let mut result = DMatrix::<C64>::identity(n, n);
        let mut base = self.step.clone();
        while steps > 0 {
            if steps & 1 == 1 {
                result = &base * &result;
            }
            steps >>= 1;
            if steps > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Applies `steps` RK4 steps to an arbitrary operator (not necessarily a
    /// density matrix).
    pub fn propagate(&self, op: &DMatrix<C64>, steps: usize) -> DMatrix<C64> {
        let mut v = DVector::from_column_slice(op.as_slice());
        for _ in 0..steps {
            v = &self.step * v;
        }
        DMatrix::from_column_slice(self.dim, self.dim, v.as_slice())
    }
}

/// Checks trace, Hermiticity and positivity of a density matrix.
pub fn validate_density(rho: &DMatrix<C64>, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.nrows(),
        });
    }
    let trace = rho.trace();
    if (trace - C64::from(1.0)).norm() > DENSITY_TOL {
        return invalid(format!("density matrix trace is {trace}, expected 1"));
    }
    let herm = (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if herm > DENSITY_TOL {
        return invalid(format!(
            "density matrix is not Hermitian (deviation {herm:.3e})"
        ));
    }
    let min_eig = min_eigenvalue(rho);
    if min_eig < -DENSITY_TOL {
        return invalid(format!(
            "density matrix has negative eigenvalue {min_eig:.3e}"
        ));
    }
    Ok(())
}

fn min_eigenvalue(rho: &DMatrix<C64>) -> f64 {
    let herm = (rho + rho.adjoint()) * C64::from(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DMatrix<C64>>,
    pub traces: Vec<f64>,
    /// `Tr(P_J ρ)` for each sector, in sector order.
    pub sector_populations: Vec<Vec<f64>>,
    /// Population outside the ground sector, summed over excited sectors.
    pub leakage: Vec<f64>,
    /// Overlap `Tr(ρ₀ ρ(t))` with the initial state; for an encoded pure
    /// state this is the logical fidelity against the identity gate.
    pub logical_fidelity: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Record every this many steps; the final time is always recorded.
    pub record_every: usize,
}

/// Integrates `dρ/dt = −i[H,ρ] + Σ γ (AρA† − ½{A†A,ρ})`, recording every step.
pub fn evolve(
    model: &LindbladModel,
    rho0: &DMatrix<C64>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve_with(
        model,
        rho0,
        &EvolveOptions {
            t_final,
            dt,
            record_every: 1,
        },
    )
}

pub fn evolve_with(
    model: &LindbladModel,
    rho0: &DMatrix<C64>,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    validate_density(rho0, model.dim())?;
    if !(opts.t_final.is_finite() && opts.t_final >= 0.0) {
        return invalid(format!(
            "final time must be non-negative, got {}",
            opts.t_final
        ));
    }
    if !(opts.dt.is_finite() && opts.dt > 0.0) {
        return invalid(format!("time step must be positive, got {}", opts.dt));
    }
    let steps = (opts.t_final / opts.dt).ceil() as usize;
    let h = if steps == 0 {
        opts.dt
    } else {
        opts.t_final / steps as f64
    };
    let propagator = Propagator::new(model, h)?;
    let record_every = opts.record_every.max(1);
    let d = model.dim();

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        traces: Vec::new(),
        sector_populations: Vec::new(),
        leakage: Vec::new(),
        logical_fidelity: Vec::new(),
    };
    let mut v = DVector::from_column_slice(rho0.as_slice());
    record(&mut traj, model, rho0, &v, 0.0)?;
    for k in 1..=steps {
        v = propagator.step_vec(&v);
        let t = k as f64 * h;
        let trace: C64 = (0..d).map(|i| v[i * (d + 1)]).sum();
        if (trace - C64::from(1.0)).norm() > TRACE_DRIFT_LIMIT {
            return Err(Error::IntegrationFailure {
                time: t,
                reason: format!("trace drifted to {trace}"),
            });
        }
        if k % record_every == 0 || k == steps {
            record(&mut traj, model, rho0, &v, t)?;
        }
    }
    Ok(traj)
}

fn record(
    traj: &mut Trajectory,
    model: &LindbladModel,
    rho0: &DMatrix<C64>,
    v: &DVector<C64>,
    t: f64,
) -> Result<()> {
    let d = model.dim();
    let rho = DMatrix::from_column_slice(d, d, v.as_slice());
    let herm = (&rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if herm > DENSITY_TOL {
        return Err(Error::IntegrationFailure {
            time: t,
            reason: format!("lost Hermiticity ({herm:.3e})"),
        });
    }
    let min_eig = min_eigenvalue(&rho);
    if min_eig < -DENSITY_TOL {
        return Err(Error::IntegrationFailure {
            time: t,
            reason: format!("negative eigenvalue {min_eig:.3e}"),
        });
    }
    let pops = model.sectors.populations(&rho);
    traj.times.push(t);
    traj.traces.push(rho.trace().re);
    traj.leakage.push(pops[1..].iter().sum());
    traj.sector_populations.push(pops);
    traj.logical_fidelity.push(trace_product(rho0, &rho).re);
    traj.states.push(rho);
    Ok(())
}

/// Fitted leakage rate out of the ground sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageFit {
    pub gamma: f64,
    /// Analytic first-order rate used to size the window.
    pub gamma_guess: f64,
    pub window: f64,
    pub samples: usize,
    /// Leakage at the end of the window.
    pub final_leakage: f64,
}

const FIT_SAMPLES: usize = 50;

/// Overrides for the leakage fit; unset fields use the automatic window and
/// the model's default step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FitOptions {
    pub window: Option<f64>,
    pub dt: Option<f64>,
}

/// Evolves the encoded state `psi` and fits `1 − Tr(P₀ρ(t)) = 1 − e^{−Γt}`
/// by a least-squares line through `−ln(1 − leakage)` on an initial window.
///
/// The window is `min(0.1/Γ_guess, 0.01/R)` with `R` the escape-rate bound of
/// the model, so population returning from the excited sectors stays a
/// sub-percent correction.
pub fn leakage_rate(model: &LindbladModel, psi: &DVector<C64>) -> Result<LeakageFit> {
    leakage_rate_with(model, psi, FitOptions::default())
}

pub fn leakage_rate_with(
    model: &LindbladModel,
    psi: &DVector<C64>,
    opts: FitOptions,
) -> Result<LeakageFit> {
    let d = model.dim();
    if psi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: psi.len(),
        });
    }
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return invalid("logical state must be normalized");
    }
    let outside = (model.ground_projector().matrix() * psi - psi).norm();
    if outside > 1e-10 {
        return invalid(format!(
            "state is not inside the ground sector (residual {outside:.3e})"
        ));
    }
    let gamma_guess = model.first_order_leakage_rate(psi);
    let bound = model.escape_rate_bound();
    if gamma_guess == 0.0 && bound == 0.0 {
        return Ok(LeakageFit {
            gamma: 0.0,
            gamma_guess,
            window: 0.0,
            samples: 0,
            final_leakage: 0.0,
        });
    }
    let mut window = f64::INFINITY;
    if gamma_guess > 0.0 {
        window = window.min(0.1 / gamma_guess);
    }
    if bound > 0.0 {
        window = window.min(0.01 / bound);
    }
    if let Some(w) = opts.window {
        if !(w.is_finite() && w > 0.0) {
            return invalid(format!("fit window must be positive, got {w}"));
        }
        window = w;
    }
    let base_dt = opts.dt.unwrap_or_else(|| model.default_dt());
    if !(base_dt.is_finite() && base_dt > 0.0) {
        return invalid(format!("time step must be positive, got {base_dt}"));
    }
    let steps_needed = (window / base_dt).ceil() as usize;
    let per_sample = steps_needed.div_ceil(FIT_SAMPLES).max(1);
    let dt = window / (per_sample * FIT_SAMPLES) as f64;
    let rho0 = psi * psi.adjoint();
    let traj = evolve_with(
        model,
        &rho0,
        &EvolveOptions {
            t_final: window,
            dt,
            record_every: per_sample,
        },
    )?;

    for w in traj.leakage.windows(2) {
        if w[1] < w[0] - 1e-14 {
            return Err(Error::Estimation(format!(
                "leakage is not monotone ({} then {})",
                w[0], w[1]
            )));
        }
    }
    let ys: Vec<f64> = traj.leakage.iter().map(|l| -(-l).ln_1p()).collect();
    let gamma = least_squares_slope(&traj.times, &ys)
        .ok_or_else(|| Error::Estimation("degenerate fit window".into()))?;
    let final_leakage = traj.leakage.last().copied().unwrap_or(0.0);
    Ok(LeakageFit {
        gamma,
        gamma_guess,
        window,
        samples: ys.len(),
        final_leakage,
    })
}

/// Slope of the ordinary least-squares line through `(x, y)`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Model parameters shared by every point of a temperature sweep.
#[derive(Debug, Clone)]
pub struct SweepTemplate {
    pub spec: SystemSpec,
    pub couplings: Couplings,
    pub gamma0: Option<f64>,
    /// Physical 16-dimensional encoded state.
    pub state: DVector<C64>,
    pub fit: FitOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub beta: f64,
    pub gamma: f64,
    /// `n(βΔ)` at the ground-to-first-sector gap.
    pub n_thermal: f64,
    pub fit: LeakageFit,
}

/// Fitted leakage rate at each inverse temperature, in input order.
pub fn temperature_sweep(template: &SweepTemplate, betas: &[f64]) -> Result<Vec<SweepPoint>> {
    if betas.is_empty() {
        return invalid("temperature sweep needs at least one inverse temperature");
    }
    betas
        .par_iter()
        .map(|&beta| {
            let model = build_model(template.spec, beta, template.couplings, template.gamma0)?;
            let fit = leakage_rate_with(&model, &template.state, template.fit)?;
            let n_thermal = thermal_occupation(beta, template.spec.delta())?;
            Ok(SweepPoint {
                beta,
                gamma: fit.gamma,
                n_thermal,
                fit,
            })
        })
        .collect()
}

/// Least-squares slope of `ln Γ` against `βΔ`.
pub fn log_rate_slope(points: &[SweepPoint], delta: f64) -> Option<f64> {
    let xs: Vec<f64> = points.iter().map(|p| p.beta * delta).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.gamma.ln()).collect();
    least_squares_slope(&xs, &ys)
}
