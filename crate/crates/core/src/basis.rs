//! Labeled eigenbasis `|J₁,…,Jₙ,m⟩` of the partial collective spins.
//!
//! A [`SpinPath`] records the partial total spins obtained by adding one
//! spin-½ at a time. Its prefix `(J₁,…,Jₙ₋₁)` is the degeneracy index `λ` of
//! the irrep with spin `Jₙ`. States are built by repeated two-spin coupling
//! with Condon–Shortley phases along z, then rotated globally for x or y.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::operators::{
    apply_partial_collective_spin, apply_total_spin_squared, check_qubits, Axis,
};
use crate::spin::HalfInt;

/// Residual allowed when checking that a labeled state carries its labels.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinPath {
    steps: Vec<HalfInt>,
}

impl SpinPath {
    pub fn new(steps: Vec<HalfInt>) -> Result<Self> {
        check_qubits(steps.len())?;
        if steps[0] != HalfInt::HALF {
            return invalid(format!("path must start at 1/2, starts at {}", steps[0]));
        }
        for w in steps.windows(2) {
            if (w[1] - w[0]).twice().abs() != 1 || w[1] < HalfInt::ZERO {
                return invalid(format!("invalid step {} -> {} in spin path", w[0], w[1]));
            }
        }
        Ok(SpinPath { steps })
    }

    /// Parses `"1/2,0,1/2,0"` (parentheses optional).
    pub fn parse(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let steps = inner
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<HalfInt>>>()?;
        SpinPath::new(steps)
    }

    pub fn steps(&self) -> &[HalfInt] {
        &self.steps
    }

    pub fn n(&self) -> usize {
        self.steps.len()
    }

    /// `J_k` for `1 ≤ k ≤ n`.
    pub fn spin_at(&self, k: usize) -> HalfInt {
        self.steps[k - 1]
    }

    pub fn final_spin(&self) -> HalfInt {
        *self.steps.last().expect("paths are never empty")
    }

    /// The degeneracy index `λ = (J₁,…,Jₙ₋₁)`.
    pub fn degeneracy_label(&self) -> &[HalfInt] {
        &self.steps[..self.steps.len() - 1]
    }

    /// Eigenvalue of the final-step operator `Oₙ`: `+(Jₙ₋₁+½)` when the last
    /// step added ½, `−(Jₙ₋₁+½)` when it subtracted. `None` for one qubit.
    pub fn final_step_label(&self) -> Option<HalfInt> {
        let n = self.steps.len();
        if n < 2 {
            return None;
        }
        let prev = self.steps[n - 2];
        let magnitude = prev + HalfInt::HALF;
        Some(if self.steps[n - 1] > prev {
            magnitude
        } else {
            -magnitude
        })
    }
}

impl fmt::Display for SpinPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, j) in self.steps.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}")?;
        }
        f.write_str(")")
    }
}

fn reachable(current: i32, remaining: usize, target: i32) -> bool {
    (current - target).unsigned_abs() as usize <= remaining
}

/// All paths on `n` qubits ending at `Jₙ = j`, in lexicographic order.
///
/// A `j` incompatible with the parity of `n` (or out of range) yields an
/// empty list.
pub fn enumerate_paths(n: usize, j: HalfInt) -> Vec<SpinPath> {
    let target = j.twice();
    if n == 0 || target < 0 || target > n as i32 || (n as i32 - target) % 2 != 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut stack = vec![HalfInt::HALF];
    extend_paths(n, target, &mut stack, &mut out);
    out
}

fn extend_paths(n: usize, target: i32, stack: &mut Vec<HalfInt>, out: &mut Vec<SpinPath>) {
    let k = stack.len();
    let current = stack[k - 1].twice();
    if !reachable(current, n - k, target) {
        return;
    }
    if k == n {
        out.push(SpinPath {
            steps: stack.clone(),
        });
        return;
    }
    for next in [current - 1, current + 1] {
        if next >= 0 {
            stack.push(HalfInt::from_twice(next));
            extend_paths(n, target, stack, out);
            stack.pop();
        }
    }
}

/// Number of paths ending at `j`, the irrep multiplicity `n_J`.
pub fn count_paths(n: usize, j: HalfInt) -> usize {
    if n == 0 {
        return 0;
    }
    // counts[t] = number of paths reaching twice-spin t
    let mut counts = vec![0usize; n + 2];
    counts[1] = 1;
    for _ in 1..n {
        let mut next = vec![0usize; n + 2];
        for (t, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if t > 0 {
                next[t - 1] += c;
            }
            if t + 1 < next.len() {
                next[t + 1] += c;
            }
        }
        counts = next;
    }
    usize::try_from(j.twice())
        .ok()
        .and_then(|t| counts.get(t).copied())
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepRow {
    pub j: HalfInt,
    pub multiplicity: usize,
    pub dimension: usize,
}

/// Decomposition of `n` qubits into `su(2)` irreps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepTable {
    pub n: usize,
    pub rows: Vec<IrrepRow>,
}

impl IrrepTable {
    pub fn multiplicity(&self, j: HalfInt) -> usize {
        self.rows
            .iter()
            .find(|r| r.j == j)
            .map_or(0, |r| r.multiplicity)
    }

    /// `Σ_J n_J (2J+1)`, equal to `2ⁿ`.
    pub fn total_dimension(&self) -> usize {
        self.rows.iter().map(|r| r.multiplicity * r.dimension).sum()
    }
}

pub fn irrep_table(n: usize) -> Result<IrrepTable> {
    check_qubits(n)?;
    let lowest = (n % 2) as i32;
    let rows = (lowest..=n as i32)
        .step_by(2)
        .map(HalfInt::from_twice)
        .map(|j| IrrepRow {
            j,
            multiplicity: count_paths(n, j),
            dimension: j.dimension(),
        })
        .collect();
    Ok(IrrepTable { n, rows })
}

/// A simultaneous eigenvector of every `(S⃗⁽ᵏ⁾)²` and of `S_axis⁽ⁿ⁾`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    pub path: SpinPath,
    pub m: HalfInt,
    pub axis: Axis,
    pub vector: DVector<C64>,
}

impl LabeledState {
    pub fn n(&self) -> usize {
        self.path.n()
    }

    pub fn final_spin(&self) -> HalfInt {
        self.path.final_spin()
    }

    /// Largest residual `‖(S⃗⁽ᵏ⁾)²v − J_k(J_k+1)v‖` over all `k`, together
    /// with `‖S_axis⁽ⁿ⁾v − m v‖` and `|‖v‖ − 1|`.
    pub fn label_residual(&self) -> Result<f64> {
        let n = self.n();
        let v = self.vector.as_slice();
        let mut worst = (self.vector.norm() - 1.0).abs();
        for k in 1..=n {
            let lambda = self.path.spin_at(k).casimir();
            let sv = apply_total_spin_squared(k, n, v)?;
            worst = worst.max(residual_norm(&sv, v, lambda));
        }
        let sv = apply_partial_collective_spin(self.axis, n, n, v)?;
        worst = worst.max(residual_norm(&sv, v, self.m.as_f64()));
        Ok(worst)
    }
}

fn residual_norm(av: &[C64], v: &[C64], eigenvalue: f64) -> f64 {
    av.iter()
        .zip(v)
        .map(|(a, b)| (a - b * eigenvalue).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The whole multiplet `|path, m⟩` along z, indexed by `m = −J, …, J`.
fn z_multiplet(path: &SpinPath) -> Vec<Vec<C64>> {
    let zero = C64::from(0.0);
    let one = C64::from(1.0);
    // spin-1/2: m = −½ is |1⟩, m = +½ is |0⟩
    let mut states: Vec<Vec<C64>> = vec![vec![zero, one], vec![one, zero]];
    for k in 2..=path.n() {
        let tj1 = path.spin_at(k - 1).twice();
        let tj = path.spin_at(k).twice();
        let old_dim = states[0].len();
        let denom = 2.0 * f64::from(tj1 + 1);
        let amp = |num: i32| (f64::from(num) / denom).sqrt();
        let old = |tm: i32| -> Option<&Vec<C64>> {
            if tm.abs() > tj1 {
                None
            } else {
                states.get(((tm + tj1) / 2) as usize)
            }
        };
        let mut next = Vec::with_capacity((tj + 1) as usize);
        for idx in 0..=tj {
            let tm = -tj + 2 * idx;
            let (a_up, a_down) = if tj > tj1 {
                (amp(tj1 + tm + 1), amp(tj1 - tm + 1))
            } else {
                (-amp(tj1 - tm + 1), amp(tj1 + tm + 1))
            };
            let mut v = vec![zero; old_dim * 2];
            if let Some(prev) = old(tm - 1) {
                for (b, &c) in prev.iter().enumerate() {
                    v[2 * b] += c * a_up;
                }
            }
            if let Some(prev) = old(tm + 1) {
                for (b, &c) in prev.iter().enumerate() {
                    v[2 * b + 1] += c * a_down;
                }
            }
            next.push(v);
        }
        states = next;
    }
    states
}

/// Applies the same single-qubit rotation to every qubit, mapping the
/// z quantization axis onto `axis`.
fn rotate_to_axis(axis: Axis, n: usize, v: &mut [C64]) {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let u = match axis {
        Axis::Z => return,
        // exp(−iπ/2 s_y)
        Axis::X => [
            [C64::new(c, 0.0), C64::new(-c, 0.0)],
            [C64::new(c, 0.0), C64::new(c, 0.0)],
        ],
        // exp(+iπ/2 s_x)
        Axis::Y => [
            [C64::new(c, 0.0), C64::new(0.0, c)],
            [C64::new(0.0, c), C64::new(c, 0.0)],
        ],
    };
    for q in 0..n {
        let mask = 1usize << q;
        for b in (0..v.len()).filter(|b| b & mask == 0) {
            let (v0, v1) = (v[b], v[b | mask]);
            v[b] = u[0][0] * v0 + u[0][1] * v1;
            v[b | mask] = u[1][0] * v0 + u[1][1] * v1;
        }
    }
}

fn check_projection(path: &SpinPath, m: HalfInt) -> Result<()> {
    let j = path.final_spin();
    if m.twice().abs() > j.twice() || (j.twice() - m.twice()) % 2 != 0 {
        return invalid(format!("projection {m} not allowed for J = {j}"));
    }
    Ok(())
}

pub fn build_basis_state(path: &SpinPath, m: HalfInt, axis: Axis) -> Result<LabeledState> {
    check_projection(path, m)?;
    let idx = ((m.twice() + path.final_spin().twice()) / 2) as usize;
    let mut v = z_multiplet(path).swap_remove(idx);
    rotate_to_axis(axis, path.n(), &mut v);
    Ok(LabeledState {
        path: path.clone(),
        m,
        axis,
        vector: DVector::from_vec(v),
    })
}

/// Every labeled state of `n` qubits, ordered by `Jₙ` ascending, then path
/// (lexicographic), then `m` ascending. Each state's labels are checked
/// against the spin operators before returning.
pub fn full_labeled_basis(n: usize, axis: Axis) -> Result<Vec<LabeledState>> {
    let table = irrep_table(n)?;
    let mut out = Vec::with_capacity(1 << n);
    for row in &table.rows {
        for path in enumerate_paths(n, row.j) {
            for (m, mut v) in row.j.projections().zip(z_multiplet(&path)) {
                rotate_to_axis(axis, n, &mut v);
                out.push(LabeledState {
                    path: path.clone(),
                    m,
                    axis,
                    vector: DVector::from_vec(v),
                });
            }
        }
    }
    for state in &out {
        let r = state.label_residual()?;
        if r >= EIGEN_RESIDUAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "labeled state {} m={} failed its eigenvalue check (residual {r:.3e})",
                state.path, state.m
            )));
        }
    }
    Ok(out)
}

/// Columns are the state vectors, in the order given.
pub fn basis_matrix(states: &[LabeledState]) -> DMatrix<C64> {
    let columns: Vec<_> = states.iter().map(|s| s.vector.clone()).collect();
    DMatrix::from_columns(&columns)
}
