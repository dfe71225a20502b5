//! Spin-1/2 operators on `n` qubits as dense complex matrices.
//!
//! Conventions: `s = σ/2` with `ħ = 1`, and qubit 1 is the leftmost (most
//! significant) tensor factor, so qubit `i` lives on bit `n - i` of the
//! computational-basis index. Computational state `|0⟩` is spin up along z.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest supported qubit count (dimension 1024).
pub const MAX_QUBITS: usize = 10;

/// Absolute tolerance for Hermiticity and entrywise operator equality.
pub const OPERATOR_TOL: f64 = 1e-12;

/// Tolerance used when rounding an eigenvalue back to a spin label.
pub const LABEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub const fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Levi-Civita symbol over the cyclic order x → y → z.
    pub fn levi_civita(a: Axis, b: Axis, c: Axis) -> f64 {
        let (a, b, c) = (a.index() as i32, b.index() as i32, c.index() as i32);
        if a == b || b == c || a == c {
            0.0
        } else if (b - a).rem_euclid(3) == 1 && (c - b).rem_euclid(3) == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => invalid(format!("unknown axis '{other}'")),
        }
    }
}

/// Qubit count and exchange energy scale `Δ` of a collective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    n: usize,
    delta: f64,
}

impl SystemSpec {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        check_qubits(n)?;
        if !(delta.is_finite() && delta > 0.0) {
            return invalid(format!(
                "energy scale must be positive and finite, got {delta}"
            ));
        }
        Ok(SystemSpec { n, delta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return invalid(format!("qubit count must be in 1..={MAX_QUBITS}, got {n}"));
    }
    Ok(())
}

fn check_index(name: &str, i: usize, n: usize) -> Result<()> {
    check_qubits(n)?;
    if i == 0 || i > n {
        return invalid(format!("{name} must be in 1..={n}, got {i}"));
    }
    Ok(())
}

/// Which of the two equivalent expressions of the collective Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianForm {
    /// `(Δ/2)(S⃗⁽ⁿ⁾)²`
    SpinSquared,
    /// `(Δ/2)(Σ_{i≠j} s⃗⁽ⁱ⁾·s⃗⁽ʲ⁾ + (3n/4)𝐈)`
    PairwiseHeisenberg,
}

/// A complex square matrix acting on the `2ⁿ`-dimensional space of `n` qubits.
///
/// The Hermitian flag is only ever set after checking `max|M − M†| < 1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl DenseOperator {
    pub fn new(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(DenseOperator {
            n_qubits,
            matrix,
            hermitian: false,
        })
    }

    /// Builds the operator and sets the Hermitian flag, failing if the matrix
    /// is not Hermitian to within [`OPERATOR_TOL`].
    pub fn hermitian(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        DenseOperator::new(n_qubits, matrix)?.mark_hermitian()
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(DenseOperator {
            n_qubits,
            matrix: DMatrix::identity(dim, dim),
            hermitian: true,
        })
    }

    pub fn zeros(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(DenseOperator {
            n_qubits,
            matrix: DMatrix::zeros(dim, dim),
            hermitian: true,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `max|M − M†|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for c in 0..d {
            for r in c..d {
                worst = worst.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn mark_hermitian(mut self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev >= OPERATOR_TOL {
            return invalid(format!("operator is not Hermitian (deviation {dev:.3e})"));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, factor: f64) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * C64::from(factor),
            hermitian: self.hermitian,
        }
    }

    pub fn scale_complex(&self, factor: C64) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * factor,
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    /// `[A, B] = AB − BA`
    pub fn commutator(&self, other: &DenseOperator) -> DenseOperator {
        &(self * other) - &(other * self)
    }

    /// `{A, B} = AB + BA`
    pub fn anticommutator(&self, other: &DenseOperator) -> DenseOperator {
        &(self * other) + &(other * self)
    }

    /// Largest entrywise modulus of `A − B`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "operator dimensions differ");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(&self.matrix * v)
    }

    /// Real eigenvalues in ascending order. Requires the Hermitian flag.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return invalid("eigenvalues requested for an operator not flagged Hermitian");
        }
        let mut values: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "qubit counts differ");
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix + &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "qubit counts differ");
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix - &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "qubit counts differ");
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &rhs.matrix,
            hermitian: false,
        }
    }
}

/// A matrix with exactly one nonzero entry per column: column `c` maps to row
/// `rows[c]` with coefficient `coeffs[c]`. Single-spin operators and their
/// products all have this shape.
#[derive(Debug, Clone)]
pub(crate) struct Monomial {
    rows: Vec<usize>,
    coeffs: Vec<C64>,
}

impl Monomial {
    pub(crate) fn single_spin(axis: Axis, i: usize, n: usize) -> Monomial {
        let dim = 1usize << n;
        let mask = 1usize << (n - i);
        let half = 0.5;
        let mut rows = Vec::with_capacity(dim);
        let mut coeffs = Vec::with_capacity(dim);
        for col in 0..dim {
            let down = col & mask != 0;
            let (row, c) = match axis {
                Axis::Z => (col, C64::new(if down { -half } else { half }, 0.0)),
                Axis::X => (col ^ mask, C64::new(half, 0.0)),
                // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
                Axis::Y => (col ^ mask, C64::new(0.0, if down { -half } else { half })),
            };
            rows.push(row);
            coeffs.push(c);
        }
        Monomial { rows, coeffs }
    }

    /// `self ∘ other`
    pub(crate) fn compose(&self, other: &Monomial) -> Monomial {
        let (rows, coeffs) = other
            .rows
            .iter()
            .zip(&other.coeffs)
            .map(|(&mid, &c)| (self.rows[mid], self.coeffs[mid] * c))
            .unzip();
        Monomial { rows, coeffs }
    }

    pub(crate) fn add_to_dense(&self, target: &mut DMatrix<C64>, weight: C64) {
        for (col, (&row, &c)) in self.rows.iter().zip(&self.coeffs).enumerate() {
            target[(row, col)] += weight * c;
        }
    }

    /// Accumulates `weight · self · m` into `target`.
    fn left_mul_dense_into(&self, m: &DMatrix<C64>, target: &mut DMatrix<C64>, weight: C64) {
        // (self · m)[row_c, j] += coeff_c · m[c, j]
        for (c, (&row, &coeff)) in self.rows.iter().zip(&self.coeffs).enumerate() {
            let w = weight * coeff;
            for j in 0..m.ncols() {
                target[(row, j)] += w * m[(c, j)];
            }
        }
    }

    pub(crate) fn apply_into(&self, v: &[C64], out: &mut [C64], weight: C64) {
        for (col, (&row, &c)) in self.rows.iter().zip(&self.coeffs).enumerate() {
            out[row] += weight * c * v[col];
        }
    }
}

/// `s_α⁽ⁱ⁾`: half the Pauli matrix on qubit `i`, identity elsewhere.
pub fn single_spin_operator(axis: Axis, i: usize, n: usize) -> Result<DenseOperator> {
    check_index("qubit index", i, n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    Monomial::single_spin(axis, i, n).add_to_dense(&mut m, C64::from(1.0));
    DenseOperator::hermitian(n, m)
}

/// `S_α⁽ᵏ⁾ = Σ_{i=1..k} s_α⁽ⁱ⁾`
pub fn partial_collective_spin(axis: Axis, k: usize, n: usize) -> Result<DenseOperator> {
    check_index("partial spin order", k, n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 1..=k {
        Monomial::single_spin(axis, i, n).add_to_dense(&mut m, C64::from(1.0));
    }
    DenseOperator::hermitian(n, m)
}

/// `(S⃗⁽ᵏ⁾)² = Σ_α S_α⁽ᵏ⁾ S_α⁽ᵏ⁾`, with each product formed explicitly.
pub fn total_spin_squared(k: usize, n: usize) -> Result<DenseOperator> {
    check_index("partial spin order", k, n)?;
    let dim = 1usize << n;
    let mut total = DMatrix::zeros(dim, dim);
    for axis in Axis::ALL {
        let s = partial_collective_spin(axis, k, n)?;
        for i in 1..=k {
            Monomial::single_spin(axis, i, n).left_mul_dense_into(
                s.matrix(),
                &mut total,
                C64::from(1.0),
            );
        }
    }
    DenseOperator::hermitian(n, total)
}

fn heisenberg_monomials(i: usize, j: usize, n: usize) -> impl Iterator<Item = Monomial> {
    Axis::ALL
        .into_iter()
        .map(move |a| Monomial::single_spin(a, i, n).compose(&Monomial::single_spin(a, j, n)))
}

/// `s⃗⁽ⁱ⁾·s⃗⁽ʲ⁾ = Σ_α s_α⁽ⁱ⁾ s_α⁽ʲ⁾`. Indices may coincide.
pub fn heisenberg_coupling(i: usize, j: usize, n: usize) -> Result<DenseOperator> {
    check_index("qubit index", i, n)?;
    check_index("qubit index", j, n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for mono in heisenberg_monomials(i, j, n) {
        mono.add_to_dense(&mut m, C64::from(1.0));
    }
    DenseOperator::hermitian(n, m)
}

/// `E_ij = ½𝐈 + 2 s⃗⁽ⁱ⁾·s⃗⁽ʲ⁾`, the swap of qubits `i` and `j`.
pub fn exchange_operator(i: usize, j: usize, n: usize) -> Result<DenseOperator> {
    check_index("qubit index", i, n)?;
    check_index("qubit index", j, n)?;
    if i >= j {
        return invalid(format!("exchange requires i < j, got ({i}, {j})"));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::identity(dim, dim) * C64::from(0.5);
    for mono in heisenberg_monomials(i, j, n) {
        mono.add_to_dense(&mut m, C64::from(2.0));
    }
    DenseOperator::hermitian(n, m)
}

/// The collective Hamiltonian `H₀⁽ⁿ⁾` in either of its two forms.
pub fn collective_hamiltonian(spec: &SystemSpec, form: HamiltonianForm) -> Result<DenseOperator> {
    let n = spec.n();
    let half_delta = spec.delta() / 2.0;
    match form {
        HamiltonianForm::SpinSquared => Ok(total_spin_squared(n, n)?.scale(half_delta)),
        HamiltonianForm::PairwiseHeisenberg => {
            let dim = 1usize << n;
            let mut m = DMatrix::identity(dim, dim) * C64::from(0.75 * n as f64);
            for i in 1..=n {
                for j in (1..=n).filter(|&j| j != i) {
                    for mono in heisenberg_monomials(i, j, n) {
                        mono.add_to_dense(&mut m, C64::from(1.0));
                    }
                }
            }
            Ok(DenseOperator::hermitian(n, m)?.scale(half_delta))
        }
    }
}

/// `Oₙ = −¼𝐈 + (S⃗⁽ⁿ⁾)² − (S⃗⁽ⁿ⁻¹⁾)²`, defined for `n > 1`.
pub fn o_n_operator(n: usize) -> Result<DenseOperator> {
    check_qubits(n)?;
    if n < 2 {
        return invalid("the final-step operator is only defined for n > 1");
    }
    let shifted = &total_spin_squared(n, n)? - &total_spin_squared(n - 1, n)?;
    Ok(&shifted - &DenseOperator::identity(n)?.scale(0.25))
}

fn check_vector(v: &[C64], n: usize) -> Result<()> {
    if v.len() != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: v.len(),
        });
    }
    Ok(())
}

/// `S_α⁽ᵏ⁾ v` without forming the matrix.
pub fn apply_partial_collective_spin(
    axis: Axis,
    k: usize,
    n: usize,
    v: &[C64],
) -> Result<Vec<C64>> {
    check_index("partial spin order", k, n)?;
    check_vector(v, n)?;
    let mut out = vec![C64::from(0.0); v.len()];
    for i in 1..=k {
        Monomial::single_spin(axis, i, n).apply_into(v, &mut out, C64::from(1.0));
    }
    Ok(out)
}

/// `(S⃗⁽ᵏ⁾)² v` without forming the matrix.
pub fn apply_total_spin_squared(k: usize, n: usize, v: &[C64]) -> Result<Vec<C64>> {
    let mut out = vec![C64::from(0.0); v.len()];
    for axis in Axis::ALL {
        let once = apply_partial_collective_spin(axis, k, n, v)?;
        let twice = apply_partial_collective_spin(axis, k, n, &once)?;
        out.iter_mut().zip(twice).for_each(|(o, t)| *o += t);
    }
    Ok(out)
}
