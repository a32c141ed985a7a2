//! Small dense complex linear algebra: state vectors, Hermitian generators,
//! unitaries and the one-step propagator `exp(-i H dt)`.
//!
//! Matrices are stored row-major in a flat `Vec`. Dimensions are expected to
//! be small (two-level systems are the common case and get a closed-form
//! exponential); nothing here is tuned for large `n`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Largest tolerated `|a_ij - conj(a_ji)|` before a matrix is rejected as
/// non-Hermitian. Smaller asymmetry is removed by symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Largest tolerated `max |U^dagger U - I|` for a unitary.
pub const UNITARY_TOL: f64 = 1e-10;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A unit-norm vector in `C^n`, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<C64>,
}

impl QuantumState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return invalid(format!("state dimension must be at least 2, got {}", amps.len()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return invalid("state amplitudes must be finite");
        }
        let norm = norm(&amps);
        if norm == 0.0 {
            return invalid("state amplitudes are all zero");
        }
        Ok(Self { amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    /// The canonical basis vector `e_k` of `C^n` (zero-based `k`).
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return invalid(format!("basis index {k} out of range for dimension {n}"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n];
        amps[k] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// Rescales to unit norm, removing accumulated rounding drift.
    pub fn renormalized(&self) -> Self {
        let n = self.norm();
        Self { amps: self.amps.iter().map(|a| a / n).collect() }
    }

    /// `|amplitude_k|^2` for every basis vector.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `exp(i phase)`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let p = C64::from_polar(1.0, phase);
        Self { amps: self.amps.iter().map(|a| a * p).collect() }
    }
}

fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b> = sum_i conj(a_i) b_i`.
pub fn overlap(a: &QuantumState, b: &QuantumState) -> Result<C64> {
    if a.dim() != b.dim() {
        return invalid(format!("overlap of states with dimensions {} and {}", a.dim(), b.dim()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// An `n x n` Hermitian matrix, stored exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n: usize,
    entries: Vec<C64>,
}

impl HermitianOperator {
    /// Builds an operator from row-major entries, storing `(A + A^dagger) / 2`.
    ///
    /// Fails if the entries are not finite or if `A` departs from Hermiticity
    /// by more than [`HERMITIAN_TOL`] in any element.
    pub fn new(n: usize, entries: Vec<C64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return invalid(format!("expected {} entries for a {n}x{n} matrix, got {}", n * n, entries.len()));
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return invalid("operator entries must be finite");
        }
        let mut sym = entries.clone();
        for i in 0..n {
            for j in i..n {
                let a = entries[i * n + j];
                let b = entries[j * n + i].conj();
                if (a - b).norm() > HERMITIAN_TOL {
                    return invalid(format!("matrix is not Hermitian: entry ({i},{j}) = {a} vs conj(({j},{i})) = {b}"));
                }
                let m = (a + b) * 0.5;
                sym[i * n + j] = m;
                sym[j * n + i] = m.conj();
            }
        }
        Ok(Self { n, entries: sym })
    }

    /// Builds a real symmetric operator from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("rows must form a square matrix");
        }
        Self::new(n, rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("sigma_x is Hermitian")
    }

    pub fn pauli_y() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(2, vec![z, -I, I, z]).expect("sigma_y is Hermitian")
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).expect("sigma_z is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// `self + coeff * other`. Both must have the same dimension.
    pub fn add_scaled(&self, other: &Self, coeff: f64) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled_in_place(other, coeff)?;
        Ok(out)
    }

    pub(crate) fn add_scaled_in_place(&mut self, other: &Self, coeff: f64) -> Result<()> {
        if self.n != other.n {
            return invalid(format!("operator dimensions differ: {} vs {}", self.n, other.n));
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * coeff;
        }
        Ok(())
    }

    pub fn scaled(&self, coeff: f64) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|a| a * coeff).collect() }
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }
}

/// An `n x n` unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    n: usize,
    entries: Vec<C64>,
}

impl UnitaryOperator {
    /// Builds a unitary from row-major entries, rejecting matrices whose
    /// unitarity defect exceeds [`UNITARY_TOL`].
    pub fn new(n: usize, entries: Vec<C64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return invalid(format!("expected {} entries for a {n}x{n} matrix, got {}", n * n, entries.len()));
        }
        let u = Self { n, entries };
        let defect = u.unitarity_defect();
        if !(defect <= UNITARY_TOL) {
            return invalid(format!("matrix is not unitary: max |U^dagger U - I| = {defect:e}"));
        }
        Ok(u)
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<C64>) -> Self {
        Self { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = C64::new(1.0, 0.0);
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self { n, entries }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return invalid(format!("operator dimensions differ: {} vs {}", self.n, rhs.n));
        }
        Ok(Self { n: self.n, entries: matmul(self.n, &self.entries, &rhs.entries) })
    }

    /// `max |U^dagger U - I|` over all elements.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n;
        let prod = matmul(n, &self.adjoint().entries, &self.entries);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[i * n + j] - target).norm());
            }
        }
        worst
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// `U^dagger H U` as a plain matrix (row-major).
    pub fn conjugate(&self, h: &HermitianOperator) -> Result<Vec<C64>> {
        if self.n != h.dim() {
            return invalid(format!("operator dimensions differ: {} vs {}", self.n, h.dim()));
        }
        let hu = matmul(self.n, h.entries(), &self.entries);
        Ok(matmul(self.n, &self.adjoint().entries, &hu))
    }
}

fn matmul(n: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `U * psi`.
pub fn apply(u: &UnitaryOperator, psi: &QuantumState) -> Result<QuantumState> {
    let n = u.dim();
    if psi.dim() != n {
        return invalid(format!("unitary of dimension {n} applied to state of dimension {}", psi.dim()));
    }
    let amps = (0..n).map(|i| (0..n).map(|j| u.entries[i * n + j] * psi.amps[j]).sum()).collect();
    Ok(QuantumState::from_raw(amps))
}

/// The exact propagator `exp(-i H dt)` of a constant Hamiltonian.
///
/// Two-level generators use the Pauli decomposition `H = c0 I + c . sigma`;
/// larger ones go through a Hermitian eigendecomposition.
pub fn expm_step(h: &HermitianOperator, dt: f64) -> Result<UnitaryOperator> {
    if !dt.is_finite() {
        return invalid(format!("time step must be finite, got {dt}"));
    }
    if h.entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return invalid("generator entries must be finite");
    }
    let u = match h.n {
        2 => expm_two_level(h, dt),
        _ => expm_eigen(h, dt)?,
    };
    if u.entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return invalid(format!("matrix exponential is not finite (phase |h| dt too large, dt = {dt})"));
    }
    Ok(u)
}

fn expm_two_level(h: &HermitianOperator, dt: f64) -> UnitaryOperator {
    let h00 = h.entries[0].re;
    let h11 = h.entries[3].re;
    let h01 = h.entries[1];
    let h10 = h.entries[2];
    let c0 = 0.5 * (h00 + h11);
    let cz = 0.5 * (h00 - h11);
    let r = cz.hypot(h01.norm());
    let angle = r * dt;
    let cos = angle.cos();
    // sin(r dt) / r, continuous through r = 0
    let sinc = if angle.abs() < 1e-8 { dt * (1.0 - angle * angle / 6.0) } else { angle.sin() / r };
    let phase = C64::from_polar(1.0, -c0 * dt);
    let entries = vec![
        phase * C64::new(cos, -sinc * cz),
        phase * (-I * sinc * h01),
        phase * (-I * sinc * h10),
        phase * C64::new(cos, sinc * cz),
    ];
    UnitaryOperator::from_raw(2, entries)
}

fn expm_eigen(h: &HermitianOperator, dt: f64) -> Result<UnitaryOperator> {
    let n = h.n;
    let m = DMatrix::from_row_slice(n, n, &h.entries);
    let eig = SymmetricEigen::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::InvalidInput("eigendecomposition did not converge".into()))?;
    let v = &eig.eigenvectors;
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let p = C64::from_polar(1.0, -eig.eigenvalues[k] * dt);
        for i in 0..n {
            let vik = v[(i, k)] * p;
            for j in 0..n {
                entries[i * n + j] += vik * v[(j, k)].conj();
            }
        }
    }
    Ok(UnitaryOperator::from_raw(n, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn overflowing_phase_is_an_error() {
        let h = HermitianOperator::pauli_x().scaled(1e300);
        assert!(expm_step(&h, 1e300).is_err());
        assert!(expm_step(&h.add_scaled(&HermitianOperator::zeros(2), 1.0).unwrap(), 1e-300).is_ok());
        let h3 = HermitianOperator::identity(3).scaled(1e300);
        assert!(expm_step(&h3, 1e300).is_err());
    }

    #[test]
    fn zero_generator_gives_identity() {
        let u = expm_step(&HermitianOperator::zeros(2), 1.0).unwrap();
        assert!(u.max_abs_diff(&UnitaryOperator::identity(2)) < 1e-15);
        let u3 = expm_step(&HermitianOperator::zeros(3), 1.0).unwrap();
        assert!(u3.max_abs_diff(&UnitaryOperator::identity(3)) < 1e-14);
    }

    #[test]
    fn sigma_x_quarter_rotation() {
        let u = expm_step(&HermitianOperator::pauli_x(), FRAC_PI_2).unwrap();
        let expected = UnitaryOperator::new(2, vec![c(0., 0.), c(0., -1.), c(0., -1.), c(0., 0.)]).unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn sigma_y_and_z_rotations_match_closed_forms() {
        let t = 0.3;
        let uy = expm_step(&HermitianOperator::pauli_y(), t).unwrap();
        let expected_y =
            UnitaryOperator::new(2, vec![c(t.cos(), 0.), c(-t.sin(), 0.), c(t.sin(), 0.), c(t.cos(), 0.)]).unwrap();
        assert!(uy.max_abs_diff(&expected_y) < 1e-15);
        let uz = expm_step(&HermitianOperator::pauli_z(), t).unwrap();
        assert!((uz.get(0, 0) - C64::from_polar(1.0, -t)).norm() < 1e-15);
        assert!((uz.get(1, 1) - C64::from_polar(1.0, t)).norm() < 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let e1 = QuantumState::basis(2, 0).unwrap();
        let e2 = QuantumState::basis(2, 1).unwrap();
        assert_eq!(overlap(&e1, &e1).unwrap(), c(1., 0.));
        assert_eq!(overlap(&e1, &e2).unwrap(), c(0., 0.));
        let plus = QuantumState::new(vec![c(1., 0.), c(1., 0.)]).unwrap();
        assert!((overlap(&plus, &e1).unwrap() - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        let e3 = QuantumState::basis(3, 0).unwrap();
        assert!(overlap(&e1, &e3).is_err());
    }

    #[test]
    fn apply_examples() {
        let psi = QuantumState::new(vec![c(0.3, 0.1), c(-0.2, 0.7)]).unwrap();
        assert_eq!(apply(&UnitaryOperator::identity(2), &psi).unwrap(), psi);
        let u = expm_step(&HermitianOperator::pauli_x(), FRAC_PI_2).unwrap();
        let out = apply(&u, &QuantumState::basis(2, 0).unwrap()).unwrap();
        assert!((out.amplitudes()[0]).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(0., -1.)).norm() < 1e-15);
        assert!(apply(&u, &QuantumState::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn hermitian_construction_symmetrizes_and_rejects() {
        let drift = 1e-10;
        let h = HermitianOperator::new(2, vec![c(1., 0.), c(0.5, 0.2), c(0.5 + drift, -0.2), c(-1., drift)]).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_eq!(h.get(1, 1).im, 0.0);
        assert!(HermitianOperator::new(2, vec![c(1., 0.), c(0.5, 0.), c(0.6, 0.), c(0., 0.)]).is_err());
        assert!(HermitianOperator::new(2, vec![c(f64::NAN, 0.), c(0., 0.), c(0., 0.), c(0., 0.)]).is_err());
        assert!(HermitianOperator::new(2, vec![c(0., 0.); 3]).is_err());
    }

    #[test]
    fn state_construction_errors() {
        assert!(QuantumState::new(vec![c(1., 0.)]).is_err());
        assert!(QuantumState::new(vec![c(0., 0.), c(0., 0.)]).is_err());
        assert!(QuantumState::new(vec![c(f64::INFINITY, 0.), c(0., 0.)]).is_err());
        assert!(QuantumState::basis(2, 2).is_err());
        let s = QuantumState::new(vec![c(3., 0.), c(0., 4.)]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_step_is_rejected() {
        assert!(expm_step(&HermitianOperator::pauli_x(), f64::NAN).is_err());
    }

    #[test]
    fn unitary_constructor_checks_defect() {
        assert!(UnitaryOperator::new(2, vec![c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]).is_err());
    }
}
