//! Dense complex linear algebra over truncated Fock spaces and qubit factors.
//!
//! Composite states are stored as a single dense matrix over an ordered list
//! of labeled factors. The first factor is the most significant index, so
//! the layout agrees with the Kronecker product `A ⊗ B ⊗ …`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Max |M − M†| accepted for a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Max |Tr ρ − 1| accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-9;

pub const OSCILLATOR: &str = "oscillator";

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

// ---------------------------------------------------------------------------
// Oscillator

/// Truncated oscillator basis `|0⟩ … |n_levels − 1⟩` at a fixed frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockSpace {
    n_levels: usize,
    frequency: f64,
}

impl FockSpace {
    pub fn new(n_levels: usize, frequency: f64) -> Result<Self> {
        if n_levels < 2 {
            return Err(invalid("n_levels", format!("must be at least 2, got {n_levels}")));
        }
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(invalid("frequency", format!("must be positive, got {frequency}")));
        }
        Ok(Self { n_levels, frequency })
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Same truncation at another frequency.
    pub fn at_frequency(&self, frequency: f64) -> Result<Self> {
        Self::new(self.n_levels, frequency)
    }

    pub fn operators(&self) -> FockOperators {
        fock_operators(self)
    }

    /// Eigenvalues `ω(n + 1/2)`.
    pub fn energies(&self) -> Vec<f64> {
        (0..self.n_levels).map(|n| self.frequency * (n as f64 + 0.5)).collect()
    }

    pub fn hamiltonian(&self) -> CMatrix {
        let e = self.energies();
        CMatrix::from_fn(self.n_levels, self.n_levels, |i, j| {
            if i == j {
                C64::new(e[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `Tr[ρ H]` for a matrix expressed in this basis.
    pub fn energy(&self, rho: &CMatrix) -> f64 {
        (0..self.n_levels.min(rho.nrows()))
            .map(|n| self.frequency * (n as f64 + 0.5) * rho[(n, n)].re)
            .sum()
    }

    /// Mean occupation `Tr[ρ a†a]`.
    pub fn occupation(&self, rho: &CMatrix) -> f64 {
        (0..self.n_levels.min(rho.nrows()))
            .map(|n| n as f64 * rho[(n, n)].re)
            .sum()
    }

    /// Gibbs state of the truncated oscillator, labeled [`OSCILLATOR`].
    pub fn thermal_state(&self, temperature: f64) -> Result<DensityMatrix> {
        thermal_state(&self.hamiltonian(), temperature, OSCILLATOR)
    }

    /// Pure number state `|n⟩⟨n|`.
    pub fn number_state(&self, n: usize) -> Result<DensityMatrix> {
        if n >= self.n_levels {
            return Err(invalid(
                "fock_index",
                format!("{n} outside truncation {}", self.n_levels),
            ));
        }
        let mut amps = vec![ZERO; self.n_levels];
        amps[n] = ONE;
        DensityMatrix::pure(OSCILLATOR, &amps)
    }
}

/// Ladder, number, position and momentum matrices at one frequency.
#[derive(Debug, Clone)]
pub struct FockOperators {
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub number: CMatrix,
    pub x: CMatrix,
    pub p: CMatrix,
}

/// `x = (a + a†)/√(2ω)`, `p = i√(ω/2)(a† − a)`.
pub fn fock_operators(space: &FockSpace) -> FockOperators {
    let n = space.n_levels;
    let w = space.frequency;
    let a = CMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let a_dag = a.adjoint();
    let number = &a_dag * &a;
    let x = (&a + &a_dag) * C64::new(1.0 / (2.0 * w).sqrt(), 0.0);
    let p = (&a_dag - &a) * C64::new(0.0, (w / 2.0).sqrt());
    FockOperators { a, a_dag, number, x, p }
}

impl FockOperators {
    /// Max deviation of `[a, a†]` from the identity over indices `< upto`.
    pub fn commutator_deviation(&self, upto: usize) -> f64 {
        let c = &self.a * &self.a_dag - &self.a_dag * &self.a;
        let k = upto.min(c.nrows());
        let mut worst = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((c[(i, j)] - target).norm());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Spin

/// A spin-1/2 reservoir particle `H = ω σ^z / 2`.
///
/// Basis index 0 is the ground state, index 1 the excited state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinSpec {
    pub frequency: f64,
    pub temperature: f64,
}

impl SpinSpec {
    pub fn new(frequency: f64, temperature: f64) -> Result<Self> {
        let s = Self { frequency, temperature };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(invalid(
                "spin.frequency",
                format!("must be positive, got {}", self.frequency),
            ));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(invalid(
                "spin.temperature",
                format!("must be positive, got {}", self.temperature),
            ));
        }
        Ok(())
    }

    pub fn inverse_temperature(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn hamiltonian(&self) -> CMatrix {
        let h = self.frequency / 2.0;
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(-h, 0.0), C64::new(h, 0.0)]))
    }

    /// Boltzmann population of the excited level.
    pub fn excited_population(&self) -> f64 {
        let r = (-self.frequency / self.temperature).exp();
        r / (1.0 + r)
    }

    pub fn thermal_state(&self, label: &str) -> DensityMatrix {
        let pe = self.excited_population();
        let data = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0 - pe, 0.0),
            C64::new(pe, 0.0),
        ]));
        DensityMatrix::from_parts(vec![Factor::new(label, 2)], data)
    }
}

// ---------------------------------------------------------------------------
// Density matrices

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

impl Factor {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self {
            label: label.into(),
            dim,
        }
    }
}

/// Dense density matrix over a labeled tensor-factor space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    factors: Vec<Factor>,
    data: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor: checks labels, dimensions, Hermiticity, trace and positivity.
    pub fn new(factors: Vec<Factor>, data: CMatrix) -> Result<Self> {
        check_factors(&factors)?;
        let dim: usize = factors.iter().map(|f| f.dim).product();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: data.nrows().max(data.ncols()),
            });
        }
        let rho = Self { factors, data };
        rho.validate()?;
        Ok(rho)
    }

    /// Single-factor state.
    pub fn single(label: &str, data: CMatrix) -> Result<Self> {
        let d = data.nrows();
        Self::new(vec![Factor::new(label, d)], data)
    }

    /// `|ψ⟩⟨ψ|` for normalised amplitudes.
    pub fn pure(label: &str, amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace: norm });
        }
        let n = amplitudes.len();
        let data = CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj());
        Self::single(label, data)
    }

    /// Unchecked constructor for results of operations that preserve the invariants.
    pub(crate) fn from_parts(factors: Vec<Factor>, data: CMatrix) -> Self {
        debug_assert_eq!(factors.iter().map(|f| f.dim).product::<usize>(), data.nrows());
        Self { factors, data }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn factor_index(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn relabel(&mut self, from: &str, to: &str) -> Result<()> {
        if from != to && self.factors.iter().any(|f| f.label == to) {
            return Err(Error::DuplicateFactor(to.to_string()));
        }
        let i = self.factor_index(from)?;
        self.factors[i].label = to.to_string();
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.data)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermiticity, unit trace and positivity within the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace: tr });
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }

    /// `Tr[ρ O]`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        (&self.data * op).trace()
    }
}

fn check_factors(factors: &[Factor]) -> Result<()> {
    for (i, f) in factors.iter().enumerate() {
        if f.dim == 0 {
            return Err(invalid("factor", format!("`{}` has dimension 0", f.label)));
        }
        if factors[..i].iter().any(|g| g.label == f.label) {
            return Err(Error::DuplicateFactor(f.label.clone()));
        }
    }
    Ok(())
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix (eigenvalues ascending).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == ZERO))
}

/// `exp(−H/T) / Tr exp(−H/T)` as a single-factor state.
///
/// The minimum eigenvalue is subtracted before exponentiating, which leaves
/// the result unchanged and avoids underflow of every Boltzmann weight.
pub fn thermal_state(hamiltonian: &CMatrix, temperature: f64, label: &str) -> Result<DensityMatrix> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(invalid("temperature", format!("must be positive, got {temperature}")));
    }
    if hamiltonian.nrows() != hamiltonian.ncols() {
        return Err(Error::DimensionMismatch {
            left: hamiltonian.nrows(),
            right: hamiltonian.ncols(),
        });
    }
    let dev = hermiticity_deviation(hamiltonian);
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = hamiltonian.nrows();
    let boltzmann = |e: &[f64]| {
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = e.iter().map(|x| (-(x - min) / temperature).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect::<Vec<_>>()
    };
    let data = if is_diagonal(hamiltonian) {
        let e: Vec<f64> = (0..n).map(|i| hamiltonian[(i, i)].re).collect();
        let w = boltzmann(&e);
        CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(w[i], 0.0) } else { ZERO })
    } else {
        let (e, v) = hermitian_eigen(hamiltonian);
        let w = boltzmann(&e);
        let mut scaled = v.clone();
        for (k, wk) in w.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*wk);
        }
        &scaled * v.adjoint()
    };
    Ok(DensityMatrix::from_parts(vec![Factor::new(label, n)], data))
}

/// Kronecker product of two dense matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Tensor product with labels concatenated in order.
pub fn tensor(states: &[&DensityMatrix]) -> Result<DensityMatrix> {
    let first = states
        .first()
        .ok_or_else(|| invalid("states", "tensor of an empty list"))?;
    let mut factors = first.factors.clone();
    let mut data = first.data.clone();
    for s in &states[1..] {
        factors.extend(s.factors.iter().cloned());
        data = data.kronecker(&s.data);
    }
    check_factors(&factors)?;
    Ok(DensityMatrix::from_parts(factors, data))
}

/// Reduced state over the factors named in `keep` (kept in their original order).
pub fn partial_trace(state: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut mask = vec![false; state.factors.len()];
    for label in keep {
        mask[state.factor_index(label)?] = true;
    }
    let dims = state.dims();
    let data = partial_trace_raw(&state.data, &dims, &mask);
    let factors = state
        .factors
        .iter()
        .zip(&mask)
        .filter(|(_, k)| **k)
        .map(|(f, _)| f.clone())
        .collect();
    Ok(DensityMatrix::from_parts(factors, data))
}

/// Partial trace of a raw matrix; `keep[i]` selects factor `i`.
pub fn partial_trace_raw(data: &CMatrix, dims: &[usize], keep: &[bool]) -> CMatrix {
    let total: usize = dims.iter().product();
    let kept: usize = dims.iter().zip(keep).filter(|(_, k)| **k).map(|(d, _)| d).product();
    let traced = total / kept;
    // split every full index into (kept index, traced index)
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kept); traced];
    for full in 0..total {
        let mut rem = full;
        let (mut ki, mut ti) = (0usize, 0usize);
        let (mut kstride, mut tstride) = (1usize, 1usize);
        for (d, k) in dims.iter().zip(keep).rev() {
            let digit = rem % d;
            rem /= d;
            if *k {
                ki += digit * kstride;
                kstride *= d;
            } else {
                ti += digit * tstride;
                tstride *= d;
            }
        }
        groups[ti].push((full, ki));
    }
    let mut out = CMatrix::zeros(kept, kept);
    for group in &groups {
        for &(j, kj) in group {
            for &(i, ki) in group {
                out[(ki, kj)] += data[(i, j)];
            }
        }
    }
    out
}

/// `(1/2) Σ |λ_i(ρ1 − ρ2)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(trace_distance_raw(&a.data, &b.data))
}

pub fn trace_distance_raw(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    let d: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>() / 2.0;
    d.clamp(0.0, 1.0)
}

/// l1-norm of coherence `Σ_{i≠j} |ρ_ij|` in the basis the matrix is stored in.
pub fn coherence(state: &DensityMatrix) -> f64 {
    coherence_raw(&state.data)
}

pub fn coherence_raw(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut c = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                c += m[(i, j)].norm();
            }
        }
    }
    c
}

/// `exp(−i · scale · H)` through the eigen-decomposition of `H`.
pub fn matrix_exponential(h: &CMatrix, scale: f64) -> Result<CMatrix> {
    let dev = hermiticity_deviation(h);
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (e, v) = hermitian_eigen(h);
    let mut scaled = v.clone();
    for (k, ek) in e.iter().enumerate() {
        let phase = C64::from_polar(1.0, -scale * ek);
        scaled.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(&scaled * v.adjoint())
}

/// `‖U U† − I‖_max`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let p = u * u.adjoint();
    let mut worst = 0.0_f64;
    for j in 0..p.ncols() {
        for i in 0..p.nrows() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((p[(i, j)] - target).norm());
        }
    }
    worst
}

/// `(I_left ⊗ U ⊗ I_right) · M` without forming the full operator.
fn left_apply(u: &CMatrix, m: &CMatrix, left: usize, d: usize, right: usize) -> CMatrix {
    let n = m.nrows();
    let cols = m.ncols();
    let mut out = CMatrix::zeros(n, cols);
    // collision unitaries are sparse, so keep only the nonzero entries
    let ucols: Vec<Vec<(usize, C64)>> = (0..d)
        .map(|j| (0..d).filter(|&i| u[(i, j)] != ZERO).map(|i| (i, u[(i, j)])).collect())
        .collect();
    let ms = m.as_slice();
    let os = out.as_mut_slice();
    for c in 0..cols {
        let col = &ms[c * n..(c + 1) * n];
        let ocol = &mut os[c * n..(c + 1) * n];
        for l in 0..left {
            for r in 0..right {
                let base = l * d * right + r;
                for (j, ucol) in ucols.iter().enumerate() {
                    let v = col[base + j * right];
                    if v == ZERO {
                        continue;
                    }
                    for &(i, uij) in ucol {
                        ocol[base + i * right] += uij * v;
                    }
                }
            }
        }
    }
    out
}

/// `(I ⊗ U ⊗ I) ρ (I ⊗ U ⊗ I)†` where `U` acts on the block of dimension `d`
/// between a left block of dimension `left` and a right block of `right`.
/// `U` need not be unitary.
pub fn conjugate_local(rho: &CMatrix, u: &CMatrix, left: usize, d: usize, right: usize) -> CMatrix {
    let half = left_apply(u, rho, left, d, right);
    left_apply(u, &half.adjoint(), left, d, right).adjoint()
}

/// Apply a unitary acting on the named contiguous factors, in the given order.
pub fn apply_unitary(state: &DensityMatrix, labels: &[&str], u: &CMatrix) -> Result<DensityMatrix> {
    let (left, d, right) = local_block(state, labels)?;
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: u.nrows(),
        });
    }
    let data = conjugate_local(&state.data, u, left, d, right);
    Ok(DensityMatrix::from_parts(state.factors.clone(), data))
}

/// `(left, block, right)` dimensions for consecutive labeled factors.
pub fn local_block(state: &DensityMatrix, labels: &[&str]) -> Result<(usize, usize, usize)> {
    let first = labels.first().ok_or_else(|| invalid("labels", "empty factor list"))?;
    let start = state.factor_index(first)?;
    for (k, label) in labels.iter().enumerate() {
        let idx = state.factor_index(label)?;
        if idx != start + k {
            return Err(Error::NonContiguousFactors(
                labels.iter().map(|s| s.to_string()).collect(),
            ));
        }
    }
    let dims = state.dims();
    let left = dims[..start].iter().product();
    let d = dims[start..start + labels.len()].iter().product();
    let right = dims[start + labels.len()..].iter().product();
    Ok((left, d, right))
}
