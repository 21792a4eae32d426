//! Kraus-operator channels and density matrices: construction and validation,
//! the depolarizing and amplitude-damping families, unitary remixing of the
//! operator set, and tensor powers for composite registers.

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, Complex64, ComplexMatrix};

/// Trace-preserving map given by Kraus operators G_k with sum G_k† G_k = I.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Max-entry tolerance on the completeness sum at construction time.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Default cap on dim^K for tensor powers.
pub const TENSOR_DIM_CAP: u128 = 64;

/// Default cap on the total number of stored Kraus entries of a tensor power.
pub const TENSOR_ENTRY_CAP: u128 = 1 << 22;

impl KrausChannel {
    /// Validates shapes and completeness and builds the channel.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        if !first.is_square() {
            return Err(Error::NonSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let dim = first.rows();
        for op in &kraus {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::ShapeMismatch {
                    left_rows: dim,
                    left_cols: dim,
                    right_rows: op.rows(),
                    right_cols: op.cols(),
                });
            }
        }
        let channel = Self { dim, kraus };
        let deviation = channel.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(channel)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Max-entry deviation of sum G_k† G_k from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        let n = self.dim;
        let mut sum = ComplexMatrix::zeros(n, n);
        for op in &self.kraus {
            let term = op.adjoint().multiply(op).expect("square operators");
            sum = sum.add(&term).expect("matching shapes");
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut z = sum.get(i, j);
                if i == j {
                    z -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(z.norm());
            }
        }
        worst
    }

    /// sum_k G_k M G_k† on an arbitrary operator of matching dimension.
    pub(crate) fn apply_to_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: m.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for op in &self.kraus {
            let term = op.multiply(m)?.multiply(&op.adjoint())?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Applies the channel to a density matrix; the output is re-validated.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_to_operator(rho.matrix())?)
    }

    /// Replaces the operator set by G'_k = sum_j V_kj G_j for unitary V.
    pub fn remix(&self, v: &ComplexMatrix) -> Result<Self> {
        let m = self.kraus.len();
        if v.rows() != m || v.cols() != m {
            return Err(Error::RemixShape {
                expected: m,
                rows: v.rows(),
                cols: v.cols(),
            });
        }
        v.require_unitary(1e-9)?;
        let mut remixed = Vec::with_capacity(m);
        for k in 0..m {
            let mut op = ComplexMatrix::zeros(self.dim, self.dim);
            for (j, g) in self.kraus.iter().enumerate() {
                op = op.add(&g.scale(v.get(k, j)))?;
            }
            remixed.push(op);
        }
        Self::new(remixed)
    }

    /// Appends zero operators so the set has `count` entries in total.
    pub fn pad(&self, count: usize) -> Result<Self> {
        if count < self.kraus.len() {
            return Err(Error::PadShrink {
                requested: count,
                current: self.kraus.len(),
            });
        }
        let mut kraus = self.kraus.clone();
        kraus.resize(count, ComplexMatrix::zeros(self.dim, self.dim));
        Self::new(kraus)
    }

    /// K-fold tensor power; operator tuples (k_1..k_K) are enumerated in
    /// row-major order with k_1 slowest.
    pub fn tensor_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        let dim_pow = (self.dim as u128)
            .checked_pow(k)
            .unwrap_or(u128::MAX);
        let count_pow = (self.kraus.len() as u128)
            .checked_pow(k)
            .unwrap_or(u128::MAX);
        let entries = count_pow.saturating_mul(dim_pow.saturating_mul(dim_pow));
        if dim_pow > TENSOR_DIM_CAP || entries > TENSOR_ENTRY_CAP {
            return Err(Error::TensorBudget {
                dim_pow,
                dim_cap: TENSOR_DIM_CAP,
                entries,
                entry_cap: TENSOR_ENTRY_CAP,
            });
        }
        let mut acc = self.kraus.clone();
        for _ in 1..k {
            let mut next = Vec::with_capacity(acc.len() * self.kraus.len());
            for a in &acc {
                for b in &self.kraus {
                    next.push(a.kron(b));
                }
            }
            acc = next;
        }
        Self::new(acc)
    }
}

/// Depolarizing qubit channel with survival parameter p in [0, 1].
pub fn depolarizing_channel(p: f64) -> Result<KrausChannel> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityRange { value: p });
    }
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let identity = ComplexMatrix::identity(2);
    let sigma_x = ComplexMatrix::new(2, 2, vec![z, one, one, z]).expect("constant entries");
    let sigma_y = ComplexMatrix::new(2, 2, vec![z, -i, i, z]).expect("constant entries");
    let sigma_z = ComplexMatrix::new(2, 2, vec![one, z, z, -one]).expect("constant entries");
    let c0 = Complex64::new((3.0 * p + 1.0).sqrt() / 2.0, 0.0);
    let cp = Complex64::new((1.0 - p).sqrt() / 2.0, 0.0);
    KrausChannel::new(vec![
        identity.scale(c0),
        sigma_x.scale(cp),
        sigma_y.scale(cp),
        sigma_z.scale(cp),
    ])
}

/// Qubit amplitude damping after evolving for gamma_t = Gamma * t >= 0.
pub fn amplitude_damping_channel(gamma_t: f64) -> Result<KrausChannel> {
    if !gamma_t.is_finite() || gamma_t < 0.0 {
        return Err(Error::DecayRange { value: gamma_t });
    }
    let z = Complex64::new(0.0, 0.0);
    let survive = ComplexMatrix::from_diagonal(&[
        Complex64::new(1.0, 0.0),
        Complex64::new((-gamma_t / 2.0).exp(), 0.0),
    ])
    .expect("finite entries");
    let decay = ComplexMatrix::new(
        2,
        2,
        vec![z, Complex64::new((1.0 - (-gamma_t).exp()).sqrt(), 0.0), z, z],
    )
    .expect("finite entries");
    KrausChannel::new(vec![survive, decay])
}

/// Positive-semidefinite unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace at 1e-12 and the eigenvalue
    /// floor at -1e-9, then wraps the matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let n = matrix.rows();
        let mut herm_dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm_dev = herm_dev.max((matrix.get(i, j) - matrix.get(j, i).conj()).norm());
            }
        }
        if herm_dev > 1e-12 {
            return Err(Error::InvalidDensity {
                reason: format!("not Hermitian: max asymmetry {herm_dev:.3e} exceeds 1e-12"),
            });
        }
        let trace = matrix.trace()?;
        let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > 1e-12 {
            return Err(Error::InvalidDensity {
                reason: format!("trace deviates from 1 by {trace_dev:.3e}, beyond 1e-12"),
            });
        }
        let (eigenvalues, _) = hermitian_eigen(&matrix)?;
        let floor = eigenvalues.first().copied().unwrap_or(0.0);
        if floor < -1e-9 {
            return Err(Error::InvalidDensity {
                reason: format!("smallest eigenvalue {floor:.3e} is below -1e-9"),
            });
        }
        Ok(Self { matrix })
    }

    /// Pure-state projector |psi><psi| from a normalized amplitude vector.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::StateNotNormalized { norm: norm_sq.sqrt() });
        }
        let n = amplitudes.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, amplitudes[i] * amplitudes[j].conj());
            }
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}
