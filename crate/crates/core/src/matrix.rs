//! Dense complex matrices with the handful of operations the fidelity
//! formulas need: adjoint, product, trace, Kronecker product, unitarity
//! checks and eigenphase extraction for unitary matrices.

use crate::error::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/infinite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                len: entries.len(),
            });
        }
        if !entries.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !diag.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFiniteEntry);
        }
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m.entries[i * n + i] = z;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        assert!(is_finite(value), "matrix entries must be finite");
        self.entries[i * self.cols + j] = value;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entries[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Matrix product; the inner dimensions must agree.
    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.entries[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            t += self.entries[i * self.cols + i];
        }
        Ok(t)
    }

    /// Kronecker product; the left factor indexes the slow (row-major) axis.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.entries[i * self.cols + j];
                for p in 0..rhs.rows {
                    for q in 0..rhs.cols {
                        out.entries[(i * rhs.rows + p) * cols + (j * rhs.cols + q)] =
                            a * rhs.entries[p * rhs.cols + q];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-entry deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.entries[k * n + i].conj() * self.entries[k * n + j];
                }
                if i == j {
                    s -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(s.norm());
            }
        }
        Ok(worst)
    }

    pub fn is_unitary(&self, tolerance: f64) -> Result<bool> {
        Ok(self.unitarity_deviation()? <= tolerance)
    }

    /// Rejects non-square or non-unitary matrices with the measured deviation.
    pub fn require_unitary(&self, tolerance: f64) -> Result<()> {
        let deviation = self.unitarity_deviation()?;
        if deviation > tolerance {
            return Err(Error::NotUnitary {
                deviation,
                tolerance,
            });
        }
        Ok(())
    }

    /// <psi|M|psi> for an amplitude vector of matching length.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        assert!(self.is_square(), "expectation needs a square matrix");
        assert_eq!(psi.len(), self.rows, "state length must match dimension");
        let n = self.rows;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.entries[i * n + j] * psi[j];
            }
            total += psi[i].conj() * row;
        }
        total
    }

    /// Copies out the square submatrix on the given (strictly increasing) indices.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        assert!(self.is_square(), "submatrix restriction needs a square matrix");
        assert!(!indices.is_empty(), "index list must be non-empty");
        let d = indices.len();
        let mut out = Self::zeros(d, d);
        for (a, &i) in indices.iter().enumerate() {
            assert!(i < self.rows, "index out of bounds");
            for (b, &j) in indices.iter().enumerate() {
                out.entries[a * d + b] = self.entries[i * self.cols + j];
            }
        }
        out
    }

    /// Eigenphases of a unitary matrix, sorted ascending in (-pi, pi].
    ///
    /// The matrix is split into commuting Hermitian parts H = (U + U†)/2 and
    /// K = (U - U†)/2i; H is diagonalized first and K resolves any cluster of
    /// near-equal H eigenvalues, which pins a joint eigenbasis of U itself.
    pub fn unitary_eigenphases(&self) -> Result<EigenphaseSet> {
        self.require_unitary(1e-9)?;
        let n = self.rows;
        let mut h = Self::zeros(n, n);
        let mut k = Self::zeros(n, n);
        let half_i = Complex64::new(0.0, -0.5);
        for i in 0..n {
            for j in 0..n {
                let u_ij = self.entries[i * n + j];
                let u_ji_conj = self.entries[j * n + i].conj();
                h.entries[i * n + j] = 0.5 * (u_ij + u_ji_conj);
                k.entries[i * n + j] = half_i * (u_ij - u_ji_conj);
            }
        }
        let (hvals, hvecs) = hermitian_eigen(&h)?;

        let mut basis = hvecs;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && hvals[end] - hvals[end - 1] <= 1e-8 {
                end += 1;
            }
            if end - start > 1 {
                resolve_cluster(&mut basis, &k, start, end)?;
            }
            start = end;
        }

        let mut phases = Vec::with_capacity(n);
        for j in 0..n {
            let col: Vec<Complex64> = (0..n).map(|i| basis.entries[i * n + j]).collect();
            let lambda = self.expectation(&col);
            let modulus = lambda.norm();
            if (modulus - 1.0).abs() > 1e-9 {
                return Err(Error::EigenOffUnitCircle { modulus });
            }
            let mut phi = lambda.im.atan2(lambda.re);
            if phi <= -std::f64::consts::PI {
                phi += 2.0 * std::f64::consts::PI;
            }
            phases.push(phi);
        }
        phases.sort_by(|a, b| a.partial_cmp(b).expect("phases are finite"));
        Ok(EigenphaseSet { phases })
    }
}

/// Rotates the basis columns [start, end) so they also diagonalize K there.
fn resolve_cluster(basis: &mut ComplexMatrix, k: &ComplexMatrix, start: usize, end: usize) -> Result<()> {
    let n = basis.rows();
    let d = end - start;
    let mut block = ComplexMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let mut ki = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    ki += k.entries[i * n + j] * basis.entries[j * n + (start + b)];
                }
                s += basis.entries[i * n + (start + a)].conj() * ki;
            }
            block.entries[a * d + b] = s;
        }
    }
    let (_, w) = hermitian_eigen(&block)?;
    let old: Vec<Complex64> = (0..n)
        .flat_map(|i| (0..d).map(move |a| (i, a)))
        .map(|(i, a)| basis.entries[i * n + (start + a)])
        .collect();
    for i in 0..n {
        for b in 0..d {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..d {
                s += old[i * d + a] * w.entries[a * d + b];
            }
            basis.entries[i * n + (start + b)] = s;
        }
    }
    Ok(())
}

/// Eigenphases of a unitary matrix, ascending, each in (-pi, pi].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseSet {
    phases: Vec<f64>,
}

impl EigenphaseSet {
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted ascending and a unitary whose columns are the
/// matching eigenvectors. The working copy is hermitized up front so tiny
/// asymmetries in the input cannot bias the rotations.
pub(crate) fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 0.5 * (a.entries[i * n + j] + a.entries[j * n + i].conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale > 0.0 && n > 1 {
        let threshold = scale * (n as f64) * 1e-14;
        let mut converged = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * m[p * n + q].norm_sqr();
                }
            }
            if off.sqrt() <= threshold {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = m[p * n + q];
                    let gn = g.norm();
                    if gn == 0.0 {
                        continue;
                    }
                    let alpha = m[p * n + p].re;
                    let beta = m[q * n + q].re;
                    let w = g / gn;
                    let tau = (beta - alpha) / (2.0 * gn);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for i in 0..n {
                        if i == p || i == q {
                            continue;
                        }
                        let aip = m[i * n + p];
                        let aiq = m[i * n + q];
                        let new_ip = c * aip - s * w.conj() * aiq;
                        let new_iq = s * w * aip + c * aiq;
                        m[i * n + p] = new_ip;
                        m[p * n + i] = new_ip.conj();
                        m[i * n + q] = new_iq;
                        m[q * n + i] = new_iq.conj();
                    }
                    m[p * n + p] = Complex64::new(c * c * alpha + s * s * beta - 2.0 * c * s * gn, 0.0);
                    m[q * n + q] = Complex64::new(s * s * alpha + c * c * beta + 2.0 * c * s * gn, 0.0);
                    m[p * n + q] = Complex64::new(0.0, 0.0);
                    m[q * n + p] = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        let vip = v.entries[i * n + p];
                        let viq = v.entries[i * n + q];
                        v.entries[i * n + p] = c * vip - s * w.conj() * viq;
                        v.entries[i * n + q] = s * w * vip + c * viq;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::EigenNoConvergence);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .re
            .partial_cmp(&m[j * n + j].re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors.entries[i * n + new_col] = v.entries[i * n + old_col];
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Small deterministic generator so tests don't depend on other modules.
    struct TestRng(u64);

    impl TestRng {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        }

        fn matrix(&mut self, n: usize) -> ComplexMatrix {
            let entries = (0..n * n).map(|_| c(self.next_f64(), self.next_f64())).collect();
            ComplexMatrix::new(n, n, entries).unwrap()
        }
    }

    fn random_hermitian(rng: &mut TestRng, n: usize) -> ComplexMatrix {
        let a = rng.matrix(n);
        a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0))
    }

    fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.entries()
            .iter()
            .zip(b.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn new_rejects_bad_shapes_and_values() {
        assert_eq!(
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).unwrap_err(),
            Error::EntryCount { rows: 2, cols: 2, len: 3 }
        );
        assert_eq!(ComplexMatrix::new(0, 2, vec![]).unwrap_err(), Error::ZeroDimension);
        let bad = vec![c(1.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(ComplexMatrix::new(2, 2, bad).unwrap_err(), Error::NonFiniteEntry);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 2.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        let adj = m.adjoint();
        assert_eq!(adj.get(0, 0), c(1.0, -2.0));
        assert_eq!(adj.get(0, 1), c(0.0, 0.0));
        assert_eq!(adj.get(1, 0), c(3.0, 0.0));
        assert_eq!(adj.get(1, 1), c(0.0, -1.0));
    }

    #[test]
    fn identity_product_is_bit_exact() {
        let mut rng = TestRng(7);
        let a = rng.matrix(5);
        let id = ComplexMatrix::identity(5);
        assert_eq!(id.multiply(&a).unwrap(), a);
        assert_eq!(a.multiply(&id).unwrap(), a);
    }

    #[test]
    fn multiply_rejects_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.multiply(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn trace_requires_square() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.trace(), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn kron_dimensions_and_block_layout() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        let b = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k.get(0, 1), c(1.0, 0.0));
        assert_eq!(k.get(2, 3), c(2.0, 0.0));
        assert_eq!(k.get(0, 3), c(0.0, 0.0));
    }

    #[test]
    fn hadamard_is_unitary_and_scaled_hadamard_is_not() {
        let h = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
        )
        .unwrap()
        .scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(h.is_unitary(1e-9).unwrap());
        assert!(!h.scale(c(1.1, 0.0)).is_unitary(1e-9).unwrap());
    }

    #[test]
    fn hermitian_eigen_reconstructs_input() {
        let mut rng = TestRng(11);
        for n in [1, 2, 3, 5, 8] {
            let a = random_hermitian(&mut rng, n);
            let (vals, vecs) = hermitian_eigen(&a).unwrap();
            assert!(vecs.is_unitary(1e-12).unwrap(), "eigenvectors not orthonormal at n={n}");
            let lambda = ComplexMatrix::from_diagonal(
                &vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
            )
            .unwrap();
            let rebuilt = vecs.multiply(&lambda).unwrap().multiply(&vecs.adjoint()).unwrap();
            assert!(max_abs_diff(&a, &rebuilt) < 1e-12, "reconstruction failed at n={n}");
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn hermitian_eigen_handles_degenerate_spectrum() {
        let a = ComplexMatrix::identity(4).scale(c(3.0, 0.0));
        let (vals, vecs) = hermitian_eigen(&a).unwrap();
        assert!(vals.iter().all(|&x| (x - 3.0).abs() < 1e-14));
        assert!(vecs.is_unitary(1e-12).unwrap());
    }

    #[test]
    fn eigenphases_of_diagonal_unitary() {
        let u = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), Complex64::from_polar(1.0, PI / 3.0)]).unwrap();
        let phases = u.unitary_eigenphases().unwrap();
        assert!((phases.phases()[0] - 0.0).abs() < 1e-12);
        assert!((phases.phases()[1] - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenphases_recovered_under_conjugation() {
        let mut rng = TestRng(23);
        for n in [2, 3, 5] {
            let herm = random_hermitian(&mut rng, n);
            let (_, v) = hermitian_eigen(&herm).unwrap();
            let mut raw: Vec<f64> = (0..n).map(|_| rng.next_f64() * 2.0 * PI).collect();
            raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let diag: Vec<Complex64> = raw.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
            let u = v
                .multiply(&ComplexMatrix::from_diagonal(&diag).unwrap())
                .unwrap()
                .multiply(&v.adjoint())
                .unwrap();
            let got = u.unitary_eigenphases().unwrap();
            let mut expected: Vec<f64> = raw
                .iter()
                .map(|&p| {
                    let mut q = p.sin().atan2(p.cos());
                    if q <= -PI {
                        q += 2.0 * PI;
                    }
                    q
                })
                .collect();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, e) in got.phases().iter().zip(&expected) {
                assert!((g - e).abs() < 1e-9, "n={n}: got {g}, expected {e}");
            }
        }
    }

    #[test]
    fn eigenphases_separate_conjugate_pair() {
        // cos is equal for +phi and -phi, so this exercises the cluster stage.
        let phi = 1.1;
        let diag = [Complex64::from_polar(1.0, phi), Complex64::from_polar(1.0, -phi)];
        let mut rng = TestRng(5);
        let herm = random_hermitian(&mut rng, 2);
        let (_, v) = hermitian_eigen(&herm).unwrap();
        let u = v
            .multiply(&ComplexMatrix::from_diagonal(&diag).unwrap())
            .unwrap()
            .multiply(&v.adjoint())
            .unwrap();
        let got = u.unitary_eigenphases().unwrap();
        assert!((got.phases()[0] + phi).abs() < 1e-9);
        assert!((got.phases()[1] - phi).abs() < 1e-9);
    }

    #[test]
    fn eigenphases_reject_non_unitary_input() {
        let m = ComplexMatrix::identity(3).scale(c(1.5, 0.0));
        assert!(matches!(m.unitary_eigenphases(), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn eigenphase_convention_maps_pi_to_positive() {
        let u = ComplexMatrix::from_diagonal(&[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let phases = u.unitary_eigenphases().unwrap();
        assert!((phases.phases()[1] - PI).abs() < 1e-12);
        assert!(phases.phases().iter().all(|&p| p > -PI && p <= PI));
    }

    fn entry_strategy() -> impl Strategy<Value = Complex64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
    }

    fn matrix_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec(entry_strategy(), n * n)
            .prop_map(move |v| ComplexMatrix::new(n, n, v).unwrap())
    }

    proptest! {
        #[test]
        fn adjoint_is_an_involution(n in 1usize..6, seed in any::<u64>()) {
            let mut rng = TestRng(seed);
            let m = rng.matrix(n);
            prop_assert_eq!(m.adjoint().adjoint(), m);
        }

        #[test]
        fn multiplication_is_associative(a in matrix_strategy(4), b in matrix_strategy(4), d in matrix_strategy(4)) {
            let left = a.multiply(&b).unwrap().multiply(&d).unwrap();
            let right = a.multiply(&b.multiply(&d).unwrap()).unwrap();
            let scale = left.frobenius_norm().max(1.0);
            let diff = left.sub(&right).unwrap().frobenius_norm();
            prop_assert!(diff <= 1e-12 * scale);
        }

        #[test]
        fn kron_trace_factorizes(a in matrix_strategy(2), b in matrix_strategy(3)) {
            let joint = a.kron(&b).trace().unwrap();
            let split = a.trace().unwrap() * b.trace().unwrap();
            prop_assert!((joint - split).norm() <= 1e-12);
        }

        #[test]
        fn adjoint_trace_is_conjugate(a in matrix_strategy(3)) {
            let t = a.trace().unwrap();
            let t_adj = a.adjoint().trace().unwrap();
            prop_assert!((t.conj() - t_adj).norm() <= 1e-15);
        }
    }
}
