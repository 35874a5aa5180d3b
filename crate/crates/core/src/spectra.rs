//! Full dense eigendecomposition of the Hamiltonian.

use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};

use crate::error::{Error, Result};
use crate::model::{SiteCap, SparseSymMatrix};

/// Tolerance on `‖VᵀV − Id‖_max`.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;

/// Relative tolerance on `‖HV − VΛ‖_max`, scaled by `max(1, spectral range)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Relative tolerance used to group (near-)degenerate levels.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// (column `i` belongs to eigenvalue `i`).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
}

impl SpectralDecomposition {
    /// Wraps precomputed data after checking shape, ordering and finiteness.
    /// Orthonormality is not re-checked here; use [`validate_against`] for that.
    ///
    /// [`validate_against`]: SpectralDecomposition::validate_against
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: Mat<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: eigenvectors.nrows().max(eigenvectors.ncols()),
            });
        }
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        if let Some(bad) = eigenvalues.iter().find(|e| !e.is_finite()) {
            return Err(Error::ValidationFailed {
                check: "finite eigenvalues",
                value: *bad,
                tolerance: f64::MAX,
            });
        }
        if let Some(w) = eigenvalues.windows(2).find(|w| w[1] < w[0]) {
            return Err(Error::ValidationFailed {
                check: "ascending eigenvalues",
                value: w[0] - w[1],
                tolerance: 0.0,
            });
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn spectral_range(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1] - self.eigenvalues[0]
    }

    /// Absolute tolerance below which two levels count as degenerate.
    pub fn degeneracy_tolerance(&self) -> f64 {
        DEGENERACY_TOLERANCE * self.spectral_range().max(1.0)
    }

    /// Number of levels within [`degeneracy_tolerance`](Self::degeneracy_tolerance)
    /// of the ground energy.
    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.ground_energy();
        let tol = self.degeneracy_tolerance();
        self.eigenvalues.iter().take_while(|&&e| e - e0 <= tol).count()
    }

    /// Gap to the first level outside the ground manifold, if any.
    pub fn gap(&self) -> Option<f64> {
        self.eigenvalues
            .get(self.ground_degeneracy())
            .map(|e| e - self.ground_energy())
    }

    /// Checks orthonormality and the eigen-residual against `h`.
    pub fn validate_against(&self, h: &SparseSymMatrix) -> Result<()> {
        if h.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: h.dimension(),
            });
        }
        let ortho = orthonormality_defect(self.eigenvectors.as_ref());
        if !(ortho <= ORTHONORMALITY_TOLERANCE) {
            return Err(Error::ValidationFailed {
                check: "eigenvector orthonormality",
                value: ortho,
                tolerance: ORTHONORMALITY_TOLERANCE,
            });
        }
        let residual = self.residual(h);
        let tolerance = RESIDUAL_TOLERANCE * self.spectral_range().max(1.0);
        if !(residual <= tolerance) {
            return Err(Error::ValidationFailed {
                check: "eigen-residual",
                value: residual,
                tolerance,
            });
        }
        Ok(())
    }

    /// `‖HV − VΛ‖_max`, using the sparse form of `h`.
    pub fn residual(&self, h: &SparseSymMatrix) -> f64 {
        let v = &self.eigenvectors;
        let mut worst: f64 = 0.0;
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let col = v.col_as_slice(k);
            let hv = h.apply(col);
            for (a, b) in hv.iter().zip(col) {
                worst = worst.max((a - lambda * b).abs());
            }
        }
        worst
    }
}

/// `‖VᵀV − Id‖_max`.
pub fn orthonormality_defect(v: MatRef<'_, f64>) -> f64 {
    let n = v.ncols();
    let mut gram = Mat::<f64>::zeros(n, n);
    matmul(gram.as_mut(), Accum::Replace, v.transpose(), v, 1.0, Par::Seq);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Diagonalizes the symmetric matrix `h` completely and validates the result.
pub fn diagonalize(h: &SparseSymMatrix, cap: SiteCap) -> Result<SpectralDecomposition> {
    let dimension = h.dimension();
    if dimension > cap.max_dimension() {
        return Err(Error::DimensionCapExceeded {
            dimension,
            cap: cap.max_dimension(),
        });
    }
    let dense = h.to_dense();
    let evd = dense
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNonConvergence {
            dimension,
            max_abs: h.max_abs(),
        })?;
    let eigenvalues: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let eigenvectors = evd.U().to_owned();
    drop(dense);
    let spectrum = SpectralDecomposition::from_parts(eigenvalues, eigenvectors)?;
    spectrum.validate_against(h)?;
    Ok(spectrum)
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenNonConvergence {
            dimension: m.nrows(),
            max_abs: m.norm_max(),
        })
}

/// Rough peak memory, in bytes, of one diagonalize + negativity pass for `n_sites`.
pub fn dense_memory_estimate(n_sites: usize) -> u64 {
    let dim = crate::model::hilbert_dimension(n_sites) as u64;
    // Dense H, eigenvectors, solver workspace, density matrix and its partial transpose.
    5 * 8 * dim * dim
}
