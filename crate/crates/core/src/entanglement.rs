//! Logarithmic negativity of the spin/pseudospin bipartition.
//!
//! In the product basis `index = s * D + t` the matrix element
//! `ρ[(s,t),(s',t')]` lives at row `s*D + t`, column `s'*D + t'`, so the
//! partial transpose is a pure index shuffle.

use faer::Mat;

use crate::error::{Error, Result};
use crate::math;
use crate::spectra::symmetric_eigenvalues;
use crate::thermal::DensityMatrix;

/// Logarithmic negativities below this are reported as exactly zero.
pub const CLAMP_THRESHOLD: f64 = 1e-12;

/// Which tensor factor is transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Spin,
    Pseudospin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityResult {
    /// `ln ‖ρ^T‖₁`, natural log, clamped to zero below [`CLAMP_THRESHOLD`].
    pub log_negativity: f64,
    /// `‖ρ^T‖₁`; reported as exactly 1 whenever the log is clamped.
    pub trace_norm: f64,
    /// Sum of the magnitudes of the negative eigenvalues of `ρ^T`.
    pub negativity_sum: f64,
    pub min_pt_eigenvalue: f64,
}

fn sector_dim(dimension: usize) -> Result<usize> {
    let d = (1..=dimension).take_while(|d| d * d <= dimension).last().unwrap_or(0);
    if d * d != dimension || dimension == 0 {
        return Err(Error::NotBipartite { dimension });
    }
    Ok(d)
}

/// Partial transpose of a square matrix over a `D x D` bipartition.
pub fn partial_transpose_matrix(m: faer::MatRef<'_, f64>, subsystem: Subsystem) -> Result<Mat<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: m.ncols(),
        });
    }
    let d = sector_dim(n)?;
    let mut out = Mat::<f64>::zeros(n, n);
    for s2 in 0..d {
        for t2 in 0..d {
            let col = s2 * d + t2;
            let dst = out.col_as_slice_mut(col);
            for s in 0..d {
                for t in 0..d {
                    let (row_src, col_src) = match subsystem {
                        // ρ^{T_s}[(s,t),(s',t')] = ρ[(s',t),(s,t')]
                        Subsystem::Spin => (s2 * d + t, s * d + t2),
                        // ρ^{T_t}[(s,t),(s',t')] = ρ[(s,t'),(s',t)]
                        Subsystem::Pseudospin => (s * d + t2, s2 * d + t),
                    };
                    dst[s * d + t] = m[(row_src, col_src)];
                }
            }
        }
    }
    Ok(out)
}

/// Partial transpose of `rho` with respect to `subsystem`.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> Result<Mat<f64>> {
    partial_transpose_matrix(rho.matrix(), subsystem)
}

/// `Tr sqrt(XᵀX) = Σ|λ_i|` for a symmetric matrix.
pub fn trace_norm(m: faer::MatRef<'_, f64>) -> Result<f64> {
    Ok(symmetric_eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

/// Logarithmic negativity and its diagnostics.
pub fn logarithmic_negativity(rho: &DensityMatrix, subsystem: Subsystem) -> Result<NegativityResult> {
    let pt = partial_transpose(rho, subsystem)?;
    let eigenvalues = symmetric_eigenvalues(pt.as_ref())?;
    drop(pt);
    let mut trace_norm = 0.0;
    let mut negativity_sum = 0.0;
    for &l in &eigenvalues {
        trace_norm += l.abs();
        if l < 0.0 {
            negativity_sum -= l;
        }
    }
    let min_pt_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    let raw = math::ln(trace_norm);
    let (log_negativity, trace_norm) = if raw < CLAMP_THRESHOLD {
        (0.0, 1.0)
    } else {
        (raw, trace_norm)
    };
    Ok(NegativityResult {
        log_negativity,
        trace_norm,
        negativity_sum,
        min_pt_eigenvalue,
    })
}
