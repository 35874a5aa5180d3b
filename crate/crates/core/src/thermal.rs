//! Canonical (Gibbs) density matrices built from a full spectrum.

use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};

use crate::error::{Error, Result};
use crate::math;
use crate::spectra::SpectralDecomposition;

/// Boltzmann weights smaller than this are treated as exact zeros.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Allowed deviation of `Tr ρ` from one.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// A unit-trace real symmetric density matrix at a given temperature.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: Mat<f64>,
    temperature: f64,
    log_partition: f64,
}

impl DensityMatrix {
    /// Wraps an explicit matrix (e.g. a hand-built test state). Checks shape,
    /// exact symmetry and unit trace.
    pub fn from_matrix(matrix: Mat<f64>, temperature: f64) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n.max(1),
                actual: matrix.ncols(),
            });
        }
        let mut asym: f64 = 0.0;
        for j in 0..n {
            for i in j + 1..n {
                asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if asym > 0.0 {
            return Err(Error::ValidationFailed {
                check: "density matrix symmetry",
                value: asym,
                tolerance: 0.0,
            });
        }
        check_trace(&matrix)?;
        Ok(Self {
            matrix,
            temperature,
            log_partition: 0.0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `ln Σ_j exp(-(E_j - E_0)/T)`; at `T = 0` the log of the ground degeneracy.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn into_matrix(self) -> Mat<f64> {
        self.matrix
    }
}

fn check_trace(m: &Mat<f64>) -> Result<()> {
    let trace: f64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
    let defect = (trace - 1.0).abs();
    if !(defect <= TRACE_TOLERANCE) {
        return Err(Error::ValidationFailed {
            check: "unit trace",
            value: defect,
            tolerance: TRACE_TOLERANCE,
        });
    }
    Ok(())
}

/// Normalized occupation of every level and the shifted log-partition function.
///
/// At `T > 0` the weights are `exp(-(E_i - E_0)/T) / Z'`. At `T = 0` the ground
/// manifold (levels within the degeneracy tolerance) is occupied uniformly.
pub fn boltzmann_weights(spec: &SpectralDecomposition, temperature: f64) -> Result<(Vec<f64>, f64)> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidTemperature {
            expected: "finite and >= 0",
            value: temperature,
        });
    }
    let e0 = spec.ground_energy();
    let mut weights: Vec<f64> = if temperature == 0.0 {
        let g = spec.ground_degeneracy();
        (0..spec.dimension()).map(|i| if i < g { 1.0 } else { 0.0 }).collect()
    } else {
        spec.eigenvalues()
            .iter()
            .map(|e| math::exp(-(e - e0) / temperature))
            .collect()
    };
    let z: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= z;
        if *w < WEIGHT_FLOOR {
            *w = 0.0;
        }
    }
    Ok((weights, math::ln(z)))
}

/// `ρ(T) = Σ_i w_i v_i v_iᵀ` with Boltzmann weights `w_i`.
pub fn thermal_density_matrix(spec: &SpectralDecomposition, temperature: f64) -> Result<DensityMatrix> {
    let (weights, log_partition) = boltzmann_weights(spec, temperature)?;
    let n = spec.dimension();
    let occupied: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    let v = spec.eigenvectors();

    // ρ = B Bᵀ with B = V_occ · diag(sqrt(w_occ)).
    let mut b = Mat::<f64>::zeros(n, occupied.len());
    for (k, &i) in occupied.iter().enumerate() {
        let scale = math::sqrt(weights[i]);
        let src = v.col(i);
        let dst = b.col_as_slice_mut(k);
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            *d = scale * s;
        }
    }
    let mut rho = Mat::<f64>::zeros(n, n);
    matmul(rho.as_mut(), Accum::Replace, b.as_ref(), b.transpose(), 1.0, Par::Seq);
    drop(b);
    symmetrize(&mut rho);
    check_trace(&rho)?;
    Ok(DensityMatrix {
        matrix: rho,
        temperature,
        log_partition,
    })
}

/// Replaces `m` by `(m + mᵀ)/2` so that it is exactly symmetric.
pub(crate) fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Helmholtz free energy `F = E_0 - T ln Σ_j exp(-(E_j - E_0)/T)`.
pub fn free_energy(spec: &SpectralDecomposition, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidTemperature {
            expected: "finite and > 0",
            value: temperature,
        });
    }
    let e0 = spec.ground_energy();
    let z: f64 = spec
        .eigenvalues()
        .iter()
        .map(|e| math::exp(-(e - e0) / temperature))
        .sum();
    Ok(e0 - temperature * math::ln(z))
}
