//! Thermal bond correlators and magnetizations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{bond_operator, total_sz, BondTerm, ModelParams, Sector, SparseSymMatrix};
use crate::thermal::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    /// `⟨S_i·S_{i+1}⟩` per bond.
    pub ss_bond: Vec<f64>,
    /// `⟨T_i·T_{i+1}⟩` per bond.
    pub tt_bond: Vec<f64>,
    /// `⟨(S_i·S_{i+1})(T_i·T_{i+1})⟩` per bond.
    pub sstt_bond: Vec<f64>,
    /// `⟨Σ_i S^z_i⟩ / N`
    pub mag_s: f64,
    /// `⟨Σ_i T^z_i⟩ / N`
    pub mag_t: f64,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl ObservableSet {
    pub fn ss_bond_mean(&self) -> Option<f64> {
        mean(&self.ss_bond)
    }

    pub fn tt_bond_mean(&self) -> Option<f64> {
        mean(&self.tt_bond)
    }

    pub fn sstt_bond_mean(&self) -> Option<f64> {
        mean(&self.sstt_bond)
    }
}

/// `Tr(ρ A)` summed over the stored entries of `A`.
pub fn expectation(rho: &DensityMatrix, op: &SparseSymMatrix) -> Result<f64> {
    if rho.dimension() != op.dimension() {
        return Err(Error::DimensionMismatch {
            expected: rho.dimension(),
            actual: op.dimension(),
        });
    }
    let m = rho.matrix();
    Ok(op
        .entries()
        .iter()
        .map(|&(r, c, v)| if r == c { v * m[(r, r)] } else { 2.0 * v * m[(c, r)] })
        .sum())
}

/// All correlators and magnetizations of `rho`, which must belong to `params`.
pub fn compute_observables(rho: &DensityMatrix, params: &ModelParams) -> Result<ObservableSet> {
    let n = params.n_sites;
    if rho.dimension() != params.dimension() {
        return Err(Error::DimensionMismatch {
            expected: params.dimension(),
            actual: rho.dimension(),
        });
    }
    let bonds = n.saturating_sub(1);
    let per_term = |term| -> Result<Vec<f64>> {
        (0..bonds)
            .map(|b| expectation(rho, &bond_operator(n, b, term)?))
            .collect()
    };
    let ss_bond = per_term(BondTerm::SpinExchange)?;
    let tt_bond = per_term(BondTerm::PseudospinExchange)?;
    let sstt_bond = per_term(BondTerm::Biquadratic)?;
    let mag_s = expectation(rho, &total_sz(n, Sector::Spin)?)? / n as f64;
    let mag_t = expectation(rho, &total_sz(n, Sector::Pseudospin)?)? / n as f64;
    Ok(ObservableSet {
        ss_bond,
        tt_bond,
        sstt_bond,
        mag_s,
        mag_t,
    })
}
