//! Parameter grids, the single-point pipeline and finite-size extrapolation.

use alloc::format;
use alloc::vec::Vec;

use crate::entanglement::{logarithmic_negativity, NegativityResult, Subsystem};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{build_hamiltonian, FieldSpec, ModelParams, SiteCap};
use crate::observables::{compute_observables, ObservableSet};
use crate::spectra::{diagonalize, SpectralDecomposition};
use crate::thermal::thermal_density_matrix;

/// Reference temperatures used for the cut figures.
pub const REFERENCE_TEMPERATURES: [f64; 4] = [0.001, 0.05, 0.1, 0.15];

/// Slice through the `(I, J)` plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Cut {
    /// `I = J = x`.
    Diagonal,
    /// `J = x`, `I = -x`.
    Antidiagonal,
    /// Explicit `(J, I)` pairs, used as given.
    ExplicitList(Vec<(f64, f64)>),
}

impl Cut {
    pub fn name(&self) -> &'static str {
        match self {
            Cut::Diagonal => "diagonal",
            Cut::Antidiagonal => "antidiagonal",
            Cut::ExplicitList(_) => "explicit_list",
        }
    }
}

/// Inclusive linear grid `lo..=hi` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridRange {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let range = Self { lo, hi, points };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidSweep("range needs at least one point".into()));
        }
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo > self.hi {
            return Err(Error::InvalidSweep(format!(
                "range [{}, {}] must be finite with lo <= hi",
                self.lo, self.hi
            )));
        }
        if self.points == 1 && self.lo != self.hi {
            return Err(Error::InvalidSweep(format!(
                "a single-point range needs lo == hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// The grid values; both endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return alloc::vec![self.lo];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * (k as f64 / last)
                }
            })
            .collect()
    }
}

impl Default for GridRange {
    fn default() -> Self {
        Self {
            lo: -1.0,
            hi: 1.0,
            points: 41,
        }
    }
}

/// Declarative description of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub cut: Cut,
    /// Ignored for [`Cut::ExplicitList`].
    pub range: GridRange,
    pub k_coupling: f64,
    pub temperatures: Vec<f64>,
    pub n_sites_list: Vec<usize>,
    pub field_spin: FieldSpec,
    pub field_pseudo: FieldSpec,
    pub observables_enabled: bool,
}

impl SweepSpec {
    /// Default grid (41 points over `[-1, 1]`, the reference temperatures, `N = 6`).
    pub fn new(cut: Cut, k_coupling: f64) -> Self {
        Self {
            cut,
            range: GridRange::default(),
            k_coupling,
            temperatures: REFERENCE_TEMPERATURES.to_vec(),
            n_sites_list: alloc::vec![6],
            field_spin: FieldSpec::OFF,
            field_pseudo: FieldSpec::OFF,
            observables_enabled: false,
        }
    }

    pub fn validate(&self, cap: SiteCap) -> Result<()> {
        if !matches!(self.cut, Cut::ExplicitList(_)) {
            self.range.validate()?;
        }
        if let Cut::ExplicitList(pairs) = &self.cut {
            if pairs.is_empty() {
                return Err(Error::InvalidSweep("explicit point list is empty".into()));
            }
        }
        if self.temperatures.is_empty() {
            return Err(Error::InvalidSweep("temperature list is empty".into()));
        }
        if let Some(t) = self.temperatures.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidSweep(format!("temperature {t} must be finite and >= 0")));
        }
        if self.n_sites_list.is_empty() {
            return Err(Error::InvalidSweep("chain length list is empty".into()));
        }
        for params in self.points_unchecked() {
            params.validate(cap)?;
        }
        Ok(())
    }

    /// `(J, I)` along the cut.
    pub fn couplings(&self) -> Vec<(f64, f64)> {
        match &self.cut {
            Cut::Diagonal => self.range.values().into_iter().map(|x| (x, x)).collect(),
            Cut::Antidiagonal => self.range.values().into_iter().map(|x| (x, -x)).collect(),
            Cut::ExplicitList(pairs) => pairs.clone(),
        }
    }

    fn points_unchecked(&self) -> Vec<ModelParams> {
        let couplings = self.couplings();
        let mut out = Vec::with_capacity(self.n_sites_list.len() * couplings.len());
        for &n in &self.n_sites_list {
            for &(j, i) in &couplings {
                out.push(
                    ModelParams::new(n)
                        .with_couplings(j, i, self.k_coupling)
                        .with_fields(self.field_spin, self.field_pseudo),
                );
            }
        }
        out
    }
}

/// Distinct Hamiltonians of the sweep, chain length outer, cut parameter inner.
pub fn expand_points(spec: &SweepSpec, cap: SiteCap) -> Result<Vec<ModelParams>> {
    spec.validate(cap)?;
    Ok(spec.points_unchecked())
}

/// Every `(params, temperature)` pair, with temperature varying fastest.
pub fn expand_grid(spec: &SweepSpec, cap: SiteCap) -> Result<Vec<(ModelParams, f64)>> {
    Ok(expand_points(spec, cap)?
        .into_iter()
        .flat_map(|p| spec.temperatures.iter().map(move |&t| (p, t)))
        .collect())
}

/// Result of the pipeline at one temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperaturePoint {
    pub temperature: f64,
    pub negativity: NegativityResult,
    pub observables: Option<ObservableSet>,
}

/// Everything computed for one Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub params: ModelParams,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    pub temperatures: Vec<TemperaturePoint>,
}

/// Diagonalizes `params` once and evaluates every temperature against it.
pub fn evaluate_point(
    params: &ModelParams,
    temperatures: &[f64],
    with_observables: bool,
    cap: SiteCap,
) -> Result<PointEvaluation> {
    let h = build_hamiltonian(params, cap)?;
    let spectrum = diagonalize(&h, cap)?;
    drop(h);
    evaluate_spectrum(params, &spectrum, temperatures, with_observables)
}

/// The temperature loop of [`evaluate_point`] for an existing decomposition.
pub fn evaluate_spectrum(
    params: &ModelParams,
    spectrum: &SpectralDecomposition,
    temperatures: &[f64],
    with_observables: bool,
) -> Result<PointEvaluation> {
    if spectrum.dimension() != params.dimension() {
        return Err(Error::DimensionMismatch {
            expected: params.dimension(),
            actual: spectrum.dimension(),
        });
    }
    let temperatures = temperatures
        .iter()
        .map(|&t| {
            let rho = thermal_density_matrix(spectrum, t)?;
            let negativity = logarithmic_negativity(&rho, Subsystem::Spin)?;
            let observables = if with_observables {
                Some(compute_observables(&rho, params)?)
            } else {
                None
            };
            Ok(TemperaturePoint {
                temperature: t,
                negativity,
                observables,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointEvaluation {
        params: *params,
        ground_energy: spectrum.ground_energy(),
        ground_degeneracy: spectrum.ground_degeneracy(),
        temperatures,
    })
}

/// Linear fit of a quantity against `1/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationResult {
    /// Value at `1/N → 0`.
    pub intercept: f64,
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub n_points: usize,
}

/// Ordinary least squares of `value` against `1/n_sites`.
pub fn extrapolate(points: &[(usize, f64)]) -> Result<ExtrapolationResult> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 || sizes[0] == 0 {
        return Err(Error::TooFewSizes {
            distinct: sizes.iter().filter(|&&n| n > 0).count(),
        });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.0 as f64).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, p) in xs.iter().zip(points) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (p.1 - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sq: f64 = xs
        .iter()
        .zip(points)
        .map(|(x, p)| {
            let r = p.1 - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(ExtrapolationResult {
        intercept,
        slope,
        residual: math::sqrt(sq / n),
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(cut: Cut, lo: f64, hi: f64, points: usize) -> SweepSpec {
        SweepSpec {
            range: GridRange { lo, hi, points },
            temperatures: vec![0.1],
            n_sites_list: vec![2],
            ..SweepSpec::new(cut, -1.0)
        }
    }

    #[test]
    fn diagonal_grid() {
        let grid = expand_grid(&spec(Cut::Diagonal, -1.0, 1.0, 3), SiteCap::default()).unwrap();
        let got: Vec<_> = grid.iter().map(|(p, t)| (p.j_spin, p.i_pseudo, *t)).collect();
        assert_eq!(got, vec![(-1.0, -1.0, 0.1), (0.0, 0.0, 0.1), (1.0, 1.0, 0.1)]);
    }

    #[test]
    fn antidiagonal_single_point() {
        let grid = expand_grid(&spec(Cut::Antidiagonal, -1.0, -1.0, 1), SiteCap::default()).unwrap();
        assert_eq!(grid.len(), 1);
        assert_eq!((grid[0].0.j_spin, grid[0].0.i_pseudo), (-1.0, 1.0));
    }

    #[test]
    fn default_grid_has_twentieth_steps() {
        let values = GridRange::default().values();
        assert_eq!(values.len(), 41);
        assert_eq!(values[0], -1.0);
        assert_eq!(values[40], 1.0);
        for (k, v) in values.iter().enumerate() {
            assert!((v - (-1.0 + 0.05 * k as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn ordering_is_sites_then_cut_then_temperature() {
        let s = SweepSpec {
            temperatures: vec![0.2, 0.1],
            n_sites_list: vec![3, 2],
            ..spec(Cut::ExplicitList(vec![(0.5, 0.25), (-1.0, 2.0)]), 0.0, 0.0, 1)
        };
        let grid = expand_grid(&s, SiteCap::default()).unwrap();
        let got: Vec<_> = grid
            .iter()
            .map(|(p, t)| (p.n_sites, p.j_spin, p.i_pseudo, *t))
            .collect();
        assert_eq!(
            got,
            vec![
                (3, 0.5, 0.25, 0.2),
                (3, 0.5, 0.25, 0.1),
                (3, -1.0, 2.0, 0.2),
                (3, -1.0, 2.0, 0.1),
                (2, 0.5, 0.25, 0.2),
                (2, 0.5, 0.25, 0.1),
                (2, -1.0, 2.0, 0.2),
                (2, -1.0, 2.0, 0.1),
            ]
        );
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let cap = SiteCap::default();
        assert!(expand_grid(&spec(Cut::Diagonal, 1.0, -1.0, 3), cap).is_err());
        assert!(expand_grid(&spec(Cut::Diagonal, -1.0, 1.0, 0), cap).is_err());
        assert!(expand_grid(&spec(Cut::Diagonal, -1.0, 1.0, 1), cap).is_err());
        let mut s = spec(Cut::Diagonal, -1.0, 1.0, 3);
        s.temperatures = vec![];
        assert!(expand_grid(&s, cap).is_err());
        s.temperatures = vec![-0.1];
        assert!(expand_grid(&s, cap).is_err());
        s.temperatures = vec![0.1];
        s.n_sites_list = vec![8];
        assert!(matches!(expand_grid(&s, cap), Err(Error::SiteCapExceeded { .. })));
        assert!(expand_grid(&spec(Cut::ExplicitList(vec![]), 0.0, 0.0, 1), cap).is_err());
    }

    #[test]
    fn exact_linear_model_is_recovered() {
        let (a, b) = (0.3, -1.7);
        let pts: Vec<_> = [4usize, 5, 6].iter().map(|&n| (n, a + b / n as f64)).collect();
        let fit = extrapolate(&pts).unwrap();
        assert!((fit.intercept - a).abs() < 1e-12);
        assert!((fit.slope - b).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.n_points, 3);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let fit = extrapolate(&[(4, 0.2), (5, 0.2), (7, 0.2)]).unwrap();
        assert!((fit.intercept - 0.2).abs() < 1e-15);
        assert!(fit.slope.abs() < 1e-13);
    }

    #[test]
    fn extrapolation_needs_two_sizes() {
        assert_eq!(
            extrapolate(&[(4, 0.1), (4, 0.2)]),
            Err(Error::TooFewSizes { distinct: 1 })
        );
        assert_eq!(extrapolate(&[]), Err(Error::TooFewSizes { distinct: 0 }));
    }

    #[test]
    fn pipeline_reuses_one_spectrum_across_temperatures() {
        let p = ModelParams::new(2).with_couplings(0.0, 0.0, -1.0);
        let eval = evaluate_point(&p, &[0.0, 0.5, 100.0], true, SiteCap::default()).unwrap();
        assert_eq!(eval.ground_degeneracy, 1);
        assert!((eval.ground_energy + 9.0 / 16.0).abs() < 1e-12);
        assert_eq!(eval.temperatures.len(), 3);
        // singlet ⊗ singlet is a product across the bipartition
        assert_eq!(eval.temperatures[0].negativity.log_negativity, 0.0);
        assert!(eval.temperatures[2].negativity.log_negativity < 1e-6);
        assert!(eval.temperatures.iter().all(|t| t.observables.is_some()));
    }
}
