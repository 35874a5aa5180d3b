//! Parallel sweep execution.
//!
//! Each distinct Hamiltonian of a sweep is one work unit: it is diagonalized
//! once and then evaluated at every temperature. Workers pull unit indices from
//! a shared counter and send results back over a channel. The caller receives
//! rows in grid order no matter which worker finished first.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use kkent_core::sweep::{evaluate_spectrum, expand_points, TemperaturePoint};
use kkent_core::{build_hamiltonian, diagonalize, ModelParams, SiteCap, SweepSpec};
use serde::{Deserialize, Serialize};

use crate::cache::SpectrumCache;
use crate::error::KkentError;

pub const STATUS_OK: &str = "ok";

/// One output row: a single (Hamiltonian, temperature) grid point.
///
/// Computed columns are `None` when the point failed; `status` then carries
/// `error: <message>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_sites: usize,
    pub j_spin: f64,
    pub i_pseudo: f64,
    pub k_coupling: f64,
    pub field_s_mag: f64,
    pub field_s_pattern: String,
    pub field_t_mag: f64,
    pub field_t_pattern: String,
    pub temperature: f64,
    pub log_negativity: Option<f64>,
    pub trace_norm: Option<f64>,
    pub ground_energy: Option<f64>,
    pub ground_degeneracy: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ss_bond_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tt_bond_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sstt_bond_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mag_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mag_t: Option<f64>,
    pub wall_time_ms: f64,
    pub status: String,
}

impl SweepRow {
    fn skeleton(params: &ModelParams, temperature: f64) -> Self {
        let field = |f: &kkent_core::FieldSpec| {
            let magnitude = if f.is_off() { 0.0 } else { f.magnitude };
            (magnitude, f.pattern.as_str().to_string())
        };
        let (field_s_mag, field_s_pattern) = field(&params.field_spin);
        let (field_t_mag, field_t_pattern) = field(&params.field_pseudo);
        Self {
            n_sites: params.n_sites,
            j_spin: params.j_spin,
            i_pseudo: params.i_pseudo,
            k_coupling: params.k_coupling,
            field_s_mag,
            field_s_pattern,
            field_t_mag,
            field_t_pattern,
            temperature,
            log_negativity: None,
            trace_norm: None,
            ground_energy: None,
            ground_degeneracy: None,
            ss_bond_mean: None,
            tt_bond_mean: None,
            sstt_bond_mean: None,
            mag_s: None,
            mag_t: None,
            wall_time_ms: 0.0,
            status: String::new(),
        }
    }

    fn failed(params: &ModelParams, temperature: f64, message: &str, wall_time_ms: f64) -> Self {
        Self {
            wall_time_ms,
            status: format!("error: {message}"),
            ..Self::skeleton(params, temperature)
        }
    }

    fn from_point(
        params: &ModelParams,
        ground_energy: f64,
        ground_degeneracy: usize,
        point: &TemperaturePoint,
        wall_time_ms: f64,
    ) -> Self {
        let obs = point.observables.as_ref();
        Self {
            log_negativity: Some(point.negativity.log_negativity),
            trace_norm: Some(point.negativity.trace_norm),
            ground_energy: Some(ground_energy),
            ground_degeneracy: Some(ground_degeneracy),
            ss_bond_mean: obs.and_then(|o| o.ss_bond_mean()),
            tt_bond_mean: obs.and_then(|o| o.tt_bond_mean()),
            sstt_bond_mean: obs.and_then(|o| o.sstt_bond_mean()),
            mag_s: obs.map(|o| o.mag_s),
            mag_t: obs.map(|o| o.mag_t),
            wall_time_ms,
            status: STATUS_OK.to_string(),
            ..Self::skeleton(params, point.temperature)
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

/// Evaluates one Hamiltonian at every temperature.
///
/// `wall_time_ms` of each row is the time spent on that temperature plus an
/// equal share of the build and diagonalization time. Failures never
/// propagate: they turn every row of the unit into an error row.
pub fn evaluate_unit(
    params: &ModelParams,
    temperatures: &[f64],
    with_observables: bool,
    cap: SiteCap,
    cache: Option<&SpectrumCache>,
) -> Vec<SweepRow> {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        evaluate_unit_inner(params, temperatures, with_observables, cap, cache)
    }));
    match outcome {
        Ok(Ok(rows)) => rows,
        Ok(Err(err)) => fail_all(params, temperatures, &err.to_string(), start),
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "worker panicked".to_string());
            fail_all(params, temperatures, &format!("panic: {message}"), start)
        }
    }
}

fn fail_all(params: &ModelParams, temperatures: &[f64], message: &str, start: Instant) -> Vec<SweepRow> {
    let share = elapsed_ms(start) / temperatures.len().max(1) as f64;
    temperatures
        .iter()
        .map(|&t| SweepRow::failed(params, t, message, share))
        .collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn evaluate_unit_inner(
    params: &ModelParams,
    temperatures: &[f64],
    with_observables: bool,
    cap: SiteCap,
    cache: Option<&SpectrumCache>,
) -> Result<Vec<SweepRow>, KkentError> {
    let start = Instant::now();
    let h = build_hamiltonian(params, cap)?;
    let spectrum = match cache.and_then(|c| c.load(params, &h)) {
        Some(s) => s,
        None => {
            let s = diagonalize(&h, cap)?;
            if let Some(c) = cache {
                // A failed cache write only costs a recomputation next time.
                let _ = c.store(params, &s);
            }
            s
        }
    };
    drop(h);
    let setup_share = elapsed_ms(start) / temperatures.len().max(1) as f64;

    let mut rows = Vec::with_capacity(temperatures.len());
    for &t in temperatures {
        let t_start = Instant::now();
        let wall = |t_start: Instant| setup_share + elapsed_ms(t_start);
        match evaluate_spectrum(params, &spectrum, &[t], with_observables) {
            Ok(eval) => rows.push(SweepRow::from_point(
                params,
                eval.ground_energy,
                eval.ground_degeneracy,
                &eval.temperatures[0],
                wall(t_start),
            )),
            Err(err) => rows.push(SweepRow::failed(params, t, &err.to_string(), wall(t_start))),
        }
    }
    Ok(rows)
}

/// Runs every grid point of `spec` on up to `worker_budget` threads.
///
/// Rows come back in grid order: chain length outer, cut parameter middle,
/// temperature inner.
pub fn run_sweep(
    spec: &SweepSpec,
    worker_budget: usize,
    cap: SiteCap,
    cache: Option<&SpectrumCache>,
) -> Result<Vec<SweepRow>, KkentError> {
    let units = expand_points(spec, cap)?;
    let workers = worker_budget.max(1).min(units.len().max(1));
    let mut slots: Vec<Option<Vec<SweepRow>>> = vec![None; units.len()];
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Vec<SweepRow>)>();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, units) = (&next, &units);
            scope.spawn(move || loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                let Some(params) = units.get(index) else { break };
                let rows = evaluate_unit(params, &spec.temperatures, spec.observables_enabled, cap, cache);
                if tx.send((index, rows)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (index, rows) in rx {
            slots[index] = Some(rows);
        }
    });

    Ok(slots
        .into_iter()
        .flat_map(|rows| rows.expect("every work unit reports exactly once"))
        .collect())
}
