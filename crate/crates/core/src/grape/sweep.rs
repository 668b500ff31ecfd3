//! Continuation in the total time `T`: each seed walks `T` downward,
//! warm-starting every optimization from the previous optimum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{optimize_from, random_field, OptimizeOptions};
use crate::bounds::{model_qsl, reachable_qsl_floor, QslReport};
use crate::error::{Error, Result};
use crate::models::PhaseControlModel;
use crate::ops::UnitaryOperator;

/// Thresholds at which `t_min` is always reported.
pub const REPORT_THRESHOLDS: [f64; 3] = [1e-4, 1e-5, 1e-6];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOptions {
    pub t_hi: f64,
    pub t_step: f64,
    pub n_seeds: usize,
    pub n_ts: usize,
    pub threshold: f64,
    pub seed: u64,
    pub optimize: OptimizeOptions,
    /// Once a seed has reached every reported threshold, it stops walking
    /// after this many consecutive grid points above them; `None` walks the
    /// whole grid.
    pub patience: Option<usize>,
}

impl SweepOptions {
    pub fn new(t_hi: f64, t_step: f64) -> Self {
        Self {
            t_hi,
            t_step,
            n_seeds: 20,
            n_ts: 30,
            threshold: 1e-5,
            seed: 0,
            optimize: OptimizeOptions::default(),
            patience: Some(4),
        }
    }
}

/// `max(3 tau_unified, 2/Omega)`.
pub fn default_t_hi(model: &PhaseControlModel, v: &UnitaryOperator) -> Result<f64> {
    Ok((3.0 * model_qsl(model, v)?.tau_unified).max(2.0 / model.omega()))
}

/// Doubles `opts.t_hi` until some seed reaches `opts.threshold` there, at
/// most `max_doublings` times. Returns `None` if no seed ever does.
pub fn bracket_t_hi(
    model: &PhaseControlModel,
    v: &UnitaryOperator,
    opts: &SweepOptions,
    max_doublings: usize,
) -> Result<Option<f64>> {
    if !(opts.t_hi > 0.0) {
        return Err(Error::InvalidArgument(format!("t_hi must be positive, got {}", opts.t_hi)));
    }
    let mut t = opts.t_hi;
    for _ in 0..=max_doublings {
        for k in 0..opts.n_seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let field = random_field(t, opts.n_ts, &mut rng)?;
            if optimize_from(model, v, field, &opts.optimize)?.final_infidelity <= opts.threshold {
                return Ok(Some(t));
            }
        }
        t *= 2.0;
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    #[serde(rename = "T")]
    pub t: f64,
    pub best_j: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdTmin {
    pub threshold: f64,
    pub t_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    /// Descending in `T`.
    pub grid: Vec<GridPoint>,
    pub threshold: f64,
    pub t_min: Option<f64>,
    pub t_min_by_threshold: Vec<ThresholdTmin>,
    pub qsl: QslReport,
    /// Smallest time the speed limits allow for any `U` within `threshold`.
    pub qsl_floor: f64,
    pub qsl_consistent: bool,
}

impl SweepResult {
    /// Smallest grid `T` whose best infidelity is at most `threshold`.
    pub fn t_min_at(&self, threshold: f64) -> Option<f64> {
        self.grid.iter().filter(|p| p.best_j <= threshold).map(|p| p.t).reduce(f64::min)
    }
}

/// `t_hi, t_hi - t_step, ...` while positive.
pub fn time_grid(t_hi: f64, t_step: f64) -> Vec<f64> {
    let n = (t_hi / t_step - 1e-9).floor() as usize;
    (0..=n)
        .map(|k| ((t_hi - k as f64 * t_step) * 1e12).round() / 1e12)
        .filter(|t| *t > 1e-12)
        .collect()
}

/// Best infidelity over seeds at every grid time, and the resulting `t_min`.
pub fn mct_sweep(model: &PhaseControlModel, v: &UnitaryOperator, opts: &SweepOptions) -> Result<SweepResult> {
    if !(opts.t_step > 0.0 && opts.t_hi > opts.t_step) {
        return Err(Error::InvalidArgument(format!(
            "need t_hi > t_step > 0 (got {}, {})",
            opts.t_hi, opts.t_step
        )));
    }
    if opts.n_seeds == 0 || opts.n_ts == 0 {
        return Err(Error::InvalidArgument("n_seeds and n_ts must be at least 1".into()));
    }
    if v.dim() != model.dim() {
        return Err(Error::DimensionMismatch { left: model.dim(), right: v.dim() });
    }
    let times = time_grid(opts.t_hi, opts.t_step);
    let mut best = vec![f64::INFINITY; times.len()];
    let fail_level = REPORT_THRESHOLDS.iter().copied().fold(opts.threshold, f64::max);

    for k in 0..opts.n_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k as u64);
        let mut field = random_field(times[0], opts.n_ts, &mut rng)?;
        let mut misses = 0;
        let mut reached = false;
        for (i, &t) in times.iter().enumerate() {
            let r = optimize_from(model, v, field.rescaled(t)?, &opts.optimize)?;
            best[i] = best[i].min(r.final_infidelity);
            field = r.field;
            if r.final_infidelity <= fail_level {
                reached = true;
                misses = 0;
            } else if reached {
                misses += 1;
            }
            if opts.patience.is_some_and(|p| misses >= p) {
                break;
            }
        }
    }

    let grid: Vec<GridPoint> = times
        .iter()
        .zip(&best)
        .filter(|(_, b)| b.is_finite())
        .map(|(&t, &best_j)| GridPoint { t, best_j })
        .collect();
    let qsl = model_qsl(model, v)?;
    let (de, hn) = model.speed_ceilings();
    let qsl_floor = reachable_qsl_floor(&qsl, model.dim(), de, hn, opts.threshold);
    let mut out = SweepResult {
        grid,
        threshold: opts.threshold,
        t_min: None,
        t_min_by_threshold: Vec::new(),
        qsl,
        qsl_floor,
        qsl_consistent: true,
    };
    out.t_min = out.t_min_at(opts.threshold);
    out.t_min_by_threshold = REPORT_THRESHOLDS
        .iter()
        .map(|&threshold| ThresholdTmin { threshold, t_min: out.t_min_at(threshold) })
        .collect();
    out.qsl_consistent = out.t_min.map_or(true, |t| t >= qsl_floor - 1e-12);
    Ok(out)
}
