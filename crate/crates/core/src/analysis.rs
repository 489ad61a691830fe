//! Peak spacing and recurrence tests on concurrence curves.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::dynamics::Trajectory;
use crate::Result;

/// Indices of local maxima. The first sample counts when it exceeds its
/// neighbour; the last sample never counts.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    if n >= 2 && values[0] > values[1] {
        out.push(0);
    }
    for i in 1..n.saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] {
            out.push(i);
        }
    }
    out
}

/// Time of the extremum near interior sample `i` from a parabola through
/// samples `i − 1, i, i + 1` on a uniform grid.
pub fn refine_extremum(times: &[f64], values: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= values.len() {
        return times[i];
    }
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        return times[i];
    }
    let h = times[i + 1] - times[i];
    times[i] + 0.5 * h * (y0 - y2) / denom
}

/// Refined times of the concurrence peaks.
pub fn peak_times(traj: &Trajectory) -> Vec<f64> {
    local_maxima(&traj.concurrence)
        .into_iter()
        .map(|i| refine_extremum(&traj.times, &traj.concurrence, i))
        .collect()
}

/// Average spacing between consecutive peaks, if there are at least two.
pub fn mean_peak_spacing(traj: &Trajectory) -> Option<f64> {
    let peaks = peak_times(traj);
    match peaks.as_slice() {
        [first, .., last] => Some((last - first) / (peaks.len() - 1) as f64),
        _ => None,
    }
}

/// `max_k |C(t_k + shift) − C(t_k)|` over the given samples, with `C` evaluated
/// at the shifted times by `eval`.
pub fn shift_residual<F>(eval: &F, times: &[f64], values: &[f64], shift: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for (&t, &c) in times.iter().zip(values) {
        worst = worst.max((eval(t + shift)? - c).abs());
    }
    Ok(worst)
}

/// Best recurrence found by [`best_recurrence`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recurrence {
    pub period: f64,
    /// `max_t |C(t + period) − C(t)|` over the test window.
    pub residual: f64,
}

/// Searches shifts `T ≤ max_period` for the one that best maps the curve on
/// `[0, window]` onto itself. Shifts before the grid residual first peaks are
/// not candidates, since `T → 0` reproduces any continuous curve.
///
/// `traj` must be sampled on a uniform grid covering at least
/// `window + max_period`; it provides a coarse residual for every grid shift.
/// The most promising grid shifts are then refined continuously with
/// golden-section search, evaluating the curve at off-grid times through
/// `eval`. The returned residual is measured on every window sample.
pub fn best_recurrence<F>(traj: &Trajectory, eval: F, window: f64, max_period: f64) -> Result<Recurrence>
where
    F: Fn(f64) -> Result<f64>,
{
    const CANDIDATES: usize = 6;
    // Window samples used while refining; the final residual uses them all.
    const REFINE_STRIDE: usize = 25;

    let n = traj.len();
    assert!(n >= 3, "trajectory too short for a recurrence search");
    let dt = traj.times[1] - traj.times[0];
    let window_len = ((window / dt + 1e-9).floor() as usize + 1).min(n);
    let max_lag = ((max_period / dt + 1e-9).floor() as usize).min(n - window_len);
    let values = &traj.concurrence;

    let coarse: Vec<f64> = (0..=max_lag)
        .map(|lag| {
            if lag == 0 {
                return f64::INFINITY;
            }
            (0..window_len)
                .map(|k| (values[k + lag] - values[k]).abs())
                .fold(0.0, f64::max)
        })
        .collect();

    // Tiny shifts trivially map the curve onto itself; candidates start once
    // the residual has risen to its first local maximum.
    let first_rise = (2..max_lag)
        .find(|&lag| coarse[lag] >= coarse[lag - 1] && coarse[lag] > coarse[lag + 1])
        .unwrap_or(max_lag);
    let mut minima: Vec<usize> = (first_rise + 1..=max_lag)
        .filter(|&lag| coarse[lag] <= coarse[lag - 1] && (lag == max_lag || coarse[lag] <= coarse[lag + 1]))
        .collect();
    minima.sort_by(|&a, &b| coarse[a].total_cmp(&coarse[b]));
    minima.truncate(CANDIDATES);

    let sub_times: Vec<f64> = traj.times[..window_len].iter().step_by(REFINE_STRIDE).copied().collect();
    let sub_values: Vec<f64> = values[..window_len].iter().step_by(REFINE_STRIDE).copied().collect();
    let full_times = &traj.times[..window_len];
    let full_values = &values[..window_len];

    let mut best: Option<Recurrence> = None;
    for lag in minima {
        let centre = lag as f64 * dt;
        let lo = centre - dt;
        let hi = (centre + dt).min(max_period);
        let objective = |shift: f64| shift_residual(&eval, &sub_times, &sub_values, shift);
        let shift = golden_section(objective, lo, hi, 1e-10)?;
        let residual = shift_residual(&eval, full_times, full_values, shift)?;
        if best.is_none_or(|b| residual < b.residual) {
            best = Some(Recurrence { period: shift, residual });
        }
    }
    Ok(best.unwrap_or(Recurrence {
        period: f64::NAN,
        residual: f64::INFINITY,
    }))
}

/// `(t, f(t))` at the maximum of `f` on `[lo, hi]`, assuming a single peak
/// there.
pub fn refine_maximum<F>(f: F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let t = golden_section(|t| Ok(-f(t)?), lo, hi, 1e-12)?;
    Ok((t, f(t)?))
}

/// `(t, f(t))` at the minimum of `f` on `[lo, hi]`, assuming a single dip
/// there.
pub fn refine_minimum<F>(f: F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let t = golden_section(&f, lo, hi, 1e-12)?;
    Ok((t, f(t)?))
}

fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sampled(f: impl Fn(f64) -> f64, t_max: f64, dt: f64) -> Trajectory {
        let n = (t_max / dt + 1e-9).floor() as usize + 1;
        let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let concurrence: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        Trajectory {
            unnormalized_norm: alloc::vec![1.0; n],
            times,
            concurrence,
            states: None,
        }
    }

    #[test]
    fn maxima_of_a_cosine() {
        let traj = sampled(|t| (2.0 * PI * t / 3.3).cos(), 10.0, 0.01);
        let peaks = peak_times(&traj);
        assert_eq!(peaks.len(), 4);
        assert_eq!(peaks[0], 0.0);
        assert!((peaks[1] - 3.3).abs() < 1e-4);
        assert!((mean_peak_spacing(&traj).unwrap() - 3.3).abs() < 1e-4);
    }

    #[test]
    fn refined_extrema() {
        let f = |t: f64| Ok(1.0 - (t - 0.37).powi(2));
        let (t, v) = refine_maximum(f, 0.0, 1.0).unwrap();
        assert!((t - 0.37).abs() < 1e-8 && (v - 1.0).abs() < 1e-15);
        let (t, v) = refine_minimum(|t: f64| Ok(t.cos()), 2.0, 4.0).unwrap();
        assert!((t - PI).abs() < 1e-7 && (v + 1.0).abs() < 1e-14);
    }

    #[test]
    fn flat_or_short_curves() {
        assert!(local_maxima(&[1.0]).is_empty());
        assert!(local_maxima(&[1.0, 1.0, 1.0]).is_empty());
        let traj = sampled(|_| 0.5, 1.0, 0.1);
        assert!(mean_peak_spacing(&traj).is_none());
    }

    #[test]
    fn recurrence_found_for_off_grid_period() {
        let period = 2.0 * PI / 1.7;
        let f = |t: f64| (1.7 * t).sin().powi(2);
        let traj = sampled(f, 20.0, 0.01);
        let r = best_recurrence(&traj, |t| Ok(f(t)), 8.0, 10.0).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        let k = (r.period / (period / 2.0)).round();
        assert!((r.period - k * period / 2.0).abs() < 1e-8);
    }

    #[test]
    fn no_recurrence_for_incommensurate_sum() {
        let f = |t: f64| (t).sin() + (2f64.sqrt() * t).sin();
        let traj = sampled(f, 20.0, 0.01);
        let r = best_recurrence(&traj, |t| Ok(f(t)), 10.0, 10.0).unwrap();
        assert!(r.residual > 1e-3, "{r:?}");
        assert!(r.period > 1.0, "{r:?}");
    }
}
