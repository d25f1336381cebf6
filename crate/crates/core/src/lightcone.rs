//! Correlation-edge and ridge-velocity extraction from correlation fields:
//! activation-time tracking in 1D, per-axis and radial tracking in 2D, and
//! ordinary least-squares velocity fits.
//!
//! Thresholds are always relative to the global field maximum, so scaling
//! the whole field leaves every result bit-identical.

use crate::error::Error;
use crate::observables::CorrelationField;
use crate::Result;

/// A linear front fit: the tracked `(distance, time)` points, the fitted
/// velocity (slope of distance versus time), intercept, and rms residual.
#[derive(Debug, Clone)]
pub struct EdgeFit {
    pub points: Vec<(f64, f64)>,
    pub velocity: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// Relative threshold that produced the points, when there was one.
    pub threshold: Option<f64>,
}

fn field_max_abs_re(field: &CorrelationField) -> f64 {
    field.values.iter().fold(0.0f64, |m, v| m.max(v.re.abs()))
}

/// Earliest sample time per distance at which `|Re value|` reaches
/// `threshold_fraction` of the global field maximum; distances that never
/// cross are omitted. 1D fields only.
pub fn activation_times(field: &CorrelationField, threshold_fraction: f64) -> Result<Vec<(f64, f64)>> {
    let rs = field
        .scalar_distances()
        .ok_or(Error::DimensionMismatch { expected: 1, got: field.dimension() })?;
    let max = field_max_abs_re(field);
    if max <= 0.0 {
        return Err(Error::EmptyActivation { threshold: 0.0 });
    }
    let threshold = threshold_fraction * max;
    let mut points = Vec::new();
    for (d, &r) in rs.iter().enumerate() {
        if let Some(t_idx) = (0..field.times.len()).find(|&t| field.value(d, t).re.abs() >= threshold) {
            points.push((r as f64, field.times[t_idx]));
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyActivation { threshold });
    }
    Ok(points)
}

/// Ordinary least squares of distance against time over `(R, t)` points.
pub fn fit_velocity(points: &[(f64, f64)]) -> Result<EdgeFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let t_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let r_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut str_ = 0.0;
    for &(r, t) in points {
        stt += (t - t_mean) * (t - t_mean);
        str_ += (t - t_mean) * (r - r_mean);
    }
    if stt == 0.0 {
        return Err(Error::DegenerateAbscissa);
    }
    let velocity = str_ / stt;
    let intercept = r_mean - velocity * t_mean;
    let rms = (points
        .iter()
        .map(|&(r, t)| {
            let d = r - (velocity * t + intercept);
            d * d
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(EdgeFit { points: points.to_vec(), velocity, intercept, rms_residual: rms, threshold: None })
}

/// Activation tracking plus velocity fit in one step.
pub fn edge_fit(field: &CorrelationField, threshold_fraction: f64) -> Result<EdgeFit> {
    let points = activation_times(field, threshold_fraction)?;
    let mut fit = fit_velocity(&points)?;
    fit.threshold = Some(threshold_fraction);
    Ok(fit)
}

/// Knobs of the ridge tracker. A ridge must both live for `min_samples`
/// adjacent samples and sweep at least `min_span` sites to count as a
/// propagating extremum.
#[derive(Debug, Clone, Copy)]
pub struct RidgeOptions {
    pub threshold_fraction: f64,
    pub max_jump: f64,
    pub min_samples: usize,
    pub min_span: f64,
}

impl Default for RidgeOptions {
    fn default() -> Self {
        RidgeOptions { threshold_fraction: 1e-3, max_jump: 2.0, min_samples: 3, min_span: 2.0 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ExtremumKind {
    Maximum,
    Minimum,
}

/// Track local extrema of `Re value` inside the causal region across time,
/// link them into ridges by nearest same-kind distance, and fit each ridge.
/// Returns up to `ridge_count` fits sorted by rms residual, best first (the
/// first entry is the dominant ridge).
///
/// Extremum positions are refined to sub-site accuracy with a parabolic
/// three-point fit, which is what makes the per-ridge fits well conditioned
/// at sampling rates where an integer position moves less than a site per
/// sample.
pub fn track_extrema(
    field: &CorrelationField,
    ridge_count: usize,
    opts: &RidgeOptions,
) -> Result<Vec<EdgeFit>> {
    let rs = field
        .scalar_distances()
        .ok_or(Error::DimensionMismatch { expected: 1, got: field.dimension() })?;
    let threshold = opts.threshold_fraction * field_max_abs_re(field);
    let nr = rs.len();
    let nt = field.times.len();
    // activation map reused as the causality mask
    let mut t_act = vec![usize::MAX; nr];
    for d in 0..nr {
        if let Some(t) = (0..nt).find(|&t| field.value(d, t).re.abs() >= threshold) {
            t_act[d] = t;
        }
    }

    struct OpenRidge {
        kind: ExtremumKind,
        last_pos: f64,
        points: Vec<(f64, f64)>,
    }
    let mut open: Vec<OpenRidge> = Vec::new();
    let mut closed: Vec<Vec<(f64, f64)>> = Vec::new();

    for t in 0..nt {
        // extrema among causally activated, contiguous interior sites
        let mut extrema: Vec<(f64, ExtremumKind)> = Vec::new();
        for d in 1..nr.saturating_sub(1) {
            if t_act[d - 1] > t || t_act[d] > t || t_act[d + 1] > t {
                continue;
            }
            let v0 = field.value(d - 1, t).re;
            let v1 = field.value(d, t).re;
            let v2 = field.value(d + 1, t).re;
            let kind = if v1 > v0 && v1 > v2 {
                ExtremumKind::Maximum
            } else if v1 < v0 && v1 < v2 {
                ExtremumKind::Minimum
            } else {
                continue;
            };
            let denom = v0 - 2.0 * v1 + v2;
            let offset = if denom != 0.0 { 0.5 * (v0 - v2) / denom } else { 0.0 };
            extrema.push((rs[d] as f64 + offset, kind));
        }

        let mut used = vec![false; extrema.len()];
        let mut still_open = Vec::new();
        for mut ridge in open.drain(..) {
            let mut best: Option<(usize, f64)> = None;
            for (e, &(pos, kind)) in extrema.iter().enumerate() {
                if used[e] || kind != ridge.kind {
                    continue;
                }
                let dist = (pos - ridge.last_pos).abs();
                if best.map(|(_, bd)| dist < bd).unwrap_or(true) {
                    best = Some((e, dist));
                }
            }
            match best {
                Some((e, dist)) if dist <= opts.max_jump => {
                    used[e] = true;
                    ridge.last_pos = extrema[e].0;
                    ridge.points.push((extrema[e].0, field.times[t]));
                    still_open.push(ridge);
                }
                _ => closed.push(ridge.points),
            }
        }
        for (e, &(pos, kind)) in extrema.iter().enumerate() {
            if !used[e] {
                still_open.push(OpenRidge { kind, last_pos: pos, points: vec![(pos, field.times[t])] });
            }
        }
        open = still_open;
    }
    closed.extend(open.into_iter().map(|r| r.points));

    let mut fits = Vec::new();
    for points in closed {
        if points.len() < opts.min_samples {
            continue;
        }
        let span = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)
            - points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        if span < opts.min_span {
            continue;
        }
        match fit_velocity(&points) {
            Ok(mut fit) => {
                fit.threshold = Some(opts.threshold_fraction);
                fits.push(fit);
            }
            Err(Error::DegenerateAbscissa) | Err(Error::TooFewPoints(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    fits.sort_by(|a, b| a.rms_residual.partial_cmp(&b.rms_residual).expect("finite residuals"));
    fits.truncate(ridge_count);
    Ok(fits)
}

/// How the 2D front radius is measured per time sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialTracking {
    /// Largest on-axis `x` with `|Re value|` above threshold (offsets with
    /// all other components zero).
    PerAxis,
    /// Largest Euclidean `|R|` over all offsets above threshold.
    Radial,
}

/// Track the 2D correlation front: per time, the outermost above-threshold
/// distance under the chosen measure, fitted linearly against time.
pub fn radial_edge_2d(
    field: &CorrelationField,
    threshold_fraction: f64,
    mode: RadialTracking,
) -> Result<EdgeFit> {
    if field.dimension() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: field.dimension() });
    }
    let max = field_max_abs_re(field);
    if max <= 0.0 {
        return Err(Error::EmptyActivation { threshold: 0.0 });
    }
    let threshold = threshold_fraction * max;
    let radius: Vec<Option<f64>> = field
        .distances
        .iter()
        .map(|d| match mode {
            RadialTracking::PerAxis => {
                if d[1] == 0 {
                    Some(d[0].abs() as f64)
                } else {
                    None
                }
            }
            RadialTracking::Radial => Some((d[0] as f64).hypot(d[1] as f64)),
        })
        .collect();
    let mut points = Vec::new();
    for (t, &time) in field.times.iter().enumerate() {
        let mut outer: Option<f64> = None;
        for (d, r) in radius.iter().enumerate() {
            let Some(r) = r else { continue };
            if field.value(d, t).re.abs() >= threshold {
                outer = Some(outer.map_or(*r, |o: f64| o.max(*r)));
            }
        }
        if let Some(r) = outer {
            points.push((r, time));
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyActivation { threshold });
    }
    let mut fit = fit_velocity(&points)?;
    fit.threshold = Some(threshold_fraction);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Flavor;
    use crate::observables::FieldKind;
    use crate::C64;

    fn field_1d(rs: &[i64], ts: &[f64], f: impl Fn(i64, f64) -> f64) -> CorrelationField {
        let mut values = Vec::new();
        for &r in rs {
            for &t in ts {
                values.push(C64::new(f(r, t), 0.0));
            }
        }
        CorrelationField {
            kind: FieldKind::OneBody,
            flavor: Flavor::Bosonic,
            distances: rs.iter().map(|&r| vec![r]).collect(),
            times: ts.to_vec(),
            values,
            provenance: None,
            sigma: None,
        }
    }

    #[test]
    fn single_spike_activation() {
        let rs: Vec<i64> = (0..6).collect();
        let ts: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let f = field_1d(&rs, &ts, |r, t| if r == 3 && t == 2.0 { 1.0 } else { 0.0 });
        let pts = activation_times(&f, 1e-3).unwrap();
        assert_eq!(pts, vec![(3.0, 2.0)]);
    }

    #[test]
    fn step_front_recovers_velocity() {
        let rs: Vec<i64> = (0..40).collect();
        let ts: Vec<f64> = (0..80).map(|i| 0.25 * i as f64).collect();
        let v = 2.0;
        let f = field_1d(&rs, &ts, |r, t| if t >= r as f64 / v { 1.0 } else { 0.0 });
        let fit = edge_fit(&f, 1e-3).unwrap();
        assert!((fit.velocity - v).abs() / v <= 0.01, "{}", fit.velocity);
    }

    #[test]
    fn fit_velocity_examples() {
        let fit = fit_velocity(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert!((fit.velocity - 1.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
        let fit = fit_velocity(&[(0.0, 0.0), (2.0, 1.0), (4.0, 2.0)]).unwrap();
        assert!((fit.velocity - 2.0).abs() < 1e-12);
        assert!(matches!(fit_velocity(&[(0.0, 0.0), (1.0, 1.0)]), Err(Error::TooFewPoints(2))));
        assert!(matches!(
            fit_velocity(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]),
            Err(Error::DegenerateAbscissa)
        ));
    }

    #[test]
    fn fit_is_affine_equivariant_in_time() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (1.3 * i as f64 + 0.1, i as f64)).collect();
        let shifted: Vec<(f64, f64)> = pts.iter().map(|&(r, t)| (r, t + 5.0)).collect();
        let a = fit_velocity(&pts).unwrap();
        let b = fit_velocity(&shifted).unwrap();
        assert!((a.velocity - b.velocity).abs() < 1e-12);
        assert!((a.intercept - (b.intercept + 5.0 * b.velocity)).abs() < 1e-9);
    }

    #[test]
    fn threshold_is_scale_free() {
        let rs: Vec<i64> = (0..30).collect();
        let ts: Vec<f64> = (0..60).map(|i| 0.25 * i as f64).collect();
        let base = field_1d(&rs, &ts, |r, t| (t - r as f64 / 1.7).max(0.0));
        let mut scaled = base.clone();
        for v in &mut scaled.values {
            *v *= 1742.0;
        }
        assert_eq!(
            activation_times(&base, 1e-3).unwrap(),
            activation_times(&scaled, 1e-3).unwrap()
        );
        let a = edge_fit(&base, 1e-3).unwrap();
        let b = edge_fit(&scaled, 1e-3).unwrap();
        assert_eq!(a.velocity, b.velocity);
    }

    #[test]
    fn traveling_wave_ridge_velocity() {
        // cos(2 h t - q R) under a causal envelope: ridges move at 2h/q
        let h = 5.0;
        let q = 2.0;
        let rs: Vec<i64> = (0..50).collect();
        let ts: Vec<f64> = (0..300).map(|i| 13.0 * i as f64 / 300.0).collect();
        let f = field_1d(&rs, &ts, |r, t| {
            let arg = 2.0 * h * t - q * r as f64;
            // gentle growth keeps the activation mask causal
            if t >= r as f64 / 20.0 {
                arg.cos() * (0.2 * t).exp()
            } else {
                0.0
            }
        });
        let fits = track_extrema(&f, 4, &RidgeOptions::default()).unwrap();
        assert!(!fits.is_empty());
        let v = fits[0].velocity;
        let expected = 2.0 * h / q;
        assert!((v - expected).abs() / expected <= 0.02, "{v} vs {expected}");
    }

    #[test]
    fn radial_and_axis_tracking_on_isotropic_step() {
        let v = 3.0;
        let mut distances = Vec::new();
        for x in 0..25i64 {
            for y in 0..25i64 {
                distances.push(vec![x, y]);
            }
        }
        let ts: Vec<f64> = (0..40).map(|i| 0.2 * i as f64).collect();
        let mut values = Vec::new();
        for d in &distances {
            let rad = (d[0] as f64).hypot(d[1] as f64);
            for &t in &ts {
                values.push(C64::new(if t >= rad / v { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let field = CorrelationField {
            kind: FieldKind::OneBody,
            flavor: Flavor::Bosonic,
            distances,
            times: ts,
            values,
            provenance: None,
            sigma: None,
        };
        let rad = radial_edge_2d(&field, 1e-3, RadialTracking::Radial).unwrap();
        assert!((rad.velocity - v).abs() / v <= 0.05, "{}", rad.velocity);
        let axis = radial_edge_2d(&field, 1e-3, RadialTracking::PerAxis).unwrap();
        assert!((axis.velocity - v).abs() / v <= 0.05, "{}", axis.velocity);
    }

    #[test]
    fn empty_activation_reported() {
        let rs: Vec<i64> = (0..5).collect();
        let ts = [0.0, 1.0];
        let f = field_1d(&rs, &ts, |_, _| 0.0);
        assert!(matches!(activation_times(&f, 0.5), Err(Error::EmptyActivation { .. })));
    }
}
