//! Numerical integration and numeric cross-checks.
//!
//! Integration is classic fixed-step RK4. Curves from different time
//! parametrizations are compared as sets: the query curve is resampled at
//! arc-length spacing [`RESAMPLE_SPACING`] along its cubic Hermite
//! interpolant, and each sample's distance to the Hermite interpolant of the
//! reference curve gives a one-sided Hausdorff distance.

use std::collections::BTreeMap;
use std::fmt;

use exactalg::{NumPoly, Poly};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{transition, ChartField, ChartId};
use crate::error::{DesingError, Result};
use crate::field::{Bindings, VectorField};
use crate::polar::{bridge_beta1, bridge_beta1_jacobian, PolarField, PolarModel};
use crate::quasihom::Weights;

/// Integration stops once a coordinate exceeds this magnitude.
pub const DOMAIN_BOUND: f64 = 1e6;

pub const RESAMPLE_SPACING: f64 = 1e-3;

/// Curve distances below this are indistinguishable from rounding.
pub const DEFECT_FLOOR: f64 = 1e-14;

/// Coordinate frame of a point or trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Frame {
    Original,
    Chart { chart: ChartId },
    Polar { model: PolarModel },
}

impl Frame {
    /// Index of the coordinate that must stay non-negative.
    pub fn radial_index(self) -> Option<usize> {
        match self {
            Frame::Original => None,
            Frame::Chart { .. } => Some(0),
            Frame::Polar { .. } => Some(1),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Original => f.write_str("original"),
            Frame::Chart { chart } => write!(f, "{chart}"),
            Frame::Polar { model } => write!(f, "{model}"),
        }
    }
}

/// A planar vector field evaluable in floating point.
pub trait PlanarField: Sync {
    fn eval(&self, p: [f64; 2]) -> [f64; 2];
}

impl<F: Fn([f64; 2]) -> [f64; 2] + Sync> PlanarField for F {
    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        self(p)
    }
}

/// Two polynomials in two variables with parameters bound.
#[derive(Clone, Debug)]
pub struct PolyField {
    comps: [NumPoly; 2],
}

impl PolyField {
    pub fn new(p: &[Poly; 2], vars: [&str; 2], bindings: &Bindings) -> Result<Self> {
        let c0 = bindings.apply(&p[0], &vars)?.compile(&vars)?;
        let c1 = bindings.apply(&p[1], &vars)?.compile(&vars)?;
        Ok(PolyField { comps: [c0, c1] })
    }

    pub fn original(f: &VectorField, bindings: &Bindings) -> Result<Self> {
        PolyField::new(&[f.f1().clone(), f.f2().clone()], [f.x(), f.y()], bindings)
    }

    pub fn chart_desing(cf: &ChartField, bindings: &Bindings) -> Result<Self> {
        PolyField::new(cf.desing(), cf.vars(), bindings)
    }

    pub fn chart_raw(cf: &ChartField, bindings: &Bindings) -> Result<Self> {
        PolyField::new(cf.raw(), cf.vars(), bindings)
    }
}

impl PlanarField for PolyField {
    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        [self.comps[0].eval(&p), self.comps[1].eval(&p)]
    }
}

/// A polar field evaluated at `(angle, radius)` through cos/sin or cosh/sinh.
#[derive(Clone, Debug)]
pub struct PolarNumField {
    model: PolarModel,
    comps: [NumPoly; 2],
}

impl PolarNumField {
    pub fn new(pf: &PolarField, bindings: &Bindings) -> Result<Self> {
        let vars = [pf.c_var(), pf.s_var(), pf.radial_var()];
        let c = |q: &exactalg::QuotientPoly| -> Result<NumPoly> {
            Ok(bindings.apply(q.base(), &vars)?.compile(&vars)?)
        };
        Ok(PolarNumField {
            model: pf.model(),
            comps: [c(pf.angular())?, c(pf.radial())?],
        })
    }
}

impl PlanarField for PolarNumField {
    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        let (c, s) = self.model.signature().trig(p[0]);
        let x = [c, s, p[1]];
        [self.comps[0].eval(&x), self.comps[1].eval(&x)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    MaxTime,
    LeftDomain,
    StepUnderflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// RK4 orbit. `t` is elapsed time (increasing in both directions).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub frame: Frame,
    pub direction: Direction,
    pub initial: [f64; 2],
    pub h: f64,
    pub termination: Termination,
    pub points: Vec<(f64, [f64; 2])>,
}

impl Trajectory {
    pub fn last(&self) -> [f64; 2] {
        self.points.last().map(|p| p.1).unwrap_or(self.initial)
    }

    pub fn end_time(&self) -> f64 {
        self.points.last().map(|p| p.0).unwrap_or(0.0)
    }
}

/// Step-size and domain settings for [`integrate_with`].
#[derive(Clone, Copy, Debug)]
pub struct Integrator {
    pub h: f64,
    pub t_end: f64,
    pub direction: Direction,
    /// Coordinates beyond this magnitude end the orbit.
    pub bound: f64,
}

impl Integrator {
    pub fn new(h: f64, t_end: f64) -> Self {
        Integrator {
            h,
            t_end,
            direction: Direction::Forward,
            bound: DOMAIN_BOUND,
        }
    }

    pub fn backward(mut self) -> Self {
        self.direction = Direction::Backward;
        self
    }

    pub fn bounded(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }
}

fn axpy(a: f64, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
    [y[0] + a * x[0], y[1] + a * x[1]]
}

fn rk4_step(field: &dyn PlanarField, x: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = field.eval(x);
    let k2 = field.eval(axpy(0.5 * h, k1, x));
    let k3 = field.eval(axpy(0.5 * h, k2, x));
    let k4 = field.eval(axpy(h, k3, x));
    [
        x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Forward RK4 from `x0` up to `t_end` with step `h`.
pub fn integrate(
    field: &dyn PlanarField,
    frame: Frame,
    x0: [f64; 2],
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    integrate_with(field, frame, x0, &Integrator::new(h, t_end))
}

pub fn integrate_with(
    field: &dyn PlanarField,
    frame: Frame,
    x0: [f64; 2],
    cfg: &Integrator,
) -> Result<Trajectory> {
    if cfg.h.is_nan() || cfg.h <= 0.0 {
        return Err(DesingError::Precondition(format!("step size {} must be positive", cfg.h)));
    }
    let v0 = field.eval(x0);
    if !x0.iter().chain(v0.iter()).all(|v| v.is_finite()) {
        return Err(DesingError::NonFiniteField(x0));
    }
    let sign = cfg.direction.sign();
    let radial = frame.radial_index();
    let mut points = vec![(0.0, x0)];
    let mut t = 0.0f64;
    let mut x = x0;
    let termination = loop {
        if t >= cfg.t_end {
            break Termination::MaxTime;
        }
        let remaining = cfg.t_end - t;
        let step = cfg.h.min(remaining);
        if t + step == t {
            break Termination::StepUnderflow;
        }
        let next = rk4_step(field, x, sign * step);
        let outside = next.iter().any(|v| !v.is_finite() || v.abs() > cfg.bound)
            || radial.is_some_and(|i| next[i] < 0.0);
        if outside {
            break Termination::LeftDomain;
        }
        t = if step == remaining { cfg.t_end } else { t + step };
        x = next;
        points.push((t, x));
    };
    Ok(Trajectory {
        frame,
        direction: cfg.direction,
        initial: x0,
        h: cfg.h,
        termination,
        points,
    })
}

/// Polyline with velocities, interpolated by cubic Hermite segments.
#[derive(Clone, Debug)]
pub struct DenseCurve {
    t: Vec<f64>,
    p: Vec<[f64; 2]>,
    d: Vec<[f64; 2]>,
}

impl DenseCurve {
    /// `d[i]` is the velocity at `p[i]` with respect to `t`.
    pub fn new(t: Vec<f64>, p: Vec<[f64; 2]>, d: Vec<[f64; 2]>) -> Self {
        assert!(t.len() == p.len() && p.len() == d.len() && !p.is_empty());
        DenseCurve { t, p, d }
    }

    /// Trajectory of `field`, with velocities from the field itself.
    pub fn from_trajectory(tr: &Trajectory, field: &dyn PlanarField) -> Self {
        let s = tr.direction.sign();
        let t = tr.points.iter().map(|p| p.0).collect();
        let p: Vec<[f64; 2]> = tr.points.iter().map(|p| p.1).collect();
        let d = p
            .iter()
            .map(|&x| {
                let v = field.eval(x);
                [s * v[0], s * v[1]]
            })
            .collect();
        DenseCurve::new(t, p, d)
    }

    pub fn segments(&self) -> usize {
        self.p.len() - 1
    }

    fn seg(&self, i: usize) -> ([f64; 2], [f64; 2], [f64; 2], [f64; 2]) {
        let dt = self.t[i + 1] - self.t[i];
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        (self.p[i], [dt * d0[0], dt * d0[1]], self.p[i + 1], [dt * d1[0], dt * d1[1]])
    }

    /// Hermite point and its first two derivatives at `s` in `[0, 1]`.
    fn hermite(&self, i: usize, s: f64) -> [[f64; 2]; 3] {
        let (p0, m0, p1, m1) = self.seg(i);
        let (s2, s3) = (s * s, s * s * s);
        let h = [2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2];
        let dh = [6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s];
        let ddh = [12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0];
        let comb = |w: [f64; 4]| {
            [
                w[0] * p0[0] + w[1] * m0[0] + w[2] * p1[0] + w[3] * m1[0],
                w[0] * p0[1] + w[1] * m0[1] + w[2] * p1[1] + w[3] * m1[1],
            ]
        };
        [comb(h), comb(dh), comb(ddh)]
    }

    fn chord(&self, i: usize) -> f64 {
        dist(self.p[i], self.p[i + 1])
    }

    /// Total chord length.
    pub fn length(&self) -> f64 {
        (0..self.segments()).map(|i| self.chord(i)).sum()
    }

    /// Points spaced about `spacing` apart along the curve, up to arc length `limit`.
    pub fn resample(&self, spacing: f64, limit: f64) -> Vec<[f64; 2]> {
        let mut out = vec![self.p[0]];
        let mut arc = 0.0;
        for i in 0..self.segments() {
            let len = self.chord(i);
            let n = ((len / spacing).ceil() as usize).max(1);
            for j in 1..=n {
                let a = arc + len * j as f64 / n as f64;
                if a > limit {
                    return out;
                }
                out.push(self.hermite(i, j as f64 / n as f64)[0]);
            }
            arc += len;
        }
        out
    }

    /// Distance from `q` to segment `i` of the Hermite interpolant.
    fn segment_distance(&self, i: usize, q: [f64; 2]) -> f64 {
        let (p0, _, p1, _) = self.seg(i);
        let e = [p1[0] - p0[0], p1[1] - p0[1]];
        let ee = e[0] * e[0] + e[1] * e[1];
        let mut s = if ee > 0.0 {
            (((q[0] - p0[0]) * e[0] + (q[1] - p0[1]) * e[1]) / ee).clamp(0.0, 1.0)
        } else {
            0.0
        };
        for _ in 0..8 {
            let [h, dh, ddh] = self.hermite(i, s);
            let r = [h[0] - q[0], h[1] - q[1]];
            let g = r[0] * dh[0] + r[1] * dh[1];
            let gp = dh[0] * dh[0] + dh[1] * dh[1] + r[0] * ddh[0] + r[1] * ddh[1];
            if gp <= 0.0 {
                break;
            }
            let next = (s - g / gp).clamp(0.0, 1.0);
            if next == s {
                break;
            }
            s = next;
        }
        let best = dist(self.hermite(i, s)[0], q);
        best.min(dist(p0, q)).min(dist(p1, q))
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Segments examined past the current best match.
const SCAN_WINDOW: usize = 64;

/// One-sided Hausdorff distance from `query` to `reference` over their
/// common arc length.
pub fn hausdorff_one_sided(query: &DenseCurve, reference: &DenseCurve) -> f64 {
    let limit = query.length().min(reference.length());
    let samples = query.resample(RESAMPLE_SPACING, limit);
    if reference.segments() == 0 {
        return samples
            .iter()
            .map(|&q| dist(q, reference.p[0]))
            .fold(0.0, f64::max);
    }
    let mut j = 0usize;
    let mut worst = 0.0f64;
    for q in samples {
        let mut best = f64::INFINITY;
        let mut best_k = j;
        let start = j.saturating_sub(2);
        for k in start..reference.segments() {
            if k > best_k + SCAN_WINDOW {
                break;
            }
            let len = reference.chord(k);
            let lower = dist(q, reference.p[k]) - 2.0 * len;
            if lower > best {
                continue;
            }
            let d = reference.segment_distance(k, q);
            if d < best {
                best = d;
                best_k = k;
            }
        }
        j = best_k;
        worst = worst.max(best);
    }
    worst
}

/// Settings for [`conjugacy_check`].
#[derive(Clone, Copy, Debug)]
pub struct ConjugacyOptions {
    pub h: f64,
    /// Integration time in the chart.
    pub t_chart: f64,
    /// Bound on the chart coordinates.
    pub chart_bound: f64,
}

impl Default for ConjugacyOptions {
    fn default() -> Self {
        ConjugacyOptions {
            h: 1e-3,
            t_chart: 1.0,
            chart_bound: 2.0,
        }
    }
}

/// Integrates the desingularized chart field from `x0`, maps the orbit
/// through the chart, integrates `f` from the image of `x0`, and returns
/// the one-sided Hausdorff distance of the mapped orbit to the direct one.
pub fn conjugacy_check(
    f: &VectorField,
    cf: &ChartField,
    x0: [f64; 2],
    bindings: &Bindings,
    opts: &ConjugacyOptions,
) -> Result<f64> {
    if x0[0].is_nan() || x0[0] <= 0.0 {
        return Err(DesingError::Precondition(format!(
            "seed {x0:?} must have positive radial coordinate"
        )));
    }
    let chart_field = PolyField::chart_desing(cf, bindings)?;
    let orig = PolyField::original(f, bindings)?;
    let frame = Frame::Chart { chart: cf.chart() };
    let cfg = Integrator::new(opts.h, opts.t_chart).bounded(opts.chart_bound);
    let tr = integrate_with(&chart_field, frame, x0, &cfg)?;
    let k = cf.weights().k as i32;
    let mut mapped = Vec::with_capacity(tr.points.len());
    let mut vel = Vec::with_capacity(tr.points.len());
    let mut times = Vec::with_capacity(tr.points.len());
    for &(t, p) in &tr.points {
        let j = cf.chart_map_jacobian(p);
        let v = chart_field.eval(p);
        mapped.push(cf.chart_map(p));
        vel.push([j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]]);
        times.push(t);
    }
    // d(t_original) = r^(-k) d(t_chart)
    let mut t_orig = 0.0;
    for w in tr.points.windows(2) {
        let (t0, p0) = w[0];
        let (t1, p1) = w[1];
        t_orig += 0.5 * (t1 - t0) * (p0[0].powi(-k) + p1[0].powi(-k));
    }
    let reference = integrate(&orig, Frame::Original, mapped[0], 1.05 * t_orig + 10.0 * opts.h, opts.h)?;
    let query = DenseCurve::new(times, mapped, vel);
    let reference = DenseCurve::from_trajectory(&reference, &orig);
    Ok(hausdorff_one_sided(&query, &reference))
}

/// Outcome of [`rescaling_check`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RescalingDefect {
    pub max_angle: f64,
    pub max_ratio_error: f64,
    pub checked: usize,
    pub skipped: usize,
}

/// At each point with `r > 0`, the raw and desingularized chart vectors
/// must be positively parallel with length ratio `r^k`.
pub fn rescaling_check(
    cf: &ChartField,
    bindings: &Bindings,
    points: &[[f64; 2]],
) -> Result<RescalingDefect> {
    let raw = PolyField::chart_raw(cf, bindings)?;
    let des = PolyField::chart_desing(cf, bindings)?;
    let k = cf.weights().k as i32;
    let mut out = RescalingDefect::default();
    for &p in points {
        if p[0].is_nan() || p[0] <= 0.0 {
            return Err(DesingError::Precondition(format!(
                "sample {p:?} must have positive radial coordinate"
            )));
        }
        let a = raw.eval(p);
        let b = des.eval(p);
        let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
        if nb == 0.0 || na == 0.0 {
            out.skipped += 1;
            continue;
        }
        let cross = a[0] * b[1] - a[1] * b[0];
        let dot = a[0] * b[0] + a[1] * b[1];
        let angle = cross.abs().atan2(dot);
        let want = p[0].powi(k);
        out.max_angle = out.max_angle.max(angle);
        out.max_ratio_error = out.max_ratio_error.max(((na / nb) - want).abs() / want);
        out.checked += 1;
    }
    Ok(out)
}

/// Rectangular grid of seeds, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub nu: usize,
    pub nv: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl Grid {
    pub fn seeds(&self) -> Vec<[f64; 2]> {
        let vs = linspace(self.v.0, self.v.1, self.nv);
        linspace(self.u.0, self.u.1, self.nu)
            .into_iter()
            .flat_map(|u| vs.iter().map(move |&v| [u, v]))
            .collect()
    }
}

/// Forward and backward orbits from every grid seed (seeds where the field
/// is not finite are skipped).
pub fn sample_portrait(
    field: &dyn PlanarField,
    frame: Frame,
    grid: &Grid,
    t_end: f64,
    h: f64,
) -> Vec<Trajectory> {
    grid.seeds()
        .par_iter()
        .flat_map_iter(|&seed| {
            let fwd = Integrator::new(h, t_end);
            let bwd = fwd.backward();
            [fwd, bwd]
                .into_iter()
                .filter_map(move |cfg| integrate_with(field, frame, seed, &cfg).ok())
        })
        .collect()
}

/// Observed convergence order from endpoints at steps `h`, `h/2`, `h/4`.
pub fn observed_order(
    field: &dyn PlanarField,
    frame: Frame,
    x0: [f64; 2],
    t_end: f64,
    h: f64,
) -> Result<f64> {
    let ends: Vec<[f64; 2]> = [h, h / 2.0, h / 4.0]
        .iter()
        .map(|&s| {
            let tr = integrate(field, frame, x0, t_end, s)?;
            if tr.termination != Termination::MaxTime {
                return Err(DesingError::Precondition(format!(
                    "orbit from {x0:?} ended early ({:?})",
                    tr.termination
                )));
            }
            Ok(tr.last())
        })
        .collect::<Result<_>>()?;
    let e1 = dist(ends[0], ends[1]);
    let e2 = dist(ends[1], ends[2]);
    Ok((e1 / e2).log2())
}

/// Central-difference Jacobian with one Richardson extrapolation step.
pub fn fd_jacobian(field: &dyn PlanarField, p: [f64; 2], h: f64) -> [[f64; 2]; 2] {
    let central = |j: usize, h: f64| {
        let mut a = p;
        let mut b = p;
        a[j] += h;
        b[j] -= h;
        let (fa, fb) = (field.eval(a), field.eval(b));
        [(fa[0] - fb[0]) / (2.0 * h), (fa[1] - fb[1]) / (2.0 * h)]
    };
    let mut out = [[0.0; 2]; 2];
    for j in 0..2 {
        let (d1, d2) = (central(j, h), central(j, h / 2.0));
        for (i, row) in out.iter_mut().enumerate() {
            row[j] = (4.0 * d2[i] - d1[i]) / 3.0;
        }
    }
    out
}

fn rel(a: [f64; 2], b: [f64; 2]) -> f64 {
    let scale = a[0].hypot(a[1]).max(b[0].hypot(b[1])).max(f64::MIN_POSITIVE);
    dist(a, b) / scale
}

/// Relative defect of `D(T) * desing_from(p) = lambda * desing_to(T(p))`
/// with `lambda = (R/r)^k`, using a finite-difference `D(T)`. Works for any
/// weights.
pub fn transition_defect_numeric(
    from: &ChartField,
    to: &ChartField,
    w: &Weights,
    bindings: &Bindings,
    p: [f64; 2],
) -> Result<f64> {
    let q = transition(p, from.chart(), to.chart(), w)?;
    let ff = PolyField::chart_desing(from, bindings)?;
    let ft = PolyField::chart_desing(to, bindings)?;
    let (fc, tc) = (from.chart(), to.chart());
    let map = move |x: [f64; 2]| transition(x, fc, tc, w).unwrap_or([f64::NAN; 2]);
    let dt = fd_jacobian(&map, p, 1e-4 * p[0].abs().max(p[1].abs()).max(1e-3));
    let v = ff.eval(p);
    let a = [dt[0][0] * v[0] + dt[0][1] * v[1], dt[1][0] * v[0] + dt[1][1] * v[1]];
    let lambda = (q[0] / p[0]).powi(w.k as i32);
    let b = ft.eval(q);
    Ok(rel(a, [lambda * b[0], lambda * b[1]]))
}

/// Relative defect of `D(beta1) * h(phi, rho) = f1(beta1(phi, rho))` for the
/// raw `H_x` polar field `h` and the raw `K1` chart field `f1`.
pub fn bridge_beta1_defect(
    hx: &PolarField,
    k1: &ChartField,
    bindings: &Bindings,
    phi: f64,
    rho: f64,
) -> Result<f64> {
    let h = PolarNumField::new(hx, bindings)?;
    let f1 = if hx.is_desingularized() {
        PolyField::chart_desing(k1, bindings)?
    } else {
        PolyField::chart_raw(k1, bindings)?
    };
    let v = h.eval([phi, rho]);
    let j = bridge_beta1_jacobian(phi, rho);
    let a = [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]];
    let mut b = f1.eval(bridge_beta1(phi, rho)?);
    if hx.is_desingularized() {
        // h/rho versus f1/r1 with r1 = rho cosh(phi)
        b = [b[0] * phi.cosh(), b[1] * phi.cosh()];
    }
    Ok(rel(a, b))
}

/// Inverse of the polar embedding, `(x, y) -> (angle, radius)`.
pub fn polar_inverse(model: PolarModel, z: [f64; 2]) -> [f64; 2] {
    let [x, y] = z;
    match model {
        PolarModel::Sphere => [y.atan2(x), x.hypot(y)],
        PolarModel::HyperbolicX => [(y / x).atanh(), (x * x - y * y).sqrt()],
        PolarModel::HyperbolicY => [(x / y).atanh(), (y * y - x * x).sqrt()],
    }
}

/// Relative defect between the polar field at `(angle, radius)` and the
/// central difference of the inverse embedding along the orbit of `f`
/// through the corresponding point.
pub fn polar_orbit_defect(
    f: &VectorField,
    pf: &PolarField,
    bindings: &Bindings,
    angle: f64,
    radius: f64,
) -> Result<f64> {
    let orig = PolyField::original(f, bindings)?;
    let polar = PolarNumField::new(pf, bindings)?;
    let z0 = pf.model().embed(angle, radius);
    let model = pf.model();
    let along = |dt: f64| {
        let z = rk4_step(&orig, z0, dt);
        let mut a = polar_inverse(model, z);
        // keep the angle on the branch of the seed
        if model == PolarModel::Sphere {
            let tau = std::f64::consts::TAU;
            a[0] -= ((a[0] - angle) / tau).round() * tau;
        }
        a
    };
    let central = |d: f64| {
        let (a, b) = (along(d), along(-d));
        [(a[0] - b[0]) / (2.0 * d), (a[1] - b[1]) / (2.0 * d)]
    };
    let v0 = orig.eval(z0);
    // step scaled to the local time scale |z| / |f(z)|
    let scale = (z0[0].hypot(z0[1]) / v0[0].hypot(v0[1])).min(1.0);
    let d = 1e-4 * if scale.is_finite() { scale } else { 1.0 };
    let (c1, c2) = (central(d), central(d / 2.0));
    let fd = [(4.0 * c2[0] - c1[0]) / 3.0, (4.0 * c2[1] - c1[1]) / 3.0];
    let v = polar.eval([angle, radius]);
    Ok(rel(fd, v))
}

/// Parameter bindings from `(name, value)` pairs of `f64`-exact rationals.
pub fn bindings_map(pairs: &[(&str, exactalg::Rat)]) -> BTreeMap<String, exactalg::Rat> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::blow_up_in_chart;
    use crate::polar::{desingularize_polar, polar_pushforward};
    use crate::textfront::parse_field;
    use exactalg::rat;

    fn reference_system() -> VectorField {
        parse_field("param a > 0; var x y; dx/dt = a*x^2 - 2*x*y; dy/dt = y^2 - a*x*y;").unwrap()
    }

    fn a1() -> Bindings {
        reference_system().bind(&bindings_map(&[("a", rat(1, 1))])).unwrap()
    }

    #[test]
    fn zero_field_is_constant() {
        let z = |_: [f64; 2]| [0.0, 0.0];
        let tr = integrate(&z, Frame::Original, [0.3, -2.0], 1.0, 0.1).unwrap();
        assert!(tr.points.iter().all(|p| p.1 == [0.3, -2.0]));
        assert_eq!(tr.termination, Termination::MaxTime);
        assert_eq!(tr.end_time(), 1.0);
    }

    #[test]
    fn linear_field_matches_exponentials() {
        let lin = |p: [f64; 2]| [p[0], -p[1]];
        let tr = integrate(&lin, Frame::Original, [1.0, 1.0], 1.0, 1e-3).unwrap();
        let e = tr.last();
        assert!((e[0] - 1f64.exp()).abs() < 1e-6);
        assert!((e[1] - (-1f64).exp()).abs() < 1e-6);
        let times: Vec<f64> = tr.points.iter().map(|p| p.0).collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn backward_time_runs_the_flow_in_reverse() {
        let lin = |p: [f64; 2]| [p[0], -p[1]];
        let cfg = Integrator::new(1e-3, 1.0).backward();
        let tr = integrate_with(&lin, Frame::Original, [1.0, 1.0], &cfg).unwrap();
        let e = tr.last();
        assert!((e[0] - (-1f64).exp()).abs() < 1e-6 && (e[1] - 1f64.exp()).abs() < 1e-6);
        assert_eq!(tr.end_time(), 1.0);
    }

    #[test]
    fn blow_up_in_finite_time_leaves_domain() {
        let q = |p: [f64; 2]| [p[0] * p[0], 0.0];
        let tr = integrate(&q, Frame::Original, [1.0, 0.0], 2.0, 1e-3).unwrap();
        assert_eq!(tr.termination, Termination::LeftDomain);
        assert!(tr.end_time() < 1.01);
    }

    #[test]
    fn non_finite_seed() {
        let bad = |p: [f64; 2]| [1.0 / p[0], 0.0];
        assert_eq!(
            integrate(&bad, Frame::Original, [0.0, 0.0], 1.0, 0.1),
            Err(DesingError::NonFiniteField([0.0, 0.0]))
        );
    }

    #[test]
    fn step_halving_oracle_on_the_reference_field() {
        let f = PolyField::original(&reference_system(), &a1()).unwrap();
        let a = integrate(&f, Frame::Original, [0.1, 0.2], 1.0, 1e-3).unwrap().last();
        let b = integrate(&f, Frame::Original, [0.1, 0.2], 1.0, 5e-4).unwrap().last();
        assert!(rel(a, b) < 1e-6);
        let p = observed_order(&f, Frame::Original, [0.3, 0.4], 2.0, 1e-2).unwrap();
        assert!((3.5..=4.5).contains(&p), "order {p}");
    }

    #[test]
    fn divisor_is_invariant() {
        let cf = blow_up_in_chart(&reference_system(), &Weights::new(1, 1, 1), ChartId::K1).unwrap();
        let g = PolyField::chart_desing(&cf, &a1()).unwrap();
        let tr = integrate(&g, Frame::Chart { chart: ChartId::K1 }, [0.0, 0.5], 2.0, 1e-3).unwrap();
        assert!(tr.points.iter().all(|p| p.1[0].abs() < 1e-12));
    }

    #[test]
    fn rescaling_on_chart_one() {
        let cf = blow_up_in_chart(&reference_system(), &Weights::new(1, 1, 1), ChartId::K1).unwrap();
        let d = rescaling_check(&cf, &a1(), &[[0.5, 1.0], [0.25, -0.3]]).unwrap();
        assert_eq!(d.checked, 2);
        assert!(d.max_angle < 1e-10 && d.max_ratio_error < 1e-10);
        let d = rescaling_check(&cf, &a1(), &[[0.5, 0.0]]).unwrap();
        assert_eq!(d.checked, 1);
        let z = parse_field("var x y; dx/dt = 0; dy/dt = 0;").unwrap();
        let zc = blow_up_in_chart(&z, &Weights::new(1, 1, 0), ChartId::K1).unwrap();
        let d = rescaling_check(&zc, &Bindings::default(), &[[0.5, 0.5]]).unwrap();
        assert_eq!(d.skipped, 1);
    }

    #[test]
    fn conjugacy_on_chart_one() {
        let f = reference_system();
        let cf = blow_up_in_chart(&f, &Weights::new(1, 1, 1), ChartId::K1).unwrap();
        let d = conjugacy_check(&f, &cf, [0.3, 0.4], &a1(), &ConjugacyOptions::default()).unwrap();
        assert!(d < 1e-6, "defect {d}");
        assert!(matches!(
            conjugacy_check(&f, &cf, [0.0, 0.4], &a1(), &ConjugacyOptions::default()),
            Err(DesingError::Precondition(_))
        ));
        let z = parse_field("var x y; dx/dt = 0; dy/dt = 0;").unwrap();
        let zc = blow_up_in_chart(&z, &Weights::new(1, 1, 0), ChartId::K1).unwrap();
        let d = conjugacy_check(&z, &zc, [0.3, 0.4], &Bindings::default(), &ConjugacyOptions::default())
            .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn portrait_counts() {
        let cf = blow_up_in_chart(&reference_system(), &Weights::new(1, 1, 1), ChartId::K1).unwrap();
        let g = PolyField::chart_desing(&cf, &a1()).unwrap();
        let frame = Frame::Chart { chart: ChartId::K1 };
        let grid = Grid {
            u: (0.0, 1.0),
            v: (-1.0, 1.0),
            nu: 5,
            nv: 5,
        };
        let trs = sample_portrait(&g, frame, &grid, 1.0, 1e-2);
        assert_eq!(trs.len(), 50);
        for tr in trs.iter().filter(|t| t.initial[0] == 0.0) {
            assert!(tr.points.iter().all(|p| p.1[0] == 0.0));
        }
        let empty = Grid { nu: 0, ..grid };
        assert!(sample_portrait(&g, frame, &empty, 1.0, 1e-2).is_empty());
    }

    #[test]
    fn fd_jacobian_of_a_quadratic() {
        let q = |p: [f64; 2]| [p[0] * p[0] - 2.0 * p[0] * p[1], p[1] * p[1]];
        let j = fd_jacobian(&q, [0.5, 0.25], 1e-3);
        let want = [[0.5, -1.0], [0.0, 0.5]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[i][k] - want[i][k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn polar_fields_agree_with_orbits() {
        let f = reference_system();
        for m in PolarModel::ALL {
            let pf = polar_pushforward(&f, m).unwrap();
            for (angle, r) in [(0.3, 0.7), (-0.4, 0.2), (1.1, 0.5)] {
                let d = polar_orbit_defect(&f, &pf, &a1(), angle, r).unwrap();
                assert!(d < 1e-9, "{m} at ({angle}, {r}): {d}");
            }
        }
    }

    #[test]
    fn beta1_bridge() {
        let f = reference_system();
        let w = Weights::new(1, 1, 1);
        let k1 = blow_up_in_chart(&f, &w, ChartId::K1).unwrap();
        let hx = polar_pushforward(&f, PolarModel::HyperbolicX).unwrap();
        let d = bridge_beta1_defect(&hx, &k1, &a1(), 0.4, 0.6).unwrap();
        assert!(d < 1e-12, "{d}");
        let hd = desingularize_polar(&hx).unwrap();
        let d = bridge_beta1_defect(&hd, &k1, &a1(), -0.7, 0.3).unwrap();
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn weighted_transitions_rescale() {
        let f = parse_field("var x y; dx/dt = x^2 - y; dy/dt = x*y;").unwrap();
        let w = Weights::new(1, 2, 1);
        for (a, b) in crate::charts::adjacent_pairs() {
            let ca = blow_up_in_chart(&f, &w, a).unwrap();
            let cb = blow_up_in_chart(&f, &w, b).unwrap();
            let p = [0.6, 0.8 * b.sign() as f64];
            let d = transition_defect_numeric(&ca, &cb, &w, &Bindings::default(), p).unwrap();
            assert!(d < 1e-8, "{a}->{b}: {d}");
        }
    }
}
