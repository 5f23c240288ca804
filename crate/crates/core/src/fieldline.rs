//! Field-line dynamics: adaptive Dormand–Prince 5(4) integration with dense
//! output, first-integral drift measurement, Poincaré sections and
//! rotation-number classification on invariant tori.
//!
//! Torus trajectories are integrated in unwrapped coordinates (the fields are
//! periodic) and wrapped only for presentation; winding counters are the
//! integer parts of the unwrapped displacement. Sphere trajectories live in a
//! chart and switch to the antipodal chart when they leave the valid disk.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::linalg::{self, Vec3};
use crate::manifold::{ChartId, ChartPoint, ManifoldModel};

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    /// Local error tolerance (absolute and relative).
    pub tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub min_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { tol: 1e-10, max_step: 0.1, max_steps: 20_000_000, min_step: 1e-13 }
    }
}

impl IntegratorConfig {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorConfig { tol, ..Default::default() }
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// error coefficients b − b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense-output coefficients
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension over one accepted step.
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec3; 5],
}

impl DenseStep {
    /// Evaluate the 4th-order interpolant at t ∈ [t0, t0+h].
    pub fn eval(&self, t: f64) -> Vec3 {
        let theta = (t - self.t0) / self.h;
        let omt = 1.0 - theta;
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + omt
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + omt * self.rcont[4][i])));
        }
        out
    }
}

/// What the per-step observer wants the integrator to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepAction {
    Continue,
    Stop,
}

/// Integrated field line. `points` are unwrapped chart coordinates.
pub struct Trajectory {
    pub model: ManifoldModel,
    pub times: Vec<f64>,
    pub points: Vec<Vec3>,
    pub charts: Vec<ChartId>,
    pub step_errors: Vec<f64>,
    pub chart_switches: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> Vec3 {
        self.points[0]
    }

    pub fn endpoint(&self) -> Vec3 {
        *self.points.last().expect("nonempty trajectory")
    }

    /// Unwrapped displacement endpoint − start (torus).
    pub fn displacement(&self) -> Vec3 {
        linalg::sub(self.endpoint(), self.start())
    }

    /// Winding counters at sample i: signed integer crossings per axis.
    pub fn windings_at(&self, i: usize) -> [i64; 3] {
        let p = self.points[i];
        let p0 = self.points[0];
        [
            p[0].floor() as i64 - p0[0].floor() as i64,
            p[1].floor() as i64 - p0[1].floor() as i64,
            p[2].floor() as i64 - p0[2].floor() as i64,
        ]
    }

    pub fn wrapped_point(&self, i: usize) -> Vec3 {
        self.model.wrap(self.points[i])
    }

    pub fn chart_point(&self, i: usize) -> ChartPoint {
        ChartPoint { chart: self.charts[i], coords: self.points[i] }
    }
}

/// Integrate ẋ = X(x) from `start` to flow parameter `t_end`.
pub fn integrate(
    model: &ManifoldModel,
    field: &VectorField,
    start: ChartPoint,
    t_end: f64,
    cfg: IntegratorConfig,
) -> Result<Trajectory> {
    integrate_with(model, field, start, t_end, cfg, |_, _| StepAction::Continue)
}

/// Integrate with a per-accepted-step observer receiving the dense output
/// (pre-chart-switch coordinates) and the step endpoint.
pub fn integrate_with(
    model: &ManifoldModel,
    field: &VectorField,
    start: ChartPoint,
    t_end: f64,
    cfg: IntegratorConfig,
    mut on_step: impl FnMut(&DenseStep, Vec3) -> StepAction,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument("t_end must be positive and finite".into()));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let eval = |chart: ChartId, y: Vec3| field.value(&ChartPoint { chart, coords: y });

    let mut traj = Trajectory {
        model: model.clone(),
        times: vec![0.0],
        points: vec![start.coords],
        charts: vec![start.chart],
        step_errors: vec![0.0],
        chart_switches: 0,
    };

    let mut t = 0.0;
    let mut y = start.coords;
    let mut chart = start.chart;
    let mut k1 = eval(chart, y);
    let speed0 = linalg::norm(k1);
    let mut max_speed = speed0;
    let mut h = (cfg.max_step).min(0.01 / (speed0 + 1e-9)).max(cfg.min_step * 10.0);
    let mut steps = 0usize;

    while t < t_end {
        if steps >= cfg.max_steps {
            // a parked orbit (tiny field, negligible progress) is a genuine
            // field zero, not an operational failure
            let speed = linalg::norm(eval(chart, y));
            if speed < 1e-3 * (1.0 + max_speed) {
                return Err(Error::StalledAtZero { t, location: model.wrap(y) });
            }
            return Err(Error::InvalidArgument(format!(
                "integration exceeded the step budget ({} steps) at t = {t:.6}",
                cfg.max_steps
            )));
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let add3 = |y: Vec3, terms: &[(f64, Vec3)]| {
            let mut out = y;
            for &(c, v) in terms {
                for i in 0..3 {
                    out[i] += h * c * v[i];
                }
            }
            out
        };

        let k2 = eval(chart, add3(y, &[(A21, k1)]));
        let k3 = eval(chart, add3(y, &[(A31, k1), (A32, k2)]));
        let k4 = eval(chart, add3(y, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = eval(chart, add3(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = eval(
            chart,
            add3(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
        );
        let y1 = add3(y, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
        let k7 = eval(chart, y1);

        // local error per unit step (the h in the estimate cancels)
        let mut err_sq = 0.0;
        for i in 0..3 {
            let e = E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i];
            let sc = cfg.tol + cfg.tol * y[i].abs().max(y1[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / 3.0).sqrt();

        // winding-counter contract: no coordinate may move ≥ 0.45 per step
        let jump = linalg::norm_inf(linalg::sub(y1, y));
        if err <= 1.0 && jump < 0.45 {
            let ydiff = linalg::sub(y1, y);
            let bspl = linalg::sub(linalg::scale(k1, h), ydiff);
            let rcont4 = linalg::sub(linalg::sub(ydiff, linalg::scale(k7, h)), bspl);
            let mut rcont5 = [0.0; 3];
            for i in 0..3 {
                rcont5[i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let dense = DenseStep { t0: t, h, rcont: [y, ydiff, bspl, rcont4, rcont5] };

            // snap the final step to t_end so rounding cannot leave a
            // sub-min_step remainder behind
            t = if last { t_end } else { t + h };
            y = y1;
            k1 = k7; // FSAL

            traj.times.push(t);
            traj.points.push(y);
            traj.charts.push(chart);
            traj.step_errors.push(err);

            let action = on_step(&dense, y1);

            let probe = ChartPoint { chart, coords: y };
            if model.needs_chart_switch(&probe) {
                let switched = model.switch_chart(&probe)?;
                y = switched.coords;
                chart = switched.chart;
                k1 = eval(chart, y);
                traj.chart_switches += 1;
                // record the post-switch state so samples stay chart-consistent
                traj.times.push(t);
                traj.points.push(y);
                traj.charts.push(chart);
                traj.step_errors.push(0.0);
            }

            if last || action == StepAction::Stop {
                break;
            }

            let factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.25)).clamp(0.2, 10.0) };
            h = (h * factor).min(cfg.max_step);
        } else {
            let factor = if err > 1.0 { (0.9 * err.powf(-0.25)).clamp(0.2, 0.9) } else { 0.5 };
            h *= factor;
        }

        if h < cfg.min_step {
            let speed = linalg::norm(eval(chart, y));
            if speed < 1e-3 * (1.0 + max_speed) {
                return Err(Error::StalledAtZero { t, location: model.wrap(y) });
            }
            return Err(Error::InvalidArgument(format!(
                "step size underflow at t = {t:.6e} (local error will not settle)"
            )));
        }
        max_speed = max_speed.max(linalg::norm(k1));
    }
    Ok(traj)
}

/// max_t |f(x(t)) − f(x(0))| over the trajectory's samples.
pub fn first_integral_drift(traj: &Trajectory, f: &ScalarField) -> f64 {
    let f0 = f.value(&traj.chart_point(0));
    (0..traj.len())
        .map(|i| (f.value(&traj.chart_point(i)) - f0).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Poincaré sections (torus coordinate planes)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    Positive,
    Negative,
    /// Record transversal crossings of either sign.
    Both,
}

#[derive(Debug, Clone, Copy)]
pub struct SectionSpec {
    /// Coordinate axis of the section plane (0, 1 or 2).
    pub axis: usize,
    /// Section value in [0, 1).
    pub value: f64,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone)]
pub struct Crossing {
    pub t: f64,
    /// Wrapped crossing point.
    pub point: Vec3,
    pub f_value: Option<f64>,
    /// |coordinate − section value| achieved by the root finder.
    pub section_residual: f64,
}

#[derive(Debug, Clone)]
pub struct PoincareRecord {
    pub seed: Vec3,
    pub crossings: Vec<Crossing>,
    pub skipped_nontransversal: usize,
}

/// Collect up to `n_crossings` directed crossings of the section per seed.
/// Crossing points are located on the dense output by bisection; transversality
/// below 1e−8 skips the crossing and counts it in the diagnostics field.
pub fn poincare(
    model: &ManifoldModel,
    field: &VectorField,
    section: SectionSpec,
    seeds: &[Vec3],
    n_crossings: usize,
    cfg: IntegratorConfig,
    f: Option<&ScalarField>,
    t_max: f64,
) -> Result<Vec<PoincareRecord>> {
    if !model.is_torus() {
        return Err(Error::InvalidArgument("Poincaré sections are defined on the torus".into()));
    }
    if section.axis > 2 {
        return Err(Error::InvalidArgument("section axis must be 0, 1 or 2".into()));
    }
    let mut records = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut crossings: Vec<Crossing> = Vec::with_capacity(n_crossings);
        let mut skipped = 0usize;
        {
            let on_step = |dense: &DenseStep, _y1: Vec3| {
                let w0 = dense.eval(dense.t0)[section.axis];
                let w1 = dense.eval(dense.t0 + dense.h)[section.axis];
                let (lo, hi) = if w0 <= w1 { (w0, w1) } else { (w1, w0) };
                // integer-shifted section levels crossed within the step
                let first = (lo - section.value).ceil() as i64;
                let last = (hi - section.value).floor() as i64;
                for n in first..=last {
                    let level = section.value + n as f64;
                    if level <= lo || level > hi {
                        continue;
                    }
                    // bisection on the dense output
                    let mut ta = dense.t0;
                    let mut tb = dense.t0 + dense.h;
                    let ga = dense.eval(ta)[section.axis] - level;
                    if ga == 0.0 {
                        continue;
                    }
                    for _ in 0..80 {
                        let tm = 0.5 * (ta + tb);
                        let gm = dense.eval(tm)[section.axis] - level;
                        if (gm > 0.0) == (ga > 0.0) {
                            ta = tm;
                        } else {
                            tb = tm;
                        }
                    }
                    let t_star = 0.5 * (ta + tb);
                    let point_unwrapped = dense.eval(t_star);
                    let residual = (point_unwrapped[section.axis] - level).abs();
                    let velocity = field.value(&ChartPoint::main(point_unwrapped));
                    let vn = velocity[section.axis];
                    if vn.abs() <= 1e-8 {
                        skipped += 1;
                        continue;
                    }
                    let dir_ok = match section.direction {
                        CrossingDirection::Positive => vn > 0.0,
                        CrossingDirection::Negative => vn < 0.0,
                        CrossingDirection::Both => true,
                    };
                    if !dir_ok {
                        continue;
                    }
                    let wrapped = model.wrap(point_unwrapped);
                    let f_value = f.map(|ff| ff.value(&ChartPoint::main(point_unwrapped)));
                    crossings.push(Crossing { t: t_star, point: wrapped, f_value, section_residual: residual });
                    if crossings.len() >= n_crossings {
                        return StepAction::Stop;
                    }
                }
                StepAction::Continue
            };
            integrate_with(model, field, ChartPoint::main(seed), t_max, cfg, on_step)?;
        }
        records.push(PoincareRecord { seed, crossings, skipped_nontransversal: skipped });
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// rotation numbers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationVerdict {
    ClosedWithinTolerance,
    IrrationalLike,
    Undetermined,
}

/// Rotation-number estimate with the classification thresholds it was judged
/// against (so downstream consumers can re-judge).
#[derive(Debug, Clone)]
pub struct RotationEstimate {
    pub verdict: RotationVerdict,
    /// Winding ratio Δu_a/Δu_b of the two winding axes (a < b).
    pub ratio: f64,
    /// Reported uncertainty ~ base window 10/T.
    pub uncertainty: f64,
    /// Matched rational (p, q) when the verdict is closed.
    pub rational: Option<(i64, i64)>,
    pub axes: [usize; 2],
    /// Windings of the slower axis, T.
    pub windings: f64,
    pub q_max: i64,
    /// Base acceptance window 10/T; a rational p/q must match within
    /// 10/(T·q²), the precision a q-periodic orbit delivers after T windings.
    pub window_base: f64,
}

const Q_MAX: i64 = 50;

/// Continued-fraction convergents of x (positive), stopping at q > q_max.
fn convergents(x: f64, q_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if !(a.is_finite()) || a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let p2 = ai.saturating_mul(p0).saturating_add(p1);
        let q2 = ai.saturating_mul(q0).saturating_add(q1);
        if q2 > q_max || q2 <= 0 {
            break;
        }
        out.push((p2, q2));
        p1 = p0;
        q1 = q0;
        p0 = p2;
        q0 = q2;
        let rem = frac - a;
        if rem.abs() < 1e-14 {
            break;
        }
        frac = 1.0 / rem;
    }
    out
}

/// Classify the winding ratio of a trajectory confined to an invariant torus.
pub fn rotation_number(traj: &Trajectory) -> RotationEstimate {
    let u = traj.displacement();
    let mut axes: Vec<usize> = (0..3).filter(|&i| u[i].abs() >= 1.0).collect();
    axes.sort_by(|&a, &b| u[b].abs().partial_cmp(&u[a].abs()).unwrap().then(a.cmp(&b)));
    if axes.len() < 2 {
        return RotationEstimate {
            verdict: RotationVerdict::Undetermined,
            ratio: f64::NAN,
            uncertainty: f64::INFINITY,
            rational: None,
            axes: [usize::MAX; 2],
            windings: 0.0,
            q_max: Q_MAX,
            window_base: f64::INFINITY,
        };
    }
    let mut pair = [axes[0], axes[1]];
    pair.sort();
    let [a, b] = pair;
    let ratio = u[a] / u[b];
    let t_windings = u[a].abs().min(u[b].abs()).floor();
    let window_base = 10.0 / t_windings.max(1.0);
    if t_windings < 10.0 {
        return RotationEstimate {
            verdict: RotationVerdict::Undetermined,
            ratio,
            uncertainty: f64::INFINITY,
            rational: None,
            axes: pair,
            windings: t_windings,
            q_max: Q_MAX,
            window_base,
        };
    }
    let sign = if ratio < 0.0 { -1.0 } else { 1.0 };
    let mut matched: Option<(i64, i64)> = None;
    for (p, q) in convergents(ratio.abs(), Q_MAX) {
        let window = 10.0 / (t_windings * (q * q) as f64);
        if (ratio.abs() - p as f64 / q as f64).abs() <= window {
            matched = Some(((sign * p as f64) as i64, q));
            break;
        }
    }
    match matched {
        Some((p, q)) => RotationEstimate {
            verdict: RotationVerdict::ClosedWithinTolerance,
            ratio,
            uncertainty: window_base,
            rational: Some((p, q)),
            axes: pair,
            windings: t_windings,
            q_max: Q_MAX,
            window_base,
        },
        None => RotationEstimate {
            verdict: RotationVerdict::IrrationalLike,
            ratio,
            uncertainty: window_base,
            rational: None,
            axes: pair,
            windings: t_windings,
            q_max: Q_MAX,
            window_base,
        },
    }
}

/// Minimum return distance to the start over samples with t ≥ t_min, and the
/// time it is attained at. Chart-independent on the sphere (ambient ℝ⁴
/// distance), wrapped shortest distance on the torus. The sphere has no
/// winding counters, so closed orbits are detected by this minimum instead.
pub fn min_return_distance(traj: &Trajectory, t_min: f64) -> Option<(f64, f64)> {
    let start = traj.chart_point(0);
    let mut best: Option<(f64, f64)> = None;
    for i in 1..traj.len() {
        if traj.times[i] < t_min {
            continue;
        }
        let p = traj.chart_point(i);
        let d = match &traj.model {
            ManifoldModel::RoundSphere3 => {
                let a = traj.model.embed_sphere(&start);
                let b = traj.model.embed_sphere(&p);
                (0..4).map(|j| (a[j] - b[j]).powi(2)).sum::<f64>().sqrt()
            }
            ManifoldModel::FlatTorus3 { period } => {
                let mut acc = 0.0;
                for j in 0..3 {
                    let raw = (p.coords[j] - start.coords[j]).rem_euclid(period[j]);
                    acc += raw.min(period[j] - raw).powi(2);
                }
                acc.sqrt()
            }
        };
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, traj.times[i]));
        }
    }
    best
}

/// Per-torus aggregation of per-orbit verdicts: Some(verdict) when every
/// estimate on the torus agrees (and, for closed orbits, on the same
/// rational), None when they disagree or none classified.
pub fn verdict_consensus(estimates: &[RotationEstimate]) -> Option<RotationVerdict> {
    let first = estimates.first()?;
    let agree = estimates.iter().all(|e| {
        e.verdict == first.verdict
            && match (e.rational, first.rational) {
                (Some(a), Some(b)) => a == b,
                (None, None) => true,
                _ => false,
            }
    });
    agree.then_some(first.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_get;
    use crate::scalar_eigen::{beltrami_from_scalar, golden_two_half_d_pair};
    use std::f64::consts::{PI, TAU};

    fn torus() -> ManifoldModel {
        ManifoldModel::unit_torus()
    }

    fn golden_field() -> VectorField {
        let entry = catalog_get("t3_e3").unwrap();
        beltrami_from_scalar(&entry, &golden_two_half_d_pair())
            .unwrap()
            .field
            .to_vector_field()
    }

    #[test]
    fn constant_flow_endpoint_and_windings() {
        let e3 = VectorField::constant([0.0, 0.0, 1.0]);
        let traj = integrate(&torus(), &e3, ChartPoint::main([0.0; 3]), 2.5, IntegratorConfig::default()).unwrap();
        let end = traj.endpoint();
        assert!(linalg::norm_inf(linalg::sub(end, [0.0, 0.0, 2.5])) < 1e-12);
        assert!(linalg::norm_inf(linalg::sub(traj.wrapped_point(traj.len() - 1), [0.0, 0.0, 0.5])) < 1e-12);
        assert_eq!(traj.windings_at(traj.len() - 1), [0, 0, 2]);
    }

    #[test]
    fn integration_ends_exactly_at_t_end() {
        // awkward endpoints must neither error on a sub-min_step remainder
        // nor overshoot
        let x = golden_field();
        for &t_end in &[0.1f64 * 3.0, 2.5000000000000004, 1.0 / 3.0, TAU, 17.123456789] {
            for &tol in &[1e-6, 1e-10, 1e-12] {
                let cfg = IntegratorConfig { tol, ..Default::default() };
                let traj = integrate(&torus(), &x, ChartPoint::main([0.2, 0.3, 0.4]), t_end, cfg)
                    .unwrap_or_else(|e| panic!("t_end {t_end} tol {tol}: {e}"));
                assert_eq!(*traj.times.last().unwrap(), t_end);
            }
        }
    }

    #[test]
    fn winding_counters_change_at_most_one_per_step() {
        let traj = integrate(
            &torus(),
            &golden_field(),
            ChartPoint::main([0.2, 0.0, 0.0]),
            20.0,
            IntegratorConfig::default(),
        )
        .unwrap();
        for i in 1..traj.len() {
            let a = traj.windings_at(i - 1);
            let b = traj.windings_at(i);
            for c in 0..3 {
                assert!((b[c] - a[c]).abs() <= 1);
            }
        }
    }

    #[test]
    fn two_half_d_field_keeps_x_constant() {
        let x = golden_field();
        let traj = integrate(&torus(), &x, ChartPoint::main([0.125, 0.0, 0.0]), 50.0, IntegratorConfig::default()).unwrap();
        let drift = traj.points.iter().map(|p| (p[0] - 0.125).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-9, "x drift {drift}");
    }

    #[test]
    fn dense_output_matches_rotation_orbit() {
        // (−y, x, 0): exact circles; check the interpolant mid-step
        let rot = VectorField::new(|p| [-p.coords[1], p.coords[0], 0.0]);
        let mut worst = 0.0f64;
        let cfg = IntegratorConfig { tol: 1e-9, ..Default::default() };
        integrate_with(&torus(), &rot, ChartPoint::main([1.0, 0.0, 0.0]), 3.0, cfg, |dense, _| {
            for frac in [0.25, 0.5, 0.75] {
                let t = dense.t0 + frac * dense.h;
                let v = dense.eval(t);
                let exact = [t.cos(), t.sin(), 0.0];
                worst = worst.max(linalg::norm_inf(linalg::sub(v, exact)));
            }
            StepAction::Continue
        })
        .unwrap();
        assert!(worst < 1e-8, "dense output error {worst}");
    }

    #[test]
    fn hopf_orbit_returns_after_2pi() {
        let entry = catalog_get("s3_hopf").unwrap();
        let start = ChartPoint::main([0.3, -0.1, 0.2]);
        let traj = integrate(&entry.model, &entry.field, start, TAU, IntegratorConfig::default()).unwrap();
        let end = traj.chart_point(traj.len() - 1);
        let a = entry.model.embed_sphere(&start);
        let b = entry.model.embed_sphere(&end);
        let dist = (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        assert!(dist < 1e-6, "return distance {dist}");
        // the return-distance minimum detects the closed orbit and its period
        let longer = integrate(&entry.model, &entry.field, start, 1.2 * TAU, IntegratorConfig::default()).unwrap();
        let (min_d, t_at) = min_return_distance(&longer, 3.0).unwrap();
        // sample resolution bounds both figures (steps are ≤ max_step apart)
        assert!(min_d < 0.06, "min return distance {min_d}");
        assert!((t_at - TAU).abs() < 0.11, "period estimate {t_at}");
    }

    #[test]
    fn hopf_orbit_through_chart_switch() {
        // orbit through the chart origin passes the antipodal chart twice
        let entry = catalog_get("s3_hopf").unwrap();
        let start = ChartPoint::main([0.0, 0.0, 0.0]);
        let traj = integrate(&entry.model, &entry.field, start, TAU, IntegratorConfig::default()).unwrap();
        assert!(traj.chart_switches >= 2, "switches {}", traj.chart_switches);
        let end = traj.chart_point(traj.len() - 1);
        let a = entry.model.embed_sphere(&start);
        let b = entry.model.embed_sphere(&end);
        let dist = (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        assert!(dist < 1e-6, "return distance {dist}");
    }

    #[test]
    fn halving_tol_improves_hopf_return() {
        let entry = catalog_get("s3_hopf").unwrap();
        let start = ChartPoint::main([0.4, 0.1, -0.3]);
        let dist_at = |tol: f64| {
            let traj = integrate(&entry.model, &entry.field, start, TAU, IntegratorConfig::with_tol(tol)).unwrap();
            let end = traj.chart_point(traj.len() - 1);
            let a = entry.model.embed_sphere(&start);
            let b = entry.model.embed_sphere(&end);
            (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
        };
        let coarse = dist_at(1e-8);
        let fine = dist_at(5e-9);
        assert!(fine <= coarse / 2.0, "coarse {coarse} fine {fine}");
    }

    #[test]
    fn drift_examples() {
        // 2.5D first integral f = −cos(2πx)
        let f = ScalarField::new(|p: &ChartPoint| -(TAU * p.coords[0]).cos());
        let x = golden_field();
        let traj = integrate(&torus(), &x, ChartPoint::main([0.2, 0.1, 0.9]), 100.0, IntegratorConfig::default()).unwrap();
        assert!(first_integral_drift(&traj, &f) < 1e-8);
        // constant first integral drifts exactly zero
        let c = ScalarField::constant(4.2);
        assert_eq!(first_integral_drift(&traj, &c), 0.0);
        // Hopf drift
        let entry = catalog_get("s3_hopf").unwrap();
        let fi = entry.first_integrals[0].field.clone();
        let htraj = integrate(&entry.model, &entry.field, ChartPoint::main([0.25, 0.2, -0.1]), 30.0, IntegratorConfig::default()).unwrap();
        assert!(first_integral_drift(&htraj, &fi) < 1e-8);
    }

    #[test]
    fn stalls_at_field_zero() {
        // attracting zero at x = 0.5 with a kink: the error estimate stays
        // jump-dominated once the orbit chatters across it, so h underflows
        let x = VectorField::new(|p| {
            let d = p.coords[0] - 0.5;
            [-d.signum() * (d.abs() + 1e-6), 0.0, 0.0]
        });
        let cfg = IntegratorConfig { max_steps: 200_000, ..Default::default() };
        match integrate(&torus(), &x, ChartPoint::main([0.49, 0.0, 0.0]), 20.0, cfg) {
            Err(Error::StalledAtZero { location, .. }) => {
                assert!((location[0] - 0.5).abs() < 1e-3, "stall location {:?}", location);
            }
            Err(other) => panic!("expected StalledAtZero, got {other}"),
            Ok(_) => panic!("expected StalledAtZero"),
        }
    }

    #[test]
    fn poincare_2_5d_crossings_stay_on_circle() {
        let x = golden_field();
        let section = SectionSpec { axis: 2, value: 0.0, direction: CrossingDirection::Negative };
        // ż = −2π cos(2πx) < 0 at x = 1/8 ⇒ crossings go negative
        let records = poincare(
            &torus(),
            &x,
            section,
            &[[0.125, 0.3, 0.0]],
            50,
            IntegratorConfig::default(),
            None,
            1e4,
        )
        .unwrap();
        let rec = &records[0];
        assert_eq!(rec.crossings.len(), 50);
        for c in &rec.crossings {
            assert!((c.point[0] - 0.125).abs() < 1e-9, "x at crossing {}", c.point[0]);
            assert!(c.section_residual < 1e-10);
            assert!(c.point[2].abs() < 1e-10 || (c.point[2] - 1.0).abs() < 1e-10);
        }
        assert_eq!(rec.skipped_nontransversal, 0);
    }

    #[test]
    fn poincare_constant_flow_keeps_xy() {
        let e3 = VectorField::constant([0.0, 0.0, 1.0]);
        let section = SectionSpec { axis: 2, value: 0.0, direction: CrossingDirection::Positive };
        let records = poincare(&torus(), &e3, section, &[[0.3, 0.7, 0.2]], 5, IntegratorConfig::default(), None, 100.0).unwrap();
        assert_eq!(records[0].crossings.len(), 5);
        for c in &records[0].crossings {
            assert!((c.point[0] - 0.3).abs() < 1e-12);
            assert!((c.point[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn poincare_seed_family_orders_by_first_integral() {
        // seeds x₀ = 0.05k land on distinct invariant circles ordered by
        // f = −cos(2πx₀); per-seed f stays constant to 1e−8
        let x = golden_field();
        let f = ScalarField::new(|p: &ChartPoint| -(TAU * p.coords[0]).cos());
        let section = SectionSpec { axis: 2, value: 0.0, direction: CrossingDirection::Both };
        let seeds: Vec<[f64; 3]> = (1..=4).map(|k| [0.05 * k as f64, 0.3, 0.0]).collect();
        let records = poincare(&torus(), &x, section, &seeds, 20, IntegratorConfig::default(), Some(&f), 1e4).unwrap();
        let mut levels = Vec::new();
        for rec in &records {
            assert!(!rec.crossings.is_empty());
            let vals: Vec<f64> = rec.crossings.iter().map(|c| c.f_value.unwrap()).collect();
            let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - vals.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(spread < 1e-8, "per-seed f spread {spread}");
            levels.push(vals[0]);
        }
        for pair in levels.windows(2) {
            assert!(pair[0] < pair[1], "levels not ordered: {levels:?}");
        }
    }

    #[test]
    fn rotation_number_slope_one_is_closed() {
        let x = golden_field();
        // at x₀ = 1/8 the (y, z) speeds are equal: ratio 1/1
        let traj = integrate(&torus(), &x, ChartPoint::main([0.125, 0.0, 0.0]), 40.0, IntegratorConfig::default()).unwrap();
        let est = rotation_number(&traj);
        assert_eq!(est.verdict, RotationVerdict::ClosedWithinTolerance);
        assert_eq!(est.rational, Some((1, 1)));
        assert_eq!(est.axes, [1, 2]);
        assert!((est.ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_number_sqrt2_is_irrational_like() {
        let x = golden_field();
        let x0 = (2f64.sqrt()).atan() / TAU; // tan(2πx₀) = √2
        // z winds at speed 2π cos(2πx₀) = 2π/√3; 200 windings
        let t_end = 200.0 / (TAU / 3f64.sqrt());
        let traj = integrate(&torus(), &x, ChartPoint::main([x0, 0.0, 0.0]), t_end, IntegratorConfig::default()).unwrap();
        let est = rotation_number(&traj);
        assert_eq!(est.verdict, RotationVerdict::IrrationalLike, "ratio {} windings {}", est.ratio, est.windings);
        assert!((est.ratio.abs() - 2f64.sqrt()).abs() < 1e-2);
        assert!(est.windings >= 190.0);
    }

    #[test]
    fn seeds_on_one_torus_agree_on_the_verdict() {
        // all orbits on a fixed invariant torus share the dichotomy verdict
        let x = golden_field();
        let estimates: Vec<RotationEstimate> = (0..5)
            .map(|i| {
                let p = ChartPoint::main([0.125, 0.17 * i as f64 % 1.0, 0.29 * i as f64 % 1.0]);
                let traj = integrate(&torus(), &x, p, 40.0, IntegratorConfig::default()).unwrap();
                rotation_number(&traj)
            })
            .collect();
        assert_eq!(verdict_consensus(&estimates), Some(RotationVerdict::ClosedWithinTolerance));
        let x0 = (2f64.sqrt()).atan() / TAU;
        let t_end = 60.0 / (TAU / 3f64.sqrt());
        let irr: Vec<RotationEstimate> = (0..5)
            .map(|i| {
                let p = ChartPoint::main([x0, 0.13 * i as f64 % 1.0, 0.41 * i as f64 % 1.0]);
                let traj = integrate(&torus(), &x, p, t_end, IntegratorConfig::default()).unwrap();
                rotation_number(&traj)
            })
            .collect();
        assert_eq!(verdict_consensus(&irr), Some(RotationVerdict::IrrationalLike));
        // mixed verdicts yield no consensus
        let mut mixed = estimates.clone();
        mixed.extend(irr);
        assert_eq!(verdict_consensus(&mixed), None);
    }

    #[test]
    fn rotation_number_single_axis_is_undetermined() {
        let e3 = VectorField::constant([0.0, 0.0, 1.0]);
        let traj = integrate(&torus(), &e3, ChartPoint::main([0.1, 0.1, 0.0]), 30.0, IntegratorConfig::default()).unwrap();
        assert_eq!(rotation_number(&traj).verdict, RotationVerdict::Undetermined);
    }

    #[test]
    fn rotation_verdict_invariant_under_time_rescaling() {
        let x = golden_field();
        let x2 = {
            let base = golden_field();
            VectorField::new(move |p: &ChartPoint| linalg::scale(base.value(p), 2.0))
        };
        let t1 = integrate(&torus(), &x, ChartPoint::main([0.125, 0.2, 0.1]), 30.0, IntegratorConfig::default()).unwrap();
        let t2 = integrate(&torus(), &x2, ChartPoint::main([0.125, 0.2, 0.1]), 15.0, IntegratorConfig::default()).unwrap();
        let e1 = rotation_number(&t1);
        let e2 = rotation_number(&t2);
        assert_eq!(e1.verdict, e2.verdict);
        assert_eq!(e1.rational, e2.rational);
        assert!((e1.ratio - e2.ratio).abs() < 1e-8);
    }

    #[test]
    fn convergents_of_sqrt2() {
        let c = convergents(2f64.sqrt(), 50);
        assert_eq!(c, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
        assert_eq!(convergents(PI, 120).last(), Some(&(355, 113)));
    }
}
