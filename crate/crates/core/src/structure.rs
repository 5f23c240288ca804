//! Invariant-torus structure instruments: the first integral of a commuting pair,
//! grid scans for its critical values and singular-set mask, level-set
//! components with linear-independence and flow-invariance evidence, and the
//! gradient-flow chamber fibration.

use crate::calculus;
use crate::error::{Error, Result};
use crate::field::{FdConfig, ScalarField, VectorField};
use crate::fieldline::{self, IntegratorConfig, StepAction};
use crate::linalg::{self, Vec3};
use crate::manifold::{ChartPoint, ManifoldModel};
use rayon::prelude::*;
use std::collections::VecDeque;

/// Scan lattice: torus nodes i/n (periodic) or a chart box (sphere).
#[derive(Debug, Clone)]
pub enum ScanGrid {
    TorusNodes { n: usize },
    BoxNodes { lo: Vec3, hi: Vec3, n: usize },
}

impl ScanGrid {
    pub fn n(&self) -> usize {
        match self {
            ScanGrid::TorusNodes { n } | ScanGrid::BoxNodes { n, .. } => *n,
        }
    }

    pub fn periodic(&self) -> bool {
        matches!(self, ScanGrid::TorusNodes { .. })
    }

    pub fn node_count(&self) -> usize {
        self.n().pow(3)
    }

    pub fn point(&self, idx: [usize; 3]) -> ChartPoint {
        match self {
            ScanGrid::TorusNodes { n } => ChartPoint::main([
                idx[0] as f64 / *n as f64,
                idx[1] as f64 / *n as f64,
                idx[2] as f64 / *n as f64,
            ]),
            ScanGrid::BoxNodes { lo, hi, n } => {
                let frac = |a: f64, b: f64, i: usize| {
                    if *n == 1 { a } else { a + (b - a) * i as f64 / (*n - 1) as f64 }
                };
                ChartPoint::main([
                    frac(lo[0], hi[0], idx[0]),
                    frac(lo[1], hi[1], idx[1]),
                    frac(lo[2], hi[2], idx[2]),
                ])
            }
        }
    }

    fn linear(&self, idx: [usize; 3]) -> usize {
        let n = self.n();
        (idx[0] * n + idx[1]) * n + idx[2]
    }

    fn unlinear(&self, lin: usize) -> [usize; 3] {
        let n = self.n();
        [lin / (n * n), (lin / n) % n, lin % n]
    }

    /// 6-connected neighbors (wrapping on the torus).
    fn neighbors(&self, idx: [usize; 3]) -> Vec<[usize; 3]> {
        let n = self.n();
        let mut out = Vec::with_capacity(6);
        for axis in 0..3 {
            for dir in [-1i64, 1] {
                let v = idx[axis] as i64 + dir;
                if self.periodic() {
                    let mut q = idx;
                    q[axis] = v.rem_euclid(n as i64) as usize;
                    out.push(q);
                } else if v >= 0 && (v as usize) < n {
                    let mut q = idx;
                    q[axis] = v as usize;
                    out.push(q);
                }
            }
        }
        out
    }
}

/// First integral of a commuting Beltrami/Killing pair: f = g(X,Y)/λ.
/// Carries analytic partials when both fields have Jacobians.
pub fn first_integral_of_pair(
    model: &ManifoldModel,
    x: &VectorField,
    y: &VectorField,
    lambda: f64,
) -> Result<ScalarField> {
    if lambda == 0.0 {
        return Err(Error::ZeroEigenvalue);
    }
    let product = calculus::scalar_product_field(model, x, y);
    let scale = 1.0 / lambda;
    Ok(if product.has_partials() {
        let p1 = product.clone();
        let p2 = product;
        ScalarField::with_partials(
            move |q: &ChartPoint| p1.value(q) * scale,
            move |q: &ChartPoint| {
                linalg::scale(p2.partials_at(q, FdConfig::default()).expect("analytic"), scale)
            },
        )
    } else {
        ScalarField::new(move |q: &ChartPoint| product.value(q) * scale)
    })
}

/// sup over samples of ‖grad f − Y×X‖_g (the gradient identity that makes the
/// regular level sets invariant tori).
pub fn pair_gradient_residual(
    model: &ManifoldModel,
    f: &ScalarField,
    x: &VectorField,
    y: &VectorField,
    samples: &[ChartPoint],
    cfg: FdConfig,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in samples {
        let grad = calculus::grad(model, f, p, cfg)?;
        let yx = calculus::cross(model, p, y.value(p), x.value(p));
        let diff = linalg::sub(grad, yx);
        worst = worst.max(model.g_norm(p, diff));
    }
    Ok(worst)
}

/// Threshold scales relative to the scan's own statistics:
/// ε_grad = eps_grad_scale·max|grad f|, δ_level = delta_level_scale·range(f),
/// δ_cluster = delta_cluster_scale·range(f).
#[derive(Debug, Clone, Copy)]
pub struct ThresholdScales {
    pub eps_grad_scale: f64,
    pub delta_level_scale: f64,
    pub delta_cluster_scale: f64,
}

impl Default for ThresholdScales {
    fn default() -> Self {
        ThresholdScales {
            eps_grad_scale: 1e-3,
            delta_level_scale: 1e-3,
            delta_cluster_scale: 1e-2,
        }
    }
}

impl ThresholdScales {
    pub fn halved(&self) -> Self {
        ThresholdScales {
            eps_grad_scale: self.eps_grad_scale / 2.0,
            delta_level_scale: self.delta_level_scale / 2.0,
            delta_cluster_scale: self.delta_cluster_scale,
        }
    }
}

/// Absolute thresholds a scan resolved to (reported for re-judging).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Thresholds {
    pub eps_grad: f64,
    pub delta_level: f64,
    pub delta_cluster: f64,
}

/// Sampled values and Riemannian gradient norms of f on a scan grid.
pub struct FieldScan {
    pub grid: ScanGrid,
    pub values: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub f_min: f64,
    pub f_max: f64,
    pub max_grad: f64,
}

/// Evaluate f and |grad f|_g on every grid node (parallel, deterministic order).
pub fn scan_field(model: &ManifoldModel, f: &ScalarField, grid: &ScanGrid, cfg: FdConfig) -> Result<FieldScan> {
    let n = grid.n();
    let rows: Vec<Result<Vec<(f64, f64)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n * n);
            for j in 0..n {
                for l in 0..n {
                    let p = grid.point([i, j, l]);
                    let v = f.value(&p);
                    let g = calculus::grad(model, f, &p, cfg)?;
                    row.push((v, model.g_norm(&p, g)));
                }
            }
            Ok(row)
        })
        .collect();
    let mut values = Vec::with_capacity(grid.node_count());
    let mut grad_norms = Vec::with_capacity(grid.node_count());
    for row in rows {
        for (v, g) in row? {
            values.push(v);
            grad_norms.push(g);
        }
    }
    let f_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let f_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_grad = grad_norms.iter().cloned().fold(0.0, f64::max);
    Ok(FieldScan { grid: grid.clone(), values, grad_norms, f_min, f_max, max_grad })
}

/// Result of a critical scan: clustered critical values and the Γ mask.
pub struct CriticalScan {
    pub thresholds: Thresholds,
    pub critical_values: Vec<f64>,
    pub critical_node_count: usize,
    /// Node mask of Γ = f⁻¹(critical values) thickened by δ_level.
    pub gamma_mask: Vec<bool>,
    pub gamma_node_count: usize,
    /// f is numerically constant: every node critical, Γ is everything.
    pub degenerate: bool,
    pub f_min: f64,
    pub f_max: f64,
    pub max_grad: f64,
}

/// Collect near-critical nodes, cluster their f-values into critical values,
/// and mark the Γ mask. A constant f yields the degenerate report.
pub fn critical_scan(scan: &FieldScan, scales: ThresholdScales) -> CriticalScan {
    let range = scan.f_max - scan.f_min;
    let degenerate = !(range > 1e-12 * (1.0 + scan.f_max.abs()));
    let thresholds = Thresholds {
        eps_grad: scales.eps_grad_scale * scan.max_grad,
        delta_level: scales.delta_level_scale * range,
        delta_cluster: scales.delta_cluster_scale * range,
    };
    if degenerate {
        let count = scan.values.len();
        return CriticalScan {
            thresholds,
            critical_values: vec![scan.f_min],
            critical_node_count: count,
            gamma_mask: vec![true; count],
            gamma_node_count: count,
            degenerate: true,
            f_min: scan.f_min,
            f_max: scan.f_max,
            max_grad: scan.max_grad,
        };
    }
    let mut crit_values: Vec<f64> = scan
        .values
        .iter()
        .zip(&scan.grad_norms)
        .filter(|(_, g)| **g < thresholds.eps_grad)
        .map(|(v, _)| *v)
        .collect();
    let critical_node_count = crit_values.len();
    crit_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<f64> = Vec::new();
    let mut start = 0usize;
    for i in 1..=crit_values.len() {
        if i == crit_values.len() || crit_values[i] - crit_values[i - 1] > thresholds.delta_cluster {
            let slice = &crit_values[start..i];
            clusters.push(slice.iter().sum::<f64>() / slice.len() as f64);
            start = i;
        }
    }
    let gamma_mask: Vec<bool> = scan
        .values
        .iter()
        .map(|v| clusters.iter().any(|c| (v - c).abs() < thresholds.delta_level))
        .collect();
    let gamma_node_count = gamma_mask.iter().filter(|m| **m).count();
    CriticalScan {
        thresholds,
        critical_values: clusters,
        critical_node_count,
        gamma_mask,
        gamma_node_count,
        degenerate: false,
        f_min: scan.f_min,
        f_max: scan.f_max,
        max_grad: scan.max_grad,
    }
}

/// One connected component of a regular level set, with the evidence the
/// torus conclusion rests on: nonvanishing |X×Y| and flow invariance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ComponentRecord {
    pub level: f64,
    pub seed: Vec3,
    pub node_count: usize,
    pub min_cross_norm: f64,
    /// max over 5 integrated seeds of max_t |f(x(t)) − f(x(0))|.
    pub invariance_drift: f64,
    /// max |f − level| across the component's nodes (shell width actually used).
    pub f_variation: f64,
}

/// Flood-fill all components of the shell {|f − c| < δ_level} on the grid and
/// measure each one. Requires c to be a regular value (no component may touch
/// a near-critical node).
pub fn level_components(
    model: &ManifoldModel,
    f: &ScalarField,
    x: &VectorField,
    y: &VectorField,
    c: f64,
    scan: &FieldScan,
    thresholds: Thresholds,
    integ: IntegratorConfig,
    arc_length: f64,
) -> Result<Vec<ComponentRecord>> {
    let grid = &scan.grid;
    let in_shell: Vec<bool> = scan.values.iter().map(|v| (v - c).abs() < thresholds.delta_level).collect();
    let mut label: Vec<Option<usize>> = vec![None; in_shell.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..in_shell.len() {
        if !in_shell[start] || label[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut nodes = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = Some(id);
        while let Some(lin) = queue.pop_front() {
            nodes.push(lin);
            for nb in grid.neighbors(grid.unlinear(lin)) {
                let nl = grid.linear(nb);
                if in_shell[nl] && label[nl].is_none() {
                    label[nl] = Some(id);
                    queue.push_back(nl);
                }
            }
        }
        nodes.sort_unstable();
        components.push(nodes);
    }

    let mut records = Vec::with_capacity(components.len());
    for nodes in &components {
        // reject components touching near-critical nodes: c is then not regular
        if nodes.iter().any(|&lin| scan.grad_norms[lin] < thresholds.eps_grad) {
            return Err(Error::InvalidArgument(format!(
                "level {c} is not regular: its shell touches near-critical nodes"
            )));
        }
        let mut min_cross = f64::INFINITY;
        let mut f_variation = 0.0f64;
        for &lin in nodes {
            let p = grid.point(grid.unlinear(lin));
            let cr = calculus::cross(model, &p, x.value(&p), y.value(&p));
            min_cross = min_cross.min(model.g_norm(&p, cr));
            f_variation = f_variation.max((scan.values[lin] - c).abs());
        }
        // five spread-out seeds, integrated for the given arc length
        let mut drift = 0.0f64;
        let n_seeds = 5.min(nodes.len());
        for s in 0..n_seeds {
            let lin = nodes[(s * nodes.len()) / n_seeds.max(1)];
            let p = grid.point(grid.unlinear(lin));
            let speed = model.g_norm(&p, x.value(&p)).max(1e-9);
            let traj = fieldline::integrate(model, x, p, arc_length / speed, integ)?;
            drift = drift.max(fieldline::first_integral_drift(&traj, f));
        }
        let seed = grid.point(grid.unlinear(nodes[0])).coords;
        records.push(ComponentRecord {
            level: c,
            seed,
            node_count: nodes.len(),
            min_cross_norm: min_cross,
            invariance_drift: drift,
            f_variation,
        });
    }
    Ok(records)
}

/// Transport record of the gradient-flow fibration ψ: d/dt f(ψ(t,p)) = 1.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChamberRecord {
    pub base: Vec3,
    pub f_base: f64,
    /// Negative/positive transport parameter actually reached (abort at
    /// |grad f| < ε_grad locates the chamber boundary).
    pub t_reached: (f64, f64),
    pub requested: (f64, f64),
    /// max |f(ψ(t,p)) − f(p) − t| over accepted samples.
    pub linearity_residual: f64,
    pub aborted_at_boundary: (bool, bool),
}

fn transport_field(model: &ManifoldModel, f: &ScalarField, backward: bool) -> VectorField {
    let m = model.clone();
    let ff = f.clone();
    let cfg = FdConfig::default();
    let sign = if backward { -1.0 } else { 1.0 };
    VectorField::new(move |p: &ChartPoint| {
        let g = calculus::grad(&m, &ff, p, cfg).unwrap_or([f64::NAN; 3]);
        let norm_sq = m.inner(p, g, g);
        linalg::scale(g, sign / norm_sq)
    })
}

fn transport_one_direction(
    model: &ManifoldModel,
    f: &ScalarField,
    p: ChartPoint,
    t_span: f64,
    eps_grad: f64,
    integ: IntegratorConfig,
    backward: bool,
) -> Result<(f64, f64, bool, Vec3)> {
    if t_span == 0.0 {
        return Ok((0.0, 0.0, false, p.coords));
    }
    let field = transport_field(model, f, backward);
    let f0 = f.value(&p);
    let sign = if backward { -1.0 } else { 1.0 };
    let m = model.clone();
    let ff = f.clone();
    let cfg = FdConfig::default();
    let mut residual = 0.0f64;
    let mut aborted = false;
    let mut reached = 0.0f64;
    let mut endpoint = p.coords;
    let traj = fieldline::integrate_with(model, &field, p, t_span, integ, |dense, y1| {
        let t1 = dense.t0 + dense.h;
        let q = ChartPoint { chart: p.chart, coords: y1 };
        let fv = ff.value(&q);
        residual = residual.max((fv - f0 - sign * t1).abs());
        reached = t1;
        endpoint = y1;
        let grad = calculus::grad(&m, &ff, &q, cfg).unwrap_or([f64::NAN; 3]);
        if m.g_norm(&q, grad) < eps_grad {
            aborted = true;
            return StepAction::Stop;
        }
        StepAction::Continue
    })?;
    let _ = traj;
    Ok((reached, residual, aborted, endpoint))
}

/// Transport p by the normalized gradient flow over t ∈ [−t_neg, t_pos],
/// verifying the linear growth of f and locating chamber boundaries.
pub fn chamber_fibration(
    model: &ManifoldModel,
    f: &ScalarField,
    p: ChartPoint,
    t_neg: f64,
    t_pos: f64,
    eps_grad: f64,
    integ: IntegratorConfig,
) -> Result<ChamberRecord> {
    if t_neg < 0.0 || t_pos < 0.0 {
        return Err(Error::InvalidArgument("t spans must be nonnegative".into()));
    }
    let (reach_pos, res_pos, hit_pos, _) =
        transport_one_direction(model, f, p, t_pos, eps_grad, integ, false)?;
    let (reach_neg, res_neg, hit_neg, _) =
        transport_one_direction(model, f, p, t_neg, eps_grad, integ, true)?;
    Ok(ChamberRecord {
        base: p.coords,
        f_base: f.value(&p),
        t_reached: (reach_neg, reach_pos),
        requested: (t_neg, t_pos),
        linearity_residual: res_pos.max(res_neg),
        aborted_at_boundary: (hit_neg, hit_pos),
    })
}

/// Transport a ring of same-level points by the gradient flow and return the
/// spread of f over the images (ψ_t maps level sets to level sets).
pub fn transport_ring_spread(
    model: &ManifoldModel,
    f: &ScalarField,
    points: &[ChartPoint],
    t: f64,
    eps_grad: f64,
    integ: IntegratorConfig,
) -> Result<f64> {
    let mut values = Vec::with_capacity(points.len());
    for &p in points {
        let backward = t < 0.0;
        let (reached, _res, aborted, endpoint) =
            transport_one_direction(model, f, p, t.abs(), eps_grad, integ, backward)?;
        if aborted || (reached - t.abs()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "transport left the chamber before t = {t} (reached {reached})"
            )));
        }
        values.push(f.value(&ChartPoint { chart: p.chart, coords: endpoint }));
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}
