//! CSV, gnuplot and mask writers. Every file starts with a `# run_config:`
//! comment carrying the full configuration JSON.

use crate::config::RunConfig;
use beltrami_core::error::{Error, Result};
use beltrami_core::field::ScalarField;
use beltrami_core::fieldline::{PoincareRecord, SectionSpec, Trajectory};
use beltrami_core::structure::{ComponentRecord, CriticalScan};
use std::io::Write;
use std::path::Path;

fn config_header(rc: &RunConfig) -> String {
    format!("# run_config: {}\n", serde_json::to_string(rc).expect("config json"))
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path)
        .map_err(|e| Error::InvalidArgument(format!("create {}: {e}", path.display())))
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// Columns: t, x, y, z (wrapped), wx, wy, wz (winding counters), f.
/// Sphere trajectories have no windings; a chart column replaces them.
pub fn write_trace_csv(
    path: &Path,
    rc: &RunConfig,
    traj: &Trajectory,
    f: &ScalarField,
) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(config_header(rc).as_bytes()).map_err(io_err)?;
    let torus = traj.model.is_torus();
    if torus {
        writeln!(out, "t,x,y,z,wx,wy,wz,f").map_err(io_err)?;
    } else {
        writeln!(out, "t,chart,x,y,z,f").map_err(io_err)?;
    }
    for i in 0..traj.len() {
        let t = traj.times[i];
        let fv = f.value(&traj.chart_point(i));
        if torus {
            let p = traj.wrapped_point(i);
            let w = traj.windings_at(i);
            writeln!(out, "{t},{},{},{},{},{},{},{fv}", p[0], p[1], p[2], w[0], w[1], w[2])
                .map_err(io_err)?;
        } else {
            let p = traj.points[i];
            let chart = match traj.charts[i] {
                beltrami_core::manifold::ChartId::Main => "main",
                beltrami_core::manifold::ChartId::Antipodal => "antipodal",
            };
            writeln!(out, "{t},{chart},{},{},{},{fv}", p[0], p[1], p[2]).map_err(io_err)?;
        }
    }
    Ok(())
}

/// Emit a gnuplot script plotting a trajectory's wrapped coordinates.
pub fn write_trace_gnuplot(path: &Path, csv: &Path, torus: bool) -> Result<()> {
    let mut out = create(path)?;
    let (xcol, ycol, zcol) = if torus { (2, 3, 4) } else { (3, 4, 5) };
    write!(
        out,
        "set datafile separator ','\n\
         set title 'field line'\n\
         splot '{}' every ::1 using {}:{}:{} with dots notitle\n",
        csv.display(),
        xcol,
        ycol,
        zcol
    )
    .map_err(io_err)?;
    Ok(())
}

/// Columns: seed_id, crossing, t, x, y, z, f.
pub fn write_poincare_csv(path: &Path, rc: &RunConfig, records: &[PoincareRecord]) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(config_header(rc).as_bytes()).map_err(io_err)?;
    writeln!(out, "seed_id,crossing,t,x,y,z,f").map_err(io_err)?;
    for (id, rec) in records.iter().enumerate() {
        for (ci, c) in rec.crossings.iter().enumerate() {
            let f = c.f_value.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{id},{ci},{},{},{},{},{f}", c.t, c.point[0], c.point[1], c.point[2])
                .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Emit a gnuplot script plotting the section's in-plane coordinates.
pub fn write_poincare_gnuplot(path: &Path, csv: &Path, section: SectionSpec) -> Result<()> {
    let (u, v) = match section.axis {
        0 => ("y", "z"),
        1 => ("x", "z"),
        _ => ("x", "y"),
    };
    let cols = match section.axis {
        0 => (5, 6),
        1 => (4, 6),
        _ => (4, 5),
    };
    let mut out = create(path)?;
    write!(
        out,
        "set datafile separator ','\n\
         set title 'Poincaré section {u}-{v}'\n\
         set xlabel '{u}'\nset ylabel '{v}'\n\
         set size square\n\
         plot '{}' every ::1 using {}:{} with dots notitle\n",
        csv.display(),
        cols.0,
        cols.1
    )
    .map_err(io_err)?;
    Ok(())
}

/// Columns: level, seed coordinates, node_count, min_cross_norm, drift, f_variation.
pub fn write_components_csv(path: &Path, rc: &RunConfig, comps: &[ComponentRecord]) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(config_header(rc).as_bytes()).map_err(io_err)?;
    writeln!(out, "level,seed_x,seed_y,seed_z,node_count,min_cross_norm,invariance_drift,f_variation")
        .map_err(io_err)?;
    for c in comps {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.level,
            c.seed[0],
            c.seed[1],
            c.seed[2],
            c.node_count,
            c.min_cross_norm,
            c.invariance_drift,
            c.f_variation
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Raw Γ mask: a one-line JSON header (dimensions, thresholds, run config)
/// followed by n³ bytes (1 = node in Γ), x-major/z-fastest node order.
pub fn write_gamma_mask(path: &Path, rc: &RunConfig, n: usize, crit: &CriticalScan) -> Result<()> {
    let mut out = create(path)?;
    let header = serde_json::json!({
        "schema": "gamma-mask/1",
        "dims": [n, n, n],
        "thresholds": crit.thresholds,
        "critical_values": crit.critical_values,
        "run_config": rc,
    });
    out.write_all(serde_json::to_string(&header).expect("json").as_bytes()).map_err(io_err)?;
    out.write_all(b"\n").map_err(io_err)?;
    let bytes: Vec<u8> = crit.gamma_mask.iter().map(|&m| u8::from(m)).collect();
    out.write_all(&bytes).map_err(io_err)?;
    Ok(())
}
