//! Legacy ASCII VTK and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use crate::fem::SolutionField;
use crate::mesh::CutShape;
use crate::{Error, Result};

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

/// One unstructured grid holding every component: bulk active triangles
/// (VTK type 5) with nodal values, crack cut polylines (type 3) with values at
/// the cut points, and bifurcation points (type 1). Cell data records the
/// component slot and dimension.
pub fn export_vtk(uh: &SolutionField, path: &Path) -> Result<()> {
    let disc = uh.disc;
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    let mut cells: Vec<(u8, Vec<usize>, usize, usize)> = Vec::new();
    for (slot, am) in disc.active.iter().enumerate() {
        let cd = &disc.dofs.components[slot];
        match am.comp.dim {
            2 => {
                let base = pts.len();
                for (k, &v) in cd.vertices.iter().enumerate() {
                    let x = disc.mesh.vertices[v];
                    pts.push((x.x, x.y, uh.coeffs[cd.offset + k]));
                }
                for &t in &am.triangles {
                    let ids = disc.mesh.triangles[t]
                        .iter()
                        .map(|v| base + cd.vertices.binary_search(v).expect("active vertex"))
                        .collect();
                    cells.push((5, ids, slot, 2));
                }
            }
            1 => {
                let mut last: Option<usize> = None;
                for cell in &am.cells {
                    let CutShape::Segment { a, b, .. } = cell.shape else { continue };
                    let start = match last {
                        Some(i) if (pts[i].0 - a.x).abs() + (pts[i].1 - a.y).abs() == 0.0 => i,
                        _ => {
                            let (v, _) = uh.eval_in(am.comp, cell.triangle, a)?;
                            pts.push((a.x, a.y, v));
                            pts.len() - 1
                        }
                    };
                    let (v, _) = uh.eval_in(am.comp, cell.triangle, b)?;
                    pts.push((b.x, b.y, v));
                    last = Some(pts.len() - 1);
                    cells.push((3, vec![start, pts.len() - 1], slot, 1));
                }
            }
            _ => {
                let x = disc.domain.points[am.comp.index].x;
                pts.push((x.x, x.y, uh.coeffs[cd.offset]));
                cells.push((1, vec![pts.len() - 1], slot, 0));
            }
        }
    }

    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "fractured domain solution");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", pts.len());
    for p in &pts {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", p.0, p.1);
    }
    let size: usize = cells.iter().map(|c| c.1.len() + 1).sum();
    let _ = writeln!(s, "CELLS {} {}", cells.len(), size);
    for c in &cells {
        let ids: Vec<String> = c.1.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "{} {}", c.1.len(), ids.join(" "));
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for c in &cells {
        let _ = writeln!(s, "{}", c.0);
    }
    if !cells.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", cells.len());
        let _ = writeln!(s, "SCALARS component int 1\nLOOKUP_TABLE default");
        for c in &cells {
            let _ = writeln!(s, "{}", c.2);
        }
        let _ = writeln!(s, "SCALARS dimension int 1\nLOOKUP_TABLE default");
        for c in &cells {
            let _ = writeln!(s, "{}", c.3);
        }
        let _ = writeln!(s, "POINT_DATA {}", pts.len());
        let _ = writeln!(s, "SCALARS u double 1\nLOOKUP_TABLE default");
        for p in &pts {
            let _ = writeln!(s, "{:.16e}", p.2);
        }
    }
    write_file(path, &s)
}

/// Write a numeric table with 17 significant digits.
pub fn export_csv(path: &Path, headers: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(headers).map_err(|e| csv_error(path, e))?;
    for r in rows {
        if r.len() != headers.len() {
            return Err(Error::DimensionMismatch {
                expected: headers.len(),
                got: r.len(),
            });
        }
        w.write_record(r.iter().map(|v| format!("{v:.16e}")))
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read a table written by [`export_csv`].
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Config(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((headers, rows))
}

/// Nodal values: one row per dof with component slot, dimension, coordinates
/// and value.
pub fn export_solution_csv(uh: &SolutionField, path: &Path) -> Result<()> {
    let disc = uh.disc;
    let mut rows = Vec::with_capacity(disc.dofs.n);
    for (slot, cd) in disc.dofs.components.iter().enumerate() {
        if cd.comp.dim == 0 {
            let x = disc.domain.points[cd.comp.index].x;
            rows.push(vec![slot as f64, 0.0, x.x, x.y, uh.coeffs[cd.offset]]);
        } else {
            for (k, &v) in cd.vertices.iter().enumerate() {
                let x = disc.mesh.vertices[v];
                rows.push(vec![slot as f64, cd.comp.dim as f64, x.x, x.y, uh.coeffs[cd.offset + k]]);
            }
        }
    }
    export_csv(path, &["component", "dim", "x", "y", "u"], &rows)
}
