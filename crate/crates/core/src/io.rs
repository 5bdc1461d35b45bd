//! Legacy ASCII VTK and CSV output.

use std::io::{self, Write};

use crate::dual::DualMesh;
use crate::field::NodalField;
use crate::mesh::Mesh;
use crate::solver::Trajectory;

/// Primal triangulation with named point scalars.
pub fn write_vtk<W: Write>(out: &mut W, mesh: &Mesh, scalars: &[(&str, &NodalField)]) -> io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "boxtherm primal mesh")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for p in mesh.vertices() {
        writeln!(out, "{:e} {:e} 0", p[0], p[1])?;
    }
    let nt = mesh.num_triangles();
    writeln!(out, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }
    if !scalars.is_empty() {
        writeln!(out, "POINT_DATA {}", mesh.num_vertices())?;
        for (name, field) in scalars {
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in field.values() {
                writeln!(out, "{v:e}")?;
            }
        }
    }
    Ok(())
}

/// Boxes as polygons, with the box area and the owning vertex as cell data.
pub fn write_dual_vtk<W: Write>(out: &mut W, mesh: &Mesh, dual: &DualMesh) -> io::Result<()> {
    let polygons: Vec<_> = (0..mesh.num_vertices()).map(|v| dual.box_polygon(mesh, v)).collect();
    let npts: usize = polygons.iter().map(Vec::len).sum();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "boxtherm dual mesh")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {npts} double")?;
    for p in polygons.iter().flatten() {
        writeln!(out, "{:e} {:e} 0", p[0], p[1])?;
    }
    writeln!(out, "CELLS {} {}", polygons.len(), npts + polygons.len())?;
    let mut next = 0;
    for poly in &polygons {
        write!(out, "{}", poly.len())?;
        for _ in poly {
            write!(out, " {next}")?;
            next += 1;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", polygons.len())?;
    for _ in &polygons {
        writeln!(out, "7")?;
    }
    writeln!(out, "CELL_DATA {}", polygons.len())?;
    writeln!(out, "SCALARS box_area double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for a in dual.box_areas() {
        writeln!(out, "{a:e}")?;
    }
    writeln!(out, "SCALARS vertex int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in 0..polygons.len() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Long-format trajectory: `t,vertex_index,x,y,value`.
pub fn write_trajectory_csv<W: Write>(out: &mut W, mesh: &Mesh, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "t,vertex_index,x,y,value")?;
    for (t, field) in traj.times.iter().zip(&traj.fields) {
        for (i, (p, v)) in mesh.vertices().iter().zip(field.values()).enumerate() {
            writeln!(out, "{t:e},{i},{:e},{:e},{v:e}", p[0], p[1])?;
        }
    }
    Ok(())
}
