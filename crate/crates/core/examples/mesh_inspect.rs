//! Debug dumps: the coupled mesh in plain text and an assembled operator in
//! coordinate format, for cross-checking against external tools.
//!
//! ```bash
//! cargo run --example mesh_inspect
//! ```

use stokes_darcy::assembly::{FemSpaces, OperatorSet, QuadratureConfig};
use stokes_darcy::mesh::{build_coupled_mesh, outer_boundary_vertices, write_mesh_dump};
use stokes_darcy::mms::ManufacturedCase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = build_coupled_mesh(2)?;
    println!(
        "n = 2: {} fluid vertices, {} fluid triangles, {} interface pairs",
        mesh.fluid.vertices.len(),
        mesh.fluid.triangles.len(),
        mesh.interface_pairs.len()
    );
    println!(
        "outer-boundary vertices: fluid {}, porous {}",
        outer_boundary_vertices(&mesh.fluid).len(),
        outer_boundary_vertices(&mesh.porous).len()
    );

    std::fs::create_dir_all("out")?;
    let mut file = std::fs::File::create("out/mesh_n2.txt")?;
    write_mesh_dump(&mesh, &mut file)?;
    println!("wrote out/mesh_n2.txt");

    let spaces = FemSpaces::new(&mesh);
    let params = ManufacturedCase::Example1.default_params();
    let ops = OperatorSet::assemble(&mesh, &spaces, &params, &QuadratureConfig::default())?;
    let mut file = std::fs::File::create("out/interface_coupling.coo")?;
    ops.c_fp.write_coo(&mut file)?;
    println!(
        "wrote out/interface_coupling.coo ({} entries, {}x{})",
        ops.c_fp.nnz(),
        ops.c_fp.nrows(),
        ops.c_fp.ncols()
    );
    Ok(())
}
