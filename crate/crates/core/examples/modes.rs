//! Eigenmode families of a wire and a plate under different boundary
//! conditions.
//!
//!     cargo run --example modes

use std::f64::consts::PI;

use fluidrad::prelude::*;

fn main() -> Result<()> {
    let wire = DomainBox::line(Axis::Z, 0.5)?;
    println!("1-D wire, H = 0.5 m, k <= 10 rad/m");
    for bc in [AxisBc::dirichlet(), AxisBc::neumann(), AxisBc::robin(1.0, 0.1)] {
        let modes = enumerate_modes(&wire, &BoundaryCondition::uniform(bc), 10.0)?;
        let ks: Vec<String> = modes
            .iter()
            .map(|m| format!("{:.4}", m.wavenumber()))
            .collect();
        println!("  {:?}: {}", bc.kind(), ks.join(" "));
    }

    // Robin edges approach Dirichlet as b -> 0
    let exact = PI;
    for b in [1e-2, 1e-4, 1e-6] {
        let bc = BoundaryCondition::uniform(AxisBc::robin(1.0, b));
        let k1 = eigen_wavenumber(ModeIndex::new(0, 0, 1), &wire, &bc)?;
        println!("  robin b = {b:e}: k1 - pi = {:.3e}", k1 - exact);
    }

    let plate = DomainBox::plate_xy(0.3, 0.2)?;
    let bc = BoundaryCondition::new(AxisBc::dirichlet(), AxisBc::neumann(), AxisBc::dirichlet());
    let modes = enumerate_modes(&plate, &bc, 15.0)?;
    println!("\nplate 0.6 m x 0.4 m, Dirichlet in x, Neumann in y, k <= 15 rad/m");
    println!("  (n, m, p)      k        parity");
    for m in &modes {
        let p = m.parity();
        println!("  {:<12} {:8.4}  {}/{}", m.index().to_string(), m.wavenumber(), p[0], p[1]);
    }
    let centre = modes[0].value_at([0.0, 0.0, 0.0]);
    println!("  fundamental at the centre: {centre:.6}");
    Ok(())
}
