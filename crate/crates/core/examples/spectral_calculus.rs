//! Build a field from a few modes, project an arbitrary vector field onto
//! divergence-free modes and print a handful of norms.

use sparse_steady::generators::random_general_field;
use sparse_steady::spectral::{besov_bmo_proxies, leray_project, sobolev_norm, superpose};
use sparse_steady::{Frequency, Phase, SolenoidalField, WideReal};

fn main() -> sparse_steady::Result<()> {
    let a = SolenoidalField::single(Frequency::new(1, 1), WideReal::from_f64(0.5), Phase::ZERO)?;
    let b = SolenoidalField::single(Frequency::new(9, -9), WideReal::from_f64(0.1), Phase::HALF_PI)?;
    let u = superpose([&a, &b]);

    for s in [-3.0, -1.0, 0.0, 1.0] {
        println!("H^{s:<3} norm  {}", sobolev_norm(&u, s));
    }
    let p = besov_bmo_proxies(&u);
    println!("besov proxy {}  bmo proxy {}", p.besov, p.bmo);
    println!("u(0.3, 1.2) = {:?}", u.evaluate([0.3, 1.2])?);

    // a random field with longitudinal parts; projecting twice changes nothing
    let g = random_general_field(7, 5, 12)?;
    let pg = leray_project(&g);
    assert_eq!(leray_project(&pg.to_general()), pg);
    for (k, ph) in pg.iter() {
        println!("{k:>10}  rho {:.6}  angle {:+.6}", ph.rho().to_f64().unwrap(), ph.angle());
    }
    Ok(())
}
