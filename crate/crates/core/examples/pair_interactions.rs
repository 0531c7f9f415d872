//! Pairwise interactions: the one-sided and symmetric pair terms, a resonant
//! pair that feeds a low frequency, and the full nonlinear term.

use sparse_steady::nonlinearity::{interact, nonlinear_term, symmetric_interact};
use sparse_steady::{Frequency, Phase, PhasorMode, SolenoidalField, WideReal};

fn mode(k: (i64, i64), rho: f64, theta: Phase) -> PhasorMode {
    PhasorMode::polar(Frequency::new(k.0, k.1), WideReal::from_f64(rho), theta).unwrap()
}

fn show(label: &str, f: &SolenoidalField) {
    println!("{label}");
    for (k, p) in f.iter() {
        println!("  {k:>10}  a {:+.6e}  b {:+.6e}", p.a.to_f64().unwrap(), p.b.to_f64().unwrap());
    }
}

fn main() -> sparse_steady::Result<()> {
    let a = mode((1, 0), 1.0, Phase::ZERO);
    let b = mode((1, 2), 0.8, Phase::new(1, 3)?);
    show("A advecting B", &interact(&a, &b)?);
    show("both orders", &symmetric_interact(&a, &b)?);

    // equal norms: the pair is invisible
    println!("|(3,4)| = |(5,0)|: {} outputs", symmetric_interact(&mode((3, 4), 1.0, Phase::ZERO), &mode((5, 0), 1.0, Phase::ZERO))?.len());

    // k ⊥ ω, the pair (k, k + ω) with a quarter-turn offset lands on ω
    let k = mode((9, -9), 1.0, Phase::ZERO);
    let kw = mode((10, -8), 1.0, Phase::HALF_PI);
    show("resonant pair", &symmetric_interact(&k, &kw)?);

    show("P(u.grad u) of the three modes", &nonlinear_term(&SolenoidalField::from_modes([a, b, k]))?);
    Ok(())
}
