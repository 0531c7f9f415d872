//! Truncated evolution: heat decay of one mode, the energy balance on two
//! modes and the drift of the toy first stage.

use sparse_steady::construction::{build, materialize_partial, ConstructionConfig};
use sparse_steady::evolution::{compare_steady, evolve, EvolutionConfig};
use sparse_steady::{Frequency, Phase, PhasorMode, SolenoidalField, WideReal};

fn main() -> sparse_steady::Result<()> {
    let one = SolenoidalField::single(Frequency::new(1, 1), WideReal::from_f64(1.0), Phase::ZERO)?;
    let traj = evolve(&one, &EvolutionConfig::new(2, 1e-2, 1.0))?;
    let last = traj.samples.last().unwrap();
    println!("heat: E(1)/E(0) = {:.12}, exp(-4) = {:.12}", last.energy / traj.samples[0].energy, (-4.0f64).exp());

    let two = SolenoidalField::from_modes([
        PhasorMode::polar(Frequency::new(1, 0), WideReal::from_f64(1.0), Phase::ZERO)?,
        PhasorMode::polar(Frequency::new(1, 2), WideReal::from_f64(0.8), Phase::new(1, 3)?)?,
    ]);
    let traj = evolve(&two, &EvolutionConfig::new(16, 1e-3, 1.0))?;
    println!("two modes: audit {:e}, {} active modes at t = 1", traj.energy_audit(), traj.last.active_modes());

    let state = build(ConstructionConfig::toy(1))?;
    let u1 = materialize_partial(&state, 1)?;
    let mut cfg = EvolutionConfig::new(32, 1e-3, 0.2);
    cfg.record_every = 50;
    let traj = evolve(&u1, &cfg)?;
    let c = compare_steady(&traj);
    for s in &traj.samples {
        println!("t {:.3}  E {:.6e}  dist {:.6e}", s.t, s.energy, s.distance_to_initial);
    }
    println!("decay ratio {:.4}, max distance {:.4e}", c.decay_ratio, c.max_distance);
    Ok(())
}
