//! Eight stages of the default schedule, verified, with a per-stage summary.

use sparse_steady::construction::{build, verify_construction, ConstructionConfig, VerifyOptions};

fn main() -> sparse_steady::Result<()> {
    let state = build(ConstructionConfig::standard(8))?;
    let report = verify_construction(&state, &VerifyOptions::default())?;
    println!("{:>2} {:>28} {:>10} {:>12} {:>12}", "n", "N_n", "rho_n", "tail", "max err");
    for (s, r) in state.stages.iter().zip(&report.stages).skip(1) {
        println!(
            "{:>2} {:>28} {:>10.3e} {:>12.4e} {:>12.1e}",
            s.n,
            s.big_n.to_string(),
            s.rho.to_f64().unwrap_or(0.0),
            r.tail_majorant.to_f64().unwrap_or(0.0),
            r.residual_max_rel_err
        );
    }
    println!("C0 witness {}, tail ratio {}", report.c0_witness, report.tail_ratio.unwrap());
    for c in &report.checks {
        println!("{:?} {} {}", c.status, c.name, c.detail);
    }
    Ok(())
}
