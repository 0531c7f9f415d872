//! The small toy schedule: stage data, its ledger and both residual paths.

use sparse_steady::construction::{build, compare_residuals, materialize_partial, residual_from_ledger, ConstructionConfig};

fn main() -> sparse_steady::Result<()> {
    let state = build(ConstructionConfig::toy(3))?;
    for s in &state.stages {
        println!("stage {}  N {}  k {}  rho {}  eta {}", s.n, s.big_n, s.k, s.rho, s.eta);
    }
    for e in state.block(1) {
        println!("  p {:>2} {:?}  gamma {}  |lambda| {}  beta {}", e.p, e.rule, e.gamma, e.lambda_abs, e.beta);
    }
    for n in 1..=3 {
        let cmp = compare_residuals(&state, n)?;
        let r = residual_from_ledger(&state, n)?;
        println!("n = {n}: {} modes in U_n, {} residual modes, worst error {:e}", materialize_partial(&state, n)?.len(), r.len(), cmp.max_rel_err);
    }
    Ok(())
}
