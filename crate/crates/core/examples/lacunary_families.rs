//! Lacunary and resonant families with their condition reports and
//! admissibility partial sums.

use sparse_steady::generators::{
    family_conditions_report, lacunary_field, resonant_conditions_report, resonant_field, LacunarySpec, ResonantSpec,
};
use sparse_steady::nonlinearity::{admissibility_partial_sums, PairOrder};
use sparse_steady::{Frequency, Phase};

fn main() -> sparse_steady::Result<()> {
    let spec = LacunarySpec::rotating(Frequency::new(1, 1), 9, 6, 0.125);
    let u = lacunary_field(&spec)?;
    let report = family_conditions_report(&spec, 3);
    for l in &report.levels {
        println!("level {}  k {:>16}  rho {}  gap {:?}", l.level, l.k, l.rho, l.gap_ratio);
    }
    println!("H^-3 partial sum {}", report.sobolev_partial_sums.last().unwrap());

    let t = admissibility_partial_sums(&u, 3, 100_000, PairOrder::MaxIndexLex)?;
    println!(
        "{} pairs, total {}, leading {}, final quarter {}",
        t.pairs.len(),
        t.total(),
        t.leading_term(),
        t.final_quarter_tail()
    );

    // ratio 8 breaks the gap condition
    match lacunary_field(&LacunarySpec::geometric(Frequency::new(1, 0), 8, 4, 0.5)) {
        Err(e) => println!("ratio 8: {e}"),
        Ok(_) => unreachable!(),
    }

    let res = ResonantSpec::following(LacunarySpec::rotating(Frequency::new(9, -9), 9, 3, 0.1), Frequency::new(1, 1), Phase::HALF_PI);
    let f = resonant_field(&res)?;
    let rr = resonant_conditions_report(&res, 3);
    println!("resonant family: {} modes, summability {}", f.len(), rr.summability_partial_sums.last().unwrap());
    for flag in &rr.flags {
        println!("  flag: {flag}");
    }
    Ok(())
}
