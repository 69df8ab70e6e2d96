//! Mines path rules on the equivalence fixture and prints the top rules
//! with their coverage statistics.

use kgbench::fixtures::equivalence_kg;
use kgbench::symbolic::{mine_rules, theory_analytics, write_rules, MiningConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kg = equivalence_kg();
    let r2 = kg.relation("r2").expect("fixture relation");
    let theory = mine_rules(&kg, r2, &MiningConfig::default())?;
    println!("{} rules for r2", theory.rules.len());
    let mut out = Vec::new();
    write_rules(&mut out, &kg, std::slice::from_ref(&theory))?;
    for line in String::from_utf8(out)?.lines().take(5) {
        println!("  {line}");
    }
    let analytics = theory_analytics(&kg, &[theory])?;
    for bin in &analytics.coverage_bins {
        if bin.count > 0 {
            println!("coverage {}: {} rules", bin.label, bin.count);
        }
    }
    Ok(())
}
