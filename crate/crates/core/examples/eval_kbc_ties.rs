//! Shows how tie handling changes filtered ranking metrics for a scorer
//! that rates every candidate the same.

use kgbench::eval::{evaluate, EvalConfig, FnScorer, RankMode};
use kgbench::fixtures::random_kg;
use kgbench::kg::Split;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kg = random_kg(100, 3, 600, 5);
    let constant = FnScorer(|_, _, _| 0.0);
    for mode in [RankMode::Optimistic, RankMode::Expected, RankMode::Pessimistic] {
        let cfg = EvalConfig {
            rank_mode: mode,
            ..EvalConfig::default()
        };
        let r = evaluate(&constant, &kg, Split::Test, &cfg)?;
        println!(
            "{:>11}: hits@1={:.3} hits@10={:.3} mrr={:.3}",
            mode.as_str(),
            r.overall.hits_at(1).unwrap_or_default(),
            r.overall.hits_at(10).unwrap_or_default(),
            r.overall.mrr
        );
    }
    Ok(())
}
