//! Trains the three embedding models on a random graph and reports the
//! loss curve and checkpoint epochs.

use kgbench::embed::{train, MemorySink, ModelKind, TrainConfig};
use kgbench::fixtures::random_kg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kg = random_kg(200, 4, 2000, 11);
    for kind in ModelKind::ALL {
        let mut cfg = TrainConfig::new(kind, 32);
        cfg.epochs = 30;
        cfg.checkpoint_every = 10;
        cfg.batch_size = 128;
        let mut sink = MemorySink::default();
        let (_, report) = train(&kg, &cfg, &mut sink)?;
        let losses = &report.epoch_losses;
        println!(
            "{kind:>8}: loss {:.4} -> {:.4}, checkpoints at {:?}",
            losses[0],
            losses[losses.len() - 1],
            report.checkpoints
        );
    }
    Ok(())
}
