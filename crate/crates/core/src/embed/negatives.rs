use crate::kg::{EntityId, KnowledgeGraph, Triple};
use rand::Rng;

/// Rejection attempts per negative before accepting a known-true candidate.
pub const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SamplingStats {
    pub sampled: usize,
    /// Candidates accepted despite being known-true.
    pub warnings: usize,
}

/// Draws `k` corruptions of `t`, each replacing the head or the tail (fair
/// coin) by a uniform entity, rejecting triples present in any split.
pub fn sample_negatives<R: Rng + ?Sized>(
    kg: &KnowledgeGraph,
    t: Triple,
    k: usize,
    rng: &mut R,
    stats: &mut SamplingStats,
) -> Vec<Triple> {
    let n = kg.num_entities() as u32;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut attempts = 0;
        let candidate = loop {
            let e = EntityId(rng.gen_range(0..n));
            let c = if rng.gen_bool(0.5) {
                Triple::new(e, t.relation, t.tail)
            } else {
                Triple::new(t.head, t.relation, e)
            };
            if !kg.is_known(&c) {
                break c;
            }
            attempts += 1;
            if attempts >= MAX_REJECTIONS {
                stats.warnings += 1;
                break c;
            }
        };
        stats.sampled += 1;
        out.push(candidate);
    }
    out
}
