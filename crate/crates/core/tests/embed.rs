use kgbench::embed::loss::{batch_loss, loss_and_gradient, loss_and_gradient_sharded};
use kgbench::embed::{
    checkpoint_path, complex, distmult, export_features, load_checkpoint, read_checkpoint,
    sample_negatives, save_checkpoint, train, transe, write_checkpoint, DirectorySink, EmbedError,
    EmbeddingModel, Example, LossConfig, MemorySink, ModelKind, NoCheckpoints, SamplingStats,
    TrainConfig,
};
use kgbench::fixtures::random_kg;
use kgbench::kg::{EntityId, RelationId, Triple};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config(kind: ModelKind) -> TrainConfig {
    let mut cfg = TrainConfig::new(kind, 8);
    cfg.epochs = 6;
    cfg.checkpoint_every = 2;
    cfg.batch_size = 16;
    cfg
}

fn vec_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

proptest! {
    #[test]
    fn distmult_is_symmetric(h in vec_strategy(7), r in vec_strategy(7), t in vec_strategy(7)) {
        prop_assert_eq!(distmult(&h, &r, &t), distmult(&t, &r, &h));
    }

    #[test]
    fn complex_reduces_to_distmult(h in vec_strategy(5), r in vec_strategy(5), t in vec_strategy(5)) {
        let z = vec![0.0; 5];
        prop_assert_eq!(complex((&h, &z), (&r, &z), (&t, &z)), distmult(&h, &r, &t));
    }

    #[test]
    fn complex_conjugate_swaps_arguments(h in vec_strategy(4), hi in vec_strategy(4), r in vec_strategy(4), ri in vec_strategy(4), t in vec_strategy(4), ti in vec_strategy(4)) {
        // Re(<r, h, conj t>) = Re(<conj r, t, conj h>)
        let neg: Vec<f64> = ri.iter().map(|x| -x).collect();
        let a = complex((&h, &hi), (&r, &ri), (&t, &ti));
        let b = complex((&t, &ti), (&r, &neg), (&h, &hi));
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn transe_non_positive(h in vec_strategy(6), r in vec_strategy(6), t in vec_strategy(6)) {
        let s = transe(&h, &r, &t);
        prop_assert!(s <= 0.0);
        let shifted: Vec<f64> = h.iter().zip(&r).map(|(a, b)| a + b).collect();
        prop_assert_eq!(transe(&h, &r, &shifted), 0.0);
    }

    #[test]
    fn sharding_does_not_change_the_gradient(seed in 0u64..1000, shards in 1usize..5) {
        let model = EmbeddingModel::init(ModelKind::DistMult, 6, 10, 2, seed);
        let batch: Vec<Example> = (0..7u32)
            .map(|i| Example {
                positive: Triple::new(EntityId(i), RelationId(i % 2), EntityId((i + 2) % 10)),
                negatives: vec![Triple::new(EntityId(i), RelationId(i % 2), EntityId((i + 5) % 10))],
            })
            .collect();
        let cfg = LossConfig::default();
        let (l1, g1) = loss_and_gradient(&model, &batch, &cfg);
        let (l2, g2) = loss_and_gradient_sharded(&model, &batch, &cfg, shards);
        prop_assert!((l1 - l2).abs() < 1e-12);
        prop_assert!((batch_loss(&model, &batch, &cfg) - l1).abs() < 1e-12);
        for (table, row) in g1.touched() {
            for c in 0..6 {
                prop_assert!((g1.get(table, row, c) - g2.get(table, row, c)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn training_is_deterministic() {
    let kg = random_kg(30, 3, 200, 1);
    for kind in ModelKind::ALL {
        let cfg = small_config(kind);
        let (a, ra) = train(&kg, &cfg, &mut NoCheckpoints).unwrap();
        let (b, rb) = train(&kg, &cfg, &mut NoCheckpoints).unwrap();
        assert_eq!(a, b, "{kind}");
        assert_eq!(ra.epoch_losses, rb.epoch_losses);
        let mut other = cfg.clone();
        other.seed = 9;
        assert_ne!(train(&kg, &other, &mut NoCheckpoints).unwrap().0, a);
    }
}

#[test]
fn sharded_training_matches_serial() {
    let kg = random_kg(30, 3, 200, 2);
    let cfg = small_config(ModelKind::ComplEx);
    let mut sharded = cfg.clone();
    sharded.shards = 4;
    let (a, _) = train(&kg, &cfg, &mut NoCheckpoints).unwrap();
    let (b, _) = train(&kg, &sharded, &mut NoCheckpoints).unwrap();
    for (x, y) in a.entity.as_slice().iter().zip(b.entity.as_slice()) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn checkpoints_at_every_interval() {
    let kg = random_kg(20, 2, 100, 3);
    let cfg = small_config(ModelKind::TransE);
    let mut sink = MemorySink::default();
    let (last, report) = train(&kg, &cfg, &mut sink).unwrap();
    let epochs: Vec<usize> = sink.checkpoints.iter().map(|c| c.0).collect();
    assert_eq!(epochs, [2, 4, 6]);
    assert_eq!(report.checkpoints, [2, 4, 6]);
    assert_eq!(sink.checkpoints[2].1, last);
    assert_eq!(report.epoch_losses.len(), 6);
    // entity vectors stay in the unit ball
    for row in last.entity.iter_rows() {
        assert!(row.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12);
    }
}

#[test]
fn checkpoint_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let kg = random_kg(20, 2, 100, 4);
    let cfg = small_config(ModelKind::ComplEx);
    let mut sink = DirectorySink::new(dir.path()).unwrap();
    let (model, _) = train(&kg, &cfg, &mut sink).unwrap();
    let path = checkpoint_path(dir.path(), ModelKind::ComplEx, 8, 6);
    assert_eq!(path.file_name().unwrap(), "complex_d8_e006.kge");
    let (back, epoch) = load_checkpoint(&path).unwrap();
    assert_eq!((back, epoch), (model.clone(), 6));
    let mut buf = Vec::new();
    write_checkpoint(&mut buf, &model, 3).unwrap();
    assert_eq!(&buf[..4], b"KGE1");
    buf.truncate(buf.len() - 1);
    assert!(read_checkpoint(&mut buf.as_slice()).is_err());
    let other = dir.path().join("x.kge");
    save_checkpoint(&other, &model, 1).unwrap();
    assert_eq!(load_checkpoint(&other).unwrap().1, 1);
}

#[test]
fn invalid_configs_are_rejected() {
    let kg = random_kg(10, 1, 30, 0);
    let mut cfg = small_config(ModelKind::DistMult);
    cfg.checkpoint_every = 4;
    assert!(matches!(
        train(&kg, &cfg, &mut NoCheckpoints),
        Err(EmbedError::Config(_))
    ));
    let mut cfg = small_config(ModelKind::DistMult);
    cfg.learning_rate = f64::NAN;
    assert!(matches!(
        train(&kg, &cfg, &mut NoCheckpoints),
        Err(EmbedError::Config(_))
    ));
}

#[test]
fn divergence_is_reported() {
    let kg = random_kg(20, 2, 150, 5);
    let mut cfg = small_config(ModelKind::DistMult);
    cfg.learning_rate = 1e200;
    assert!(matches!(
        train(&kg, &cfg, &mut NoCheckpoints),
        Err(EmbedError::NonFinite { .. })
    ));
}

#[test]
fn negatives_avoid_known_triples() {
    let kg = random_kg(50, 2, 200, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut stats = SamplingStats::default();
    for t in kg.triples(kgbench::kg::Split::Train) {
        for n in sample_negatives(&kg, *t, 3, &mut rng, &mut stats) {
            assert!(!kg.is_known(&n));
            assert_eq!(n.relation, t.relation);
            assert!(n.head == t.head || n.tail == t.tail);
        }
    }
    assert_eq!(stats.warnings, 0);
}

#[test]
fn feature_export_layout() {
    let model = EmbeddingModel::init(ModelKind::ComplEx, 3, 4, 1, 0);
    let m = export_features(&model, &[EntityId(2), EntityId(0)]).unwrap();
    assert_eq!((m.rows(), m.cols()), (2, 6));
    assert_eq!(&m.row(0)[..3], model.entity.row(2));
    assert_eq!(&m.row(0)[3..], model.entity_im.as_ref().unwrap().row(2));
    assert!(export_features(&model, &[EntityId(9)]).is_err());
}
