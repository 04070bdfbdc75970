use newsgraph::encoders::ModelKind;
use newsgraph::features::{FeatureConfig, FeatureMode, FeatureProvider};
use newsgraph::fixtures::{check_model_gradients, fixture_graph};
use newsgraph::graph::TypedGraph;
use newsgraph::numerics::ParameterStore;
use newsgraph::scoring::{train, train_model, BatchMode, LossReport, Model, TrainConfig};
use newsgraph::Error;

const GRAD_TOL: f64 = 1e-4;

fn graph() -> TypedGraph {
    fixture_graph().augment_with_inverses().unwrap()
}

fn config(kind: ModelKind) -> TrainConfig {
    TrainConfig {
        dim: 16,
        epochs: 20,
        batch_size: 4,
        ..TrainConfig::for_model(kind)
    }
}

fn features(g: &TypedGraph, mode: FeatureMode, dim: usize) -> FeatureProvider {
    FeatureProvider::new(g, FeatureConfig { mode, dim, ..FeatureConfig::default() })
}

fn run(g: &TypedGraph, cfg: &TrainConfig, mode: FeatureMode) -> (ParameterStore, Vec<LossReport>) {
    let (_, store, trace) = train(g, cfg, features(g, mode, cfg.dim)).unwrap();
    (store, trace)
}

#[test]
fn zero_epochs_returns_initial_parameters() {
    let g = graph();
    let cfg = TrainConfig { epochs: 0, ..config(ModelKind::Rgcn) };
    let model = Model::new(&g, &cfg, features(&g, FeatureMode::LearnedTable, 16)).unwrap();
    let initial = model.init_params(&g);
    let mut store = initial.clone();
    let trace = train_model(&model, &mut store, &g, &cfg).unwrap();
    assert!(trace.is_empty());
    assert!(store.values_equal(&initial));
}

#[test]
fn zero_learning_rate_leaves_parameters_untouched() {
    let g = graph();
    for (kind, mode) in [
        (ModelKind::Rgcn, FeatureMode::LearnedTable),
        (ModelKind::HetGnn, FeatureMode::Hybrid),
        (ModelKind::Hgt, FeatureMode::Hybrid),
    ] {
        let cfg = TrainConfig { learning_rate: 0.0, epochs: 3, ..config(kind) };
        let model = Model::new(&g, &cfg, features(&g, mode, 16)).unwrap();
        let initial = model.init_params(&g);
        let mut store = initial.clone();
        let trace = train_model(&model, &mut store, &g, &cfg).unwrap();
        assert_eq!(trace.len(), 3);
        assert!(store.values_equal(&initial), "{kind}");
    }
}

#[test]
fn fixture_rgcn_loss_decreases() {
    let g = graph();
    let cfg = TrainConfig { epochs: 200, seed: 42, ..config(ModelKind::Rgcn) };
    let (_, trace) = run(&g, &cfg, FeatureMode::LearnedTable);
    assert_eq!(trace.len(), 200);
    assert_eq!(trace[0].epoch, 1);
    let (first, last) = (trace[0].loss, trace[199].loss);
    assert!(last < first, "first {first} last {last}");
    assert!(trace.iter().all(|r| r.loss.is_finite()));
}

#[test]
fn content_models_reduce_loss() {
    let g = graph();
    for kind in [ModelKind::HetGnn, ModelKind::Hgt] {
        let cfg = TrainConfig { epochs: 40, learning_rate: 0.01, ..config(kind) };
        let (_, trace) = run(&g, &cfg, FeatureMode::Hybrid);
        assert!(trace.last().unwrap().loss < trace[0].loss, "{kind}");
    }
}

#[test]
fn identical_configs_give_identical_parameters() {
    let g = graph();
    for (kind, mode) in [
        (ModelKind::Rgcn, FeatureMode::LearnedTable),
        (ModelKind::HetGnn, FeatureMode::Hybrid),
        (ModelKind::Hgt, FeatureMode::Hybrid),
    ] {
        let cfg = config(kind);
        let (a, ta) = run(&g, &cfg, mode);
        let (b, tb) = run(&g, &cfg, mode);
        assert!(a.values_equal(&b), "{kind}");
        assert_eq!(ta, tb);

        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (c, tc) = pool.install(|| run(&g, &cfg, mode));
        assert!(a.values_equal(&c), "{kind} single-threaded");
        assert_eq!(ta, tc);

        let (d, _) = run(&g, &TrainConfig { seed: cfg.seed + 1, ..cfg.clone() }, mode);
        assert!(!a.values_equal(&d), "{kind} ignores the seed");
    }
}

#[test]
fn mismatched_batch_mode_is_rejected() {
    let g = graph();
    let cfg = TrainConfig { batch_mode: BatchMode::MiniBatch, ..config(ModelKind::Rgcn) };
    match train(&g, &cfg, features(&g, FeatureMode::LearnedTable, 16)) {
        Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "train.mode"),
        other => panic!("{:?}", other.map(|r| r.2)),
    }
    let cfg = TrainConfig { batch_mode: BatchMode::FullBatch, ..config(ModelKind::Hgt) };
    assert!(matches!(
        train(&g, &cfg, features(&g, FeatureMode::Hybrid, 16)),
        Err(Error::InvalidConfig { .. })
    ));
}

#[test]
fn feature_width_must_match() {
    let g = graph();
    assert!(matches!(
        train(&g, &config(ModelKind::Rgcn), features(&g, FeatureMode::LearnedTable, 8)),
        Err(Error::InvalidConfig { .. })
    ));
}

#[test]
fn unaugmented_graph_is_rejected() {
    let g = fixture_graph();
    for (kind, mode) in [(ModelKind::Rgcn, FeatureMode::LearnedTable), (ModelKind::HetGnn, FeatureMode::Hybrid)] {
        assert!(matches!(
            train(&g, &config(kind), features(&g, mode, 16)),
            Err(Error::NotAugmented)
        ));
    }
}

#[test]
fn model_gradients_match_finite_differences() {
    for kind in [ModelKind::Rgcn, ModelKind::HetGnn, ModelKind::Hgt] {
        let report = check_model_gradients(kind, 8, 42).unwrap();
        assert!(report.checked > 100, "{kind}: {} coordinates", report.checked);
        assert!(report.max_rel_error < GRAD_TOL, "{kind}: {:?}", report);
    }
}

#[test]
fn gradient_check_refuses_wide_models() {
    assert!(matches!(check_model_gradients(ModelKind::Rgcn, 128, 1), Err(Error::Guard(_))));
}
