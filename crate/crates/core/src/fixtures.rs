//! A ten-node graph and the finite-difference checks run against it.

use crate::encoders::{DropoutKey, Mode, ModelKind};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureMode, FeatureProvider};
use crate::graph::schema::{ARTICLE, AUTHOR, CITES, HAS_TOPIC, INSTITUTE, IS_AFFILIATED_WITH, IS_AUTHOR_OF, PAPER, TOPIC};
use crate::graph::{GraphBuilder, GraphSchema, Triple, TypedGraph};
use crate::numerics::rng::derive_seed;
use crate::numerics::{finite_diff_check_steps, GradCheckReport};
use crate::scoring::{epoch_negatives, train_model, Model, TrainConfig};

/// Largest width accepted by [`check_model_gradients`].
pub const MAX_GRADCHECK_DIM: usize = 16;
/// Step ladder for the central differences, largest first.
pub const GRADCHECK_STEPS: [f64; 3] = [3e-4, 3e-5, 3e-6];
pub const WARMUP_EPOCHS: usize = 30;

/// Two topics, three articles, two papers, two authors, one institute;
/// twelve triples over all four relations. Articles and papers carry
/// titles, articles carry dates.
pub fn fixture_graph() -> TypedGraph {
    let mut b = GraphBuilder::new(GraphSchema::scientific_news());
    let t: Vec<_> = (0..2).map(|i| b.node(TOPIC, &format!("t{i}"))).collect();
    let a: Vec<_> = (0..3).map(|i| b.node(ARTICLE, &format!("a{i}"))).collect();
    let p: Vec<_> = (0..2).map(|i| b.node(PAPER, &format!("p{i}"))).collect();
    let au: Vec<_> = (0..2).map(|i| b.node(AUTHOR, &format!("au{i}"))).collect();
    let inst = b.node(INSTITUTE, "i0");
    for (h, r, tl) in [
        (a[0], CITES, p[0]),
        (a[0], CITES, p[1]),
        (a[1], CITES, p[1]),
        (a[2], CITES, p[1]),
        (a[0], HAS_TOPIC, t[0]),
        (a[1], HAS_TOPIC, t[0]),
        (a[1], HAS_TOPIC, t[1]),
        (a[2], HAS_TOPIC, t[1]),
        (au[0], IS_AUTHOR_OF, p[0]),
        (au[1], IS_AUTHOR_OF, p[0]),
        (au[1], IS_AUTHOR_OF, p[1]),
        (au[0], IS_AFFILIATED_WITH, inst),
        (au[1], IS_AFFILIATED_WITH, inst),
    ] {
        b.add_triple(Triple::new(h, r, tl));
    }
    let titles = [
        (a[0], "Vaccine trial shows strong immune response"),
        (a[1], "Immune response fades, new study finds"),
        (a[2], "Ocean heat sets another record"),
        (p[0], "Phase 3 vaccine efficacy"),
        (p[1], "Marine heatwaves and ocean warming"),
    ];
    for (node, title) in titles {
        b.attributes_mut(node).title = Some(title.to_string());
    }
    for (node, day) in [(a[0], 18_480), (a[1], 18_530), (a[2], 18_590)] {
        b.attributes_mut(node).published_date = Some(day);
    }
    b.build()
}

/// Compares analytic and central-difference gradients of the training loss
/// for `kind` on the fixture, over every parameter coordinate: hybrid
/// features (title attention, learned tables, projection), the encoder
/// (with edge dropout active where the model uses it) and the decoder.
pub fn check_model_gradients(kind: ModelKind, dim: usize, seed: u64) -> Result<GradCheckReport> {
    if dim > MAX_GRADCHECK_DIM {
        return Err(Error::Guard(format!(
            "gradient check limited to dim <= {MAX_GRADCHECK_DIM}, got {dim}"
        )));
    }
    let g = fixture_graph().augment_with_inverses()?;
    let mut cfg = TrainConfig::for_model(kind);
    cfg.dim = dim;
    cfg.seed = seed;
    cfg.heads = if dim % 4 == 0 { 4 } else { 1 };
    if kind == ModelKind::Hgt {
        cfg.dropout_rate = 0.2;
    }
    let features = FeatureProvider::new(
        &g,
        FeatureConfig {
            mode: FeatureMode::Hybrid,
            dim,
            ..FeatureConfig::default()
        },
    );
    let model = Model::new(&g, &cfg, features)?;
    let mut store = model.init_params(&g);
    let warm = TrainConfig {
        epochs: WARMUP_EPOCHS,
        learning_rate: 0.01,
        ..cfg.clone()
    };
    train_model(&model, &mut store, &g, &warm)?;
    let positives: Vec<Triple> = g.original_triples().copied().collect();
    let negatives = epoch_negatives(&g, &positives, 2, derive_seed(seed, "negatives"), 0)?;
    let key = DropoutKey { seed, epoch: 0 };
    let mut failure = None;
    let report = finite_diff_check_steps(&mut store, &GRADCHECK_STEPS, usize::MAX, seed, |s| {
        match model.batch_loss(s, &g, &positives, &negatives, Mode::Training, key) {
            Ok((loss, _, _)) => loss,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(report),
    }
}
