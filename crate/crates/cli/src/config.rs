//! Sectioned `key = value` run configuration.
//!
//! ```text
//! [graph]
//! edges = data/edges.tsv
//! attributes = data/attributes.tsv
//!
//! [train]
//! model = rgcn
//! epochs = 400
//! ```
//!
//! `#` starts a comment line. Relative paths resolve against the config
//! file's directory. Sections: `graph`, `synth`, `features`, `train`,
//! `split`, `eval`. Keys absent from the file take their defaults; for
//! `train` those depend on `train.model`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use newsgraph::encoders::ModelKind;
use newsgraph::eval::{Directions, SplitSpec, UseCase};
use newsgraph::features::{FeatureConfig, FeatureMode};
use newsgraph::graph::{format_date, parse_date};
use newsgraph::scoring::{BatchMode, TrainConfig};
use newsgraph::synth::SynthConfig;
use newsgraph::{Error, Result};

const SECTIONS: [&str; 6] = ["graph", "synth", "features", "train", "split", "eval"];

/// Raw entries of a config file, keyed `section.key`, with source lines.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: IndexMap<String, (String, usize)>,
    base_dir: PathBuf,
}

impl ConfigFile {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut entries = IndexMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            if let Some(name) = s.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(line, s, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(Error::config(line, name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::config(line, s, "expected `key = value`"))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| Error::config(line, k.trim(), "key outside any section"))?;
            let key = format!("{sec}.{}", k.trim());
            if let Some((_, first)) = entries.get(&key) {
                return Err(Error::config(line, key, format!("already set on line {first}")));
            }
            entries.insert(key, (v.trim().to_string(), line));
        }
        Ok(ConfigFile {
            entries,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l)
    }
}

/// Typed reader over a [`ConfigFile`] that tracks which keys were consumed.
struct Reader<'a> {
    file: &'a ConfigFile,
    used: HashSet<&'a str>,
}

impl<'a> Reader<'a> {
    fn raw(&mut self, key: &str) -> Option<(&'a str, usize)> {
        let (k, (v, l)) = self.file.entries.get_key_value(key)?;
        self.used.insert(k.as_str());
        Some((v.as_str(), *l))
    }

    fn with<T>(&mut self, key: &str, slot: &mut T, parse: impl Fn(&str) -> Option<T>, expect: &str) -> Result<()> {
        if let Some((v, line)) = self.raw(key) {
            *slot = parse(v).ok_or_else(|| Error::config(line, key, format!("expected {expect}, got `{v}`")))?;
        }
        Ok(())
    }

    fn num<T: FromStr>(&mut self, key: &str, slot: &mut T) -> Result<()> {
        self.with(key, slot, |v| v.parse().ok(), "a number")
    }

    fn flag(&mut self, key: &str, slot: &mut bool) -> Result<()> {
        self.with(key, slot, |v| v.parse().ok(), "true or false")
    }

    fn path(&mut self, key: &str, slot: &mut Option<PathBuf>) -> Result<()> {
        let base = self.file.base_dir.clone();
        self.with(key, slot, |v| Some(Some(base.join(v))), "a path")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphPaths {
    pub edges: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    pub spec: SplitSpec,
    /// When false, every triple is both trained on and evaluated.
    pub holdout: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub use_cases: Vec<UseCase>,
    pub directions: Directions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: GraphPaths,
    pub synth: SynthConfig,
    pub features: FeatureConfig,
    pub train: TrainConfig,
    pub split: SplitConfig,
    pub eval: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: GraphPaths {
                edges: None,
                attributes: None,
            },
            synth: SynthConfig::default(),
            features: FeatureConfig::default(),
            train: TrainConfig::for_model(ModelKind::Rgcn),
            split: SplitConfig {
                spec: SplitSpec::default(),
                holdout: true,
            },
            eval: EvalConfig {
                use_cases: vec![UseCase::A, UseCase::B],
                directions: Directions::TailOnly,
            },
        }
    }
}

fn parse_use_cases(v: &str) -> Option<Vec<UseCase>> {
    match v {
        "both" => Some(vec![UseCase::A, UseCase::B]),
        _ => UseCase::parse(v).map(|u| vec![u]),
    }
}

fn use_cases_str(u: &[UseCase]) -> &'static str {
    match u {
        [UseCase::A] => "A",
        [UseCase::B] => "B",
        _ => "both",
    }
}

impl RunConfig {
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        let mut r = Reader {
            file,
            used: HashSet::new(),
        };
        let mut c = RunConfig::default();

        r.path("graph.edges", &mut c.graph.edges)?;
        r.path("graph.attributes", &mut c.graph.attributes)?;

        let s = &mut c.synth;
        for (key, slot) in [
            ("synth.topics", &mut s.topics),
            ("synth.articles", &mut s.articles),
            ("synth.papers", &mut s.papers),
            ("synth.authors", &mut s.authors),
            ("synth.institutes", &mut s.institutes),
            ("synth.cites", &mut s.cites),
            ("synth.has_topic", &mut s.has_topic),
            ("synth.is_author_of", &mut s.is_author_of),
            ("synth.is_affiliated_with", &mut s.is_affiliated_with),
            ("synth.title_vocab_size", &mut s.title_vocab_size),
        ] {
            r.num(key, slot)?;
        }
        r.num("synth.seed", &mut s.seed)?;
        r.with(
            "synth.planted_blocks",
            &mut s.planted_blocks,
            |v| if v == "none" { Some(None) } else { v.parse().ok().map(Some) },
            "a count or `none`",
        )?;
        r.num("synth.planted_noise", &mut s.planted_noise)?;
        r.num("synth.planted_affinity", &mut s.planted_affinity)?;
        r.num("synth.planted_skew", &mut s.planted_skew)?;
        r.num("synth.planted_locality", &mut s.planted_locality)?;

        let mut kind = ModelKind::Rgcn;
        r.with("train.model", &mut kind, ModelKind::parse, "rgcn, hetgnn or hgt")?;
        let t = &mut c.train;
        *t = TrainConfig::for_model(kind);
        r.num("train.dim", &mut t.dim)?;
        r.num("train.epochs", &mut t.epochs)?;
        r.num("train.learning_rate", &mut t.learning_rate)?;
        r.num("train.dropout_rate", &mut t.dropout_rate)?;
        r.num("train.negatives", &mut t.negatives_per_positive)?;
        r.num("train.batch_size", &mut t.batch_size)?;
        r.num("train.seed", &mut t.seed)?;
        r.with("train.mode", &mut t.batch_mode, BatchMode::parse, "full-batch or mini-batch")?;
        r.num("train.heads", &mut t.heads)?;
        r.num("train.rwr_restart", &mut t.rwr.restart)?;
        r.num("train.rwr_walk_length", &mut t.rwr.walk_length)?;
        r.num("train.rwr_samples", &mut t.rwr.samples)?;
        r.num("train.beta1", &mut t.beta1)?;
        r.num("train.beta2", &mut t.beta2)?;
        r.num("train.eps", &mut t.eps)?;

        let f = &mut c.features;
        f.dim = c.train.dim;
        r.with("features.mode", &mut f.mode, FeatureMode::parse, "learned-table, title-text or hybrid")?;
        r.num("features.dim", &mut f.dim)?;
        r.num("features.token_seed", &mut f.token_seed)?;
        r.with("features.reference_date", &mut f.reference_date, parse_date, "a YYYY-MM-DD date")?;

        r.num("split.seed", &mut c.split.spec.seed)?;
        r.flag("split.stratified", &mut c.split.spec.stratified)?;
        r.flag("split.holdout", &mut c.split.holdout)?;

        r.with("eval.use_case", &mut c.eval.use_cases, parse_use_cases, "A, B or both")?;
        r.with("eval.directions", &mut c.eval.directions, Directions::parse, "tail or both")?;

        if let Some((key, (_, line))) = file.entries.iter().find(|(k, _)| !r.used.contains(k.as_str())) {
            return Err(Error::config(*line, key.clone(), "unknown key"));
        }
        c.validate().map_err(|e| locate(e, file))?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_file(&ConfigFile::load(path)?)
    }

    /// Cross-field checks of the train, synth and feature sections.
    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.synth.validate()?;
        if self.features.dim != self.train.dim {
            return Err(Error::InvalidConfig {
                key: "features.dim".into(),
                msg: format!("{} differs from train.dim {}", self.features.dim, self.train.dim),
            });
        }
        Ok(())
    }

    /// Every effective value in config-file syntax; parses back to `self`
    /// (paths become absolute).
    pub fn to_config_string(&self) -> String {
        let mut o = String::new();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        o.push_str("[graph]\n");
        if let Some(p) = path(&self.graph.edges) {
            writeln!(o, "edges = {p}").unwrap();
        }
        if let Some(p) = path(&self.graph.attributes) {
            writeln!(o, "attributes = {p}").unwrap();
        }
        let s = &self.synth;
        writeln!(o, "\n[synth]").unwrap();
        for (k, v) in [
            ("topics", s.topics),
            ("articles", s.articles),
            ("papers", s.papers),
            ("authors", s.authors),
            ("institutes", s.institutes),
            ("cites", s.cites),
            ("has_topic", s.has_topic),
            ("is_author_of", s.is_author_of),
            ("is_affiliated_with", s.is_affiliated_with),
            ("title_vocab_size", s.title_vocab_size),
        ] {
            writeln!(o, "{k} = {v}").unwrap();
        }
        writeln!(o, "seed = {}", s.seed).unwrap();
        match s.planted_blocks {
            Some(b) => writeln!(o, "planted_blocks = {b}").unwrap(),
            None => writeln!(o, "planted_blocks = none").unwrap(),
        }
        writeln!(o, "planted_noise = {:?}", s.planted_noise).unwrap();
        writeln!(o, "planted_affinity = {:?}", s.planted_affinity).unwrap();
        writeln!(o, "planted_skew = {:?}", s.planted_skew).unwrap();
        writeln!(o, "planted_locality = {:?}", s.planted_locality).unwrap();

        let f = &self.features;
        writeln!(o, "\n[features]").unwrap();
        writeln!(o, "mode = {}", f.mode.as_str()).unwrap();
        writeln!(o, "dim = {}", f.dim).unwrap();
        writeln!(o, "token_seed = {}", f.token_seed).unwrap();
        writeln!(o, "reference_date = {}", format_date(f.reference_date)).unwrap();

        let t = &self.train;
        writeln!(o, "\n[train]").unwrap();
        writeln!(o, "model = {}", t.model_kind).unwrap();
        writeln!(o, "mode = {}", t.batch_mode.as_str()).unwrap();
        writeln!(o, "dim = {}", t.dim).unwrap();
        writeln!(o, "epochs = {}", t.epochs).unwrap();
        writeln!(o, "learning_rate = {:?}", t.learning_rate).unwrap();
        writeln!(o, "dropout_rate = {:?}", t.dropout_rate).unwrap();
        writeln!(o, "negatives = {}", t.negatives_per_positive).unwrap();
        writeln!(o, "batch_size = {}", t.batch_size).unwrap();
        writeln!(o, "seed = {}", t.seed).unwrap();
        writeln!(o, "heads = {}", t.heads).unwrap();
        writeln!(o, "rwr_restart = {:?}", t.rwr.restart).unwrap();
        writeln!(o, "rwr_walk_length = {}", t.rwr.walk_length).unwrap();
        writeln!(o, "rwr_samples = {}", t.rwr.samples).unwrap();
        writeln!(o, "beta1 = {:?}", t.beta1).unwrap();
        writeln!(o, "beta2 = {:?}", t.beta2).unwrap();
        writeln!(o, "eps = {:?}", t.eps).unwrap();

        writeln!(o, "\n[split]").unwrap();
        writeln!(o, "seed = {}", self.split.spec.seed).unwrap();
        writeln!(o, "stratified = {}", self.split.spec.stratified).unwrap();
        writeln!(o, "holdout = {}", self.split.holdout).unwrap();

        writeln!(o, "\n[eval]").unwrap();
        writeln!(o, "use_case = {}", use_cases_str(&self.eval.use_cases)).unwrap();
        writeln!(o, "directions = {}", self.eval.directions.as_str()).unwrap();
        o
    }
}

/// Attaches the source line to validation errors on keys set in the file.
fn locate(e: Error, file: &ConfigFile) -> Error {
    match e {
        Error::InvalidConfig { key, msg } => match file.line_of(&key) {
            Some(line) => Error::Config { line, key, msg },
            None => Error::InvalidConfig { key, msg },
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_file(&ConfigFile::parse(text, Path::new("/cfg"))?)
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn model_choice_sets_its_defaults() {
        let c = parse("[train]\nmodel = hgt\n").unwrap();
        assert_eq!(c.train, TrainConfig::for_model(ModelKind::Hgt));
        let c = parse("[train]\nmodel = rgcn\nepochs = 3\ndim = 16\n").unwrap();
        assert_eq!((c.train.epochs, c.train.dim, c.features.dim), (3, 16, 16));
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let c = parse("[graph]\nedges = g/e.tsv\n").unwrap();
        assert_eq!(c.graph.edges.unwrap(), PathBuf::from("/cfg/g/e.tsv"));
    }

    #[test]
    fn errors_name_key_and_line() {
        let err = parse("# c\n[train]\nepochs = 3\nepoks = 4\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 4, key, .. } if key == "train.epoks"), "{err}");
        let err = parse("[train]\nlearning_rate = fast\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 2, .. }), "{err}");
        let err = parse("[nope]\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 1, .. }), "{err}");
        let err = parse("epochs = 3\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 1, .. }), "{err}");
        let err = parse("[train]\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 3, .. }), "{err}");
    }

    #[test]
    fn invariant_violations_point_at_the_offending_line() {
        let err = parse("[train]\nmodel = hgt\n\nmode = full-batch\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 4, key, .. } if key == "train.mode"), "{err}");
        let err = parse("[train]\ndropout_rate = 1.5\n").unwrap_err();
        assert!(matches!(&err, Error::Config { line: 2, .. }), "{err}");
    }

    #[test]
    fn config_string_round_trips() {
        let text = "[graph]\nedges = e.tsv\n[synth]\nplanted_blocks = 2\nplanted_noise = 0.25\n\
                    [train]\nmodel = hetgnn\nlearning_rate = 0.003\n[features]\nmode = hybrid\n\
                    reference_date = 2020-09-01\n[split]\nholdout = false\n[eval]\nuse_case = B\ndirections = both\n";
        let c = parse(text).unwrap();
        let again = parse(&c.to_config_string()).unwrap();
        assert_eq!(c, again);
        assert_eq!(parse(&RunConfig::default().to_config_string()).unwrap(), RunConfig::default());
    }
}
