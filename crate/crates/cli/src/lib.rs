//! Experiment driver behind the `mvopls` binary.
//!
//! Every command reads a flat `key = value` configuration file, runs
//! deterministically from the configured seed and writes its report into the
//! output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mvopls::data::{load_dataset, pca_reduce, save_dataset, split_indices, write_atomic, PcaModel};
use mvopls::deep::{train, Activation, DeepModel, MlpConfig, TrainerConfig};
use mvopls::eval::{
    accuracy, cross_modal_retrieve, knn1_classify, mean_std, train_linear_classifier, RetrievalResult,
};
use mvopls::framework::{embed, Embedding};
use mvopls::io::{join_list, save_deep_model, save_model, KeyValues};
use mvopls::toy::{generate, ToyConfig};
use mvopls::{Error, MethodConfig, MethodId, MultiViewDataset};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.5;
pub const DEFAULT_PCA_ENERGY: f64 = 0.95;
pub const DEFAULT_RETRIEVAL_K: usize = 20;
pub const DEFAULT_DEEP_WIDTH: usize = 64;

const KNOWN_KEYS: &[&str] = &[
    "dataset",
    "method",
    "k",
    "gamma",
    "lambda",
    "pca",
    "pca_energy",
    "train_fraction",
    "repeats",
    "seed",
    "classifier",
    "out",
    "deep",
    "hidden",
    "activation",
    "epochs",
    "learning_rate",
    "deep_width",
    "toy_classes",
    "toy_n",
    "toy_views",
    "toy_dims",
    "toy_latent",
    "toy_separation",
    "toy_noise",
    "sweep_k",
    "sweep_train_fraction",
    "sweep_lambda",
    "sweep_depth",
    "sweep_metric",
];

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Directory(PathBuf),
    Toy(ToyConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Linear,
    Knn1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Map,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeepSettings {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Hidden width used when sweeping depth.
    pub width: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub k: Option<Vec<usize>>,
    pub train_fraction: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub depth: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub method: MethodId,
    /// Empty when the config leaves `k` unset.
    pub k: Vec<usize>,
    pub gamma: f64,
    pub lambda: f64,
    pub pca_energy: Option<f64>,
    pub train_fraction: f64,
    pub repeats: usize,
    pub seed: u64,
    pub classifier: ClassifierKind,
    pub deep: Option<DeepSettings>,
    pub out: Option<PathBuf>,
    pub sweep: SweepAxes,
    pub sweep_metric: Metric,
}

fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidParameter(message.into())
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> mvopls::Result<Self> {
        ExperimentConfig::from_key_values(&KeyValues::read(path)?)
    }

    /// Relative paths are resolved against the directory of the config file.
    pub fn from_key_values(kv: &KeyValues) -> mvopls::Result<Self> {
        if let Some(key) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(invalid(format!("unknown config key `{key}`")));
        }
        let base = kv.origin().parent().map(Path::to_path_buf).unwrap_or_default();
        let seed = kv.get("seed")?.unwrap_or(0);

        let dataset = match kv.get_str("dataset") {
            None => return Err(invalid("missing key `dataset` (a directory or `toy`)")),
            Some("toy") => {
                let defaults = ToyConfig::default();
                let mut dims = kv.get_list("toy_dims")?.unwrap_or(defaults.dims);
                if let Some(views) = kv.get::<usize>("toy_views")? {
                    if dims.len() == 1 {
                        dims = vec![dims[0]; views];
                    } else if dims.len() != views {
                        return Err(invalid(format!(
                            "toy_views = {views} but toy_dims lists {} views",
                            dims.len()
                        )));
                    }
                }
                DatasetSource::Toy(ToyConfig {
                    classes: kv.get("toy_classes")?.unwrap_or(defaults.classes),
                    n: kv.get("toy_n")?.unwrap_or(defaults.n),
                    dims,
                    latent: kv.get("toy_latent")?.unwrap_or(defaults.latent),
                    separation: kv.get("toy_separation")?.unwrap_or(defaults.separation),
                    noise: kv.get("toy_noise")?.unwrap_or(defaults.noise),
                    seed,
                })
            }
            Some(dir) => DatasetSource::Directory(base.join(dir)),
        };

        let k = kv.get_list::<usize>("k")?.unwrap_or_default();
        if kv.get_str("k").is_some() && k.is_empty() {
            return Err(invalid("`k` is empty"));
        }
        let pca_energy = if kv.get("pca")?.unwrap_or(false) {
            Some(kv.get("pca_energy")?.unwrap_or(DEFAULT_PCA_ENERGY))
        } else {
            None
        };
        let classifier = match kv.get_str("classifier").unwrap_or("linear") {
            "linear" => ClassifierKind::Linear,
            "knn1" => ClassifierKind::Knn1,
            other => return Err(invalid(format!("unknown classifier `{other}` (linear, knn1)"))),
        };
        let deep = if kv.get("deep")?.unwrap_or(false) {
            let hidden: Vec<usize> = kv
                .get_list("hidden")?
                .unwrap_or_else(|| vec![DEFAULT_DEEP_WIDTH, DEFAULT_DEEP_WIDTH]);
            Some(DeepSettings {
                width: kv
                    .get("deep_width")?
                    .unwrap_or_else(|| hidden.first().copied().unwrap_or(DEFAULT_DEEP_WIDTH)),
                hidden,
                activation: kv.get("activation")?.unwrap_or(Activation::Tanh),
                epochs: kv.get("epochs")?.unwrap_or(200),
                learning_rate: kv.get("learning_rate")?.unwrap_or(1e-3),
            })
        } else {
            None
        };
        let sweep = SweepAxes {
            k: kv.get_list("sweep_k")?,
            train_fraction: kv.get_list("sweep_train_fraction")?,
            lambda: kv.get_list("sweep_lambda")?,
            depth: kv.get_list("sweep_depth")?,
        };
        let sweep_metric = match kv.get_str("sweep_metric").unwrap_or("accuracy") {
            "accuracy" => Metric::Accuracy,
            "map" => Metric::Map,
            other => return Err(invalid(format!("unknown sweep metric `{other}` (accuracy, map)"))),
        };

        let cfg = ExperimentConfig {
            dataset,
            method: kv.get("method")?.unwrap_or(MethodId::MvOpls),
            k,
            gamma: kv.get("gamma")?.unwrap_or(mvopls::framework::DEFAULT_GAMMA),
            lambda: kv.get("lambda")?.unwrap_or(mvopls::methods::DEFAULT_LAMBDA),
            pca_energy,
            train_fraction: kv.get("train_fraction")?.unwrap_or(DEFAULT_TRAIN_FRACTION),
            repeats: kv.get("repeats")?.unwrap_or(1),
            seed,
            classifier,
            deep,
            out: kv.get_str("out").map(|o| base.join(o)),
            sweep,
            sweep_metric,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> mvopls::Result<()> {
        if self.repeats == 0 {
            return Err(invalid("repeats must be at least 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.k.contains(&0) {
            return Err(invalid("k values must be at least 1"));
        }
        if let Some(e) = self.pca_energy {
            if !(e > 0.0 && e <= 1.0) {
                return Err(invalid(format!("pca_energy must lie in (0, 1], got {e}")));
            }
        }
        if let Some(deep) = &self.deep {
            if deep.epochs == 0 || deep.width == 0 || deep.hidden.contains(&0) {
                return Err(invalid("deep epochs and layer widths must be positive"));
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let DatasetSource::Toy(toy) = &mut self.dataset {
            toy.seed = seed;
        }
        self
    }

    pub fn load_dataset(&self) -> mvopls::Result<MultiViewDataset> {
        match &self.dataset {
            DatasetSource::Directory(dir) => load_dataset(dir),
            DatasetSource::Toy(toy) => generate(toy),
        }
    }

    fn require_k(&self, command: &str) -> mvopls::Result<&[usize]> {
        if self.k.is_empty() {
            return Err(invalid(format!("`{command}` needs `k` in the config")));
        }
        Ok(&self.k)
    }

    fn method_config(&self, k: usize, lambda: f64) -> MethodConfig {
        MethodConfig::new(self.method, k)
            .with_gamma(self.gamma)
            .with_lambda(lambda)
    }
}

/// One evaluation run's settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub k: usize,
    pub lambda: f64,
    pub train_fraction: f64,
    /// Network hidden widths; `None` for the linear model.
    pub hidden: Option<Vec<usize>>,
}

enum Fitted {
    Linear(mvopls::SubspaceModel),
    Deep(Box<DeepModel>),
}

impl Fitted {
    fn embed(&self, ds: &MultiViewDataset) -> mvopls::Result<Embedding> {
        match self {
            Fitted::Linear(m) => embed(m, ds),
            Fitted::Deep(m) => m.embed(ds.views()),
        }
    }

    fn eigenvalues(&self) -> &[f64] {
        match self {
            Fitted::Linear(m) => &m.eigenvalues,
            Fitted::Deep(m) => &m.model.eigenvalues,
        }
    }
}

fn fit_model(
    cfg: &ExperimentConfig,
    run: &RunSettings,
    ds: &MultiViewDataset,
    seed: u64,
) -> mvopls::Result<Fitted> {
    let method = cfg.method_config(run.k, run.lambda);
    match (&run.hidden, &cfg.deep) {
        (Some(hidden), Some(deep)) => {
            let bound = ds.total_dim();
            if run.k > bound {
                return Err(Error::InvalidDimension { k: run.k, bound });
            }
            let mlp = MlpConfig::new(hidden.clone(), run.k, deep.activation, seed);
            let trainer = TrainerConfig::new(method)
                .with_epochs(deep.epochs)
                .with_learning_rate(deep.learning_rate);
            Ok(Fitted::Deep(Box::new(train(ds, &mlp, &trainer)?)))
        }
        _ => Ok(Fitted::Linear(mvopls::methods::fit(&method, ds)?)),
    }
}

fn reduce(
    cfg: &ExperimentConfig,
    ds: &MultiViewDataset,
) -> mvopls::Result<(MultiViewDataset, Option<PcaModel>)> {
    match cfg.pca_energy {
        Some(e) => {
            let (reduced, model) = pca_reduce(ds, e)?;
            Ok((reduced, Some(model)))
        }
        None => Ok((ds.clone(), None)),
    }
}

struct SplitEmbeddings {
    train: Embedding,
    test: Embedding,
    train_labels: Option<Vec<usize>>,
    test_labels: Option<Vec<usize>>,
}

/// Splits, reduces with PCA fitted on the training side, fits and embeds both sides.
fn run_split(
    cfg: &ExperimentConfig,
    run: &RunSettings,
    ds: &MultiViewDataset,
    seed: u64,
) -> mvopls::Result<SplitEmbeddings> {
    let (train_idx, test_idx) = split_indices(ds, run.train_fraction, seed)?;
    let train_ds = ds.subset(&train_idx)?;
    let test_ds = ds.subset(&test_idx)?;
    let (train_ds, pca) = reduce(cfg, &train_ds)?;
    let test_ds = match &pca {
        Some(p) => p.transform(&test_ds)?,
        None => test_ds,
    };
    let model = fit_model(cfg, run, &train_ds, seed)?;
    Ok(SplitEmbeddings {
        train: model.embed(&train_ds)?,
        test: model.embed(&test_ds)?,
        train_labels: train_ds.labels().map(|l| l.indices().to_vec()),
        test_labels: test_ds.labels().map(|l| l.indices().to_vec()),
    })
}

fn classification_accuracy(
    cfg: &ExperimentConfig,
    run: &RunSettings,
    ds: &MultiViewDataset,
    seed: u64,
) -> mvopls::Result<f64> {
    let labels = ds.require_labels("classification")?;
    let num_classes = labels.num_classes();
    let split = run_split(cfg, run, ds, seed)?;
    let (Some(train_labels), Some(test_labels)) = (split.train_labels, split.test_labels) else {
        return Err(Error::MissingLabels("classification".into()));
    };
    let predicted = match cfg.classifier {
        ClassifierKind::Linear => {
            train_linear_classifier(&split.train.concatenated, &train_labels, num_classes)?
                .predict(&split.test.concatenated)?
        }
        ClassifierKind::Knn1 => {
            knn1_classify(&split.train.concatenated, &train_labels, &split.test.concatenated)?
        }
    };
    Ok(accuracy(&predicted, &test_labels))
}

/// Items are relevant when they share a class, or are the paired sample when unlabeled.
fn retrieval(
    cfg: &ExperimentConfig,
    run: &RunSettings,
    ds: &MultiViewDataset,
    seed: u64,
) -> mvopls::Result<RetrievalResult> {
    if ds.v() != 2 {
        return Err(invalid(format!("retrieval needs exactly 2 views, dataset has {}", ds.v())));
    }
    let split = run_split(cfg, run, ds, seed)?;
    let relevance = split
        .test_labels
        .unwrap_or_else(|| (0..split.test.concatenated.ncols()).collect());
    cross_modal_retrieve(
        &split.test.per_view[0],
        &relevance,
        &split.test.per_view[1],
        &relevance,
    )
}

fn base_run(cfg: &ExperimentConfig, k: usize) -> RunSettings {
    RunSettings {
        k,
        lambda: cfg.lambda,
        train_fraction: cfg.train_fraction,
        hidden: cfg.deep.as_ref().map(|d| d.hidden.clone()),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn output_dir(cfg: &ExperimentConfig, out: Option<&Path>) -> anyhow::Result<PathBuf> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| invalid("no output directory; pass --out or set `out`"))?;
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// Fits on the whole dataset and writes the model directory. Returns the
/// printed spectrum report.
pub fn cmd_fit(cfg: &ExperimentConfig, out: Option<&Path>) -> anyhow::Result<String> {
    let k = *cfg.require_k("fit")?.first().unwrap_or(&1);
    if cfg.k.len() > 1 {
        bail!(invalid("`fit` takes a single k"));
    }
    let ds = cfg.load_dataset().context("loading dataset")?;
    let (reduced, pca) = reduce(cfg, &ds).context("PCA")?;
    let dir = output_dir(cfg, out)?;
    let model = fit_model(cfg, &base_run(cfg, k), &reduced, cfg.seed).context("fitting")?;
    match &model {
        Fitted::Linear(m) => save_model(m, &dir)?,
        Fitted::Deep(m) => save_deep_model(m, &dir)?,
    }
    if let Some(p) = &pca {
        for (s, (mean, loading)) in p.means.iter().zip(&p.loadings).enumerate() {
            mvopls::data::write_csv_matrix(&dir.join(format!("pca_{}.csv", s + 1)), loading)?;
            let mean = mvopls::Mat::from_column_slice(mean.len(), 1, mean.as_slice());
            mvopls::data::write_csv_matrix(&dir.join(format!("pca_mean_{}.csv", s + 1)), &mean)?;
        }
    }
    let mut report = format!("method = {}\nk = {k}\n", cfg.method);
    let _ = writeln!(report, "dims = {}", join_list(&reduced.dims()));
    let _ = writeln!(report, "eigenvalues = {}", join_list(model.eigenvalues()));
    Ok(report)
}

/// One CSV row per k: mean and std accuracy over the repeats, then every run.
pub fn cmd_classify(cfg: &ExperimentConfig, out: Option<&Path>) -> anyhow::Result<String> {
    let ks = cfg.require_k("classify")?;
    let ds = cfg.load_dataset().context("loading dataset")?;
    let dir = output_dir(cfg, out)?;
    let mut csv = String::from("k,mean_accuracy,std_accuracy");
    for r in 0..cfg.repeats {
        let _ = write!(csv, ",run_{}", r + 1);
    }
    csv.push('\n');
    let mut report = String::new();
    for &k in ks {
        let run = base_run(cfg, k);
        let accs = (0..cfg.repeats as u64)
            .map(|r| classification_accuracy(cfg, &run, &ds, cfg.seed + r))
            .collect::<mvopls::Result<Vec<_>>>()
            .with_context(|| format!("classification with k = {k}"))?;
        let (mean, std) = mean_std(&accs);
        let runs: Vec<String> = accs.iter().map(|&a| fmt(a)).collect();
        let _ = writeln!(csv, "{k},{},{},{}", fmt(mean), fmt(std), runs.join(","));
        let _ = writeln!(report, "k = {k}: accuracy {} ± {}", fmt(mean), fmt(std));
    }
    write_atomic(&dir.join("classify.csv"), &csv)?;
    Ok(report)
}

/// Cross-modal mAP between the two views of the held-out split.
pub fn cmd_retrieve(cfg: &ExperimentConfig, out: Option<&Path>) -> anyhow::Result<String> {
    let k = match cfg.k.as_slice() {
        [] => DEFAULT_RETRIEVAL_K,
        [k] => *k,
        _ => bail!(invalid("`retrieve` takes a single k")),
    };
    let ds = cfg.load_dataset().context("loading dataset")?;
    if ds.v() != 2 {
        bail!(invalid(format!("retrieval needs exactly 2 views, dataset has {}", ds.v())));
    }
    let dir = output_dir(cfg, out)?;
    let run = base_run(cfg, k);
    let results = (0..cfg.repeats as u64)
        .map(|r| retrieval(cfg, &run, &ds, cfg.seed + r))
        .collect::<mvopls::Result<Vec<_>>>()
        .context("retrieval")?;
    let column = |f: fn(&RetrievalResult) -> f64| -> Vec<f64> { results.iter().map(f).collect() };
    let mut text = format!("method = {}\nk = {k}\nrepeats = {}\n", cfg.method, cfg.repeats);
    for (name, values) in [
        ("map_a_to_b", column(|r| r.map_a_to_b)),
        ("map_b_to_a", column(|r| r.map_b_to_a)),
        ("map_mean", column(|r| r.map_mean)),
    ] {
        let (mean, std) = mean_std(&values);
        let runs: Vec<String> = values.iter().map(|&x| fmt(x)).collect();
        let _ = writeln!(text, "{name} = {}", fmt(mean));
        let _ = writeln!(text, "{name}_std = {}", fmt(std));
        let _ = writeln!(text, "{name}_runs = {}", runs.join(","));
    }
    write_atomic(&dir.join("retrieve.txt"), &text)?;
    Ok(text)
}

fn sorted<T: Clone>(values: &[T], cmp: impl Fn(&T, &T) -> std::cmp::Ordering) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_by(cmp);
    v
}

/// Cross product over the configured sweep axes. Axes left unset keep the
/// base setting; depth 0 stands for the linear model.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> anyhow::Result<String> {
    let axes = &cfg.sweep;
    if axes.k.is_none()
        && axes.train_fraction.is_none()
        && axes.lambda.is_none()
        && axes.depth.is_none()
    {
        bail!(invalid(
            "sweep needs at least one of sweep_k, sweep_train_fraction, sweep_lambda, sweep_depth"
        ));
    }
    for (name, empty) in [
        ("sweep_k", axes.k.as_ref().is_some_and(Vec::is_empty)),
        ("sweep_train_fraction", axes.train_fraction.as_ref().is_some_and(Vec::is_empty)),
        ("sweep_lambda", axes.lambda.as_ref().is_some_and(Vec::is_empty)),
        ("sweep_depth", axes.depth.as_ref().is_some_and(Vec::is_empty)),
    ] {
        if empty {
            bail!(invalid(format!("`{name}` is empty")));
        }
    }
    if axes.depth.is_some() && cfg.deep.is_none() {
        bail!(invalid("sweep_depth needs `deep = true`"));
    }
    let default_k = match (cfg.k.first(), cfg.sweep_metric) {
        (Some(&k), _) => k,
        (None, Metric::Map) => DEFAULT_RETRIEVAL_K,
        (None, Metric::Accuracy) if axes.k.is_some() => 0,
        (None, Metric::Accuracy) => *cfg.require_k("sweep")?.first().unwrap_or(&1),
    };
    let ks = sorted(axes.k.as_deref().unwrap_or(&[default_k]), Ord::cmp);
    let fractions = sorted(
        axes.train_fraction.as_deref().unwrap_or(&[cfg.train_fraction]),
        f64::total_cmp,
    );
    let lambdas = sorted(axes.lambda.as_deref().unwrap_or(&[cfg.lambda]), f64::total_cmp);
    let base_depth = cfg.deep.as_ref().map_or(0, |d| d.hidden.len() + 1);
    let depths = sorted(axes.depth.as_deref().unwrap_or(&[base_depth]), Ord::cmp);
    if ks.contains(&0) || fractions.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
        bail!(invalid("sweep values out of range: k >= 1 and train fraction in (0, 1)"));
    }
    if axes.depth.is_some() && depths.contains(&0) {
        bail!(invalid("sweep_depth values must be at least 1"));
    }

    let ds = cfg.load_dataset().context("loading dataset")?;
    let dir = output_dir(cfg, out)?;
    let metric = match cfg.sweep_metric {
        Metric::Accuracy => "accuracy",
        Metric::Map => "map",
    };
    let mut csv = String::from("k,train_fraction,lambda,depth,metric,mean,std\n");
    for &k in &ks {
        for &train_fraction in &fractions {
            for &lambda in &lambdas {
                for &depth in &depths {
                    let hidden = cfg.deep.as_ref().map(|d| {
                        if axes.depth.is_some() {
                            vec![d.width; depth - 1]
                        } else {
                            d.hidden.clone()
                        }
                    });
                    let run = RunSettings {
                        k,
                        lambda,
                        train_fraction,
                        hidden,
                    };
                    let values = (0..cfg.repeats as u64)
                        .map(|r| match cfg.sweep_metric {
                            Metric::Accuracy => classification_accuracy(cfg, &run, &ds, cfg.seed + r),
                            Metric::Map => retrieval(cfg, &run, &ds, cfg.seed + r).map(|x| x.map_mean),
                        })
                        .collect::<mvopls::Result<Vec<_>>>()
                        .with_context(|| {
                            format!("sweep cell k={k} train_fraction={train_fraction} lambda={lambda} depth={depth}")
                        })?;
                    let (mean, std) = mean_std(&values);
                    let _ = writeln!(
                        csv,
                        "{k},{train_fraction},{lambda},{depth},{metric},{},{}",
                        fmt(mean),
                        fmt(std)
                    );
                }
            }
        }
    }
    write_atomic(&dir.join("sweep.csv"), &csv)?;
    Ok(csv)
}

/// Writes the configured toy dataset (or the default one) as CSV files.
pub fn cmd_gen_toy(cfg: Option<&ExperimentConfig>, seed: Option<u64>, out: &Path) -> anyhow::Result<String> {
    let mut toy = match cfg.map(|c| &c.dataset) {
        Some(DatasetSource::Toy(t)) => t.clone(),
        Some(DatasetSource::Directory(_)) => bail!(invalid("gen-toy needs `dataset = toy`")),
        None => ToyConfig::default(),
    };
    if let Some(s) = seed {
        toy.seed = s;
    }
    let ds = generate(&toy)?;
    save_dataset(&ds, out)?;
    Ok(format!(
        "wrote {} samples, {} classes, views {} to {}\n",
        ds.n(),
        toy.classes,
        join_list(&ds.dims()),
        out.display()
    ))
}

/// 3 for numerical failures, 2 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<Error>())
        .any(Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}
