use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pdc_core::data::{ColumnKind, SchemaHints};
use pdc_core::eval::CvConfig;
use pdc_core::learners::{ForestMode, ForestParams, KnnParams, LearnerSpec, SplitMode, TreeParams};
use pdc_core::{AnchorPolicy, PairWeighting, PdcConfig};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pdc", version, about = "Pairwise difference classification")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PDC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on a CSV file and save it as JSON.
    Fit(FitArgs),
    /// Score a CSV file with a saved model.
    Predict(PredictArgs),
    /// Cross-validate the base learner against its pairwise wrapper.
    Evaluate(EvaluateArgs),
    /// Loss as a function of the number of anchors.
    Anchors(AnchorsArgs),
    /// Run `evaluate` on every CSV file in a directory and count wins.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Base {
    Tree,
    Extra,
    Forest,
    ExtraForest,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Balanced,
    None,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Target column (default: last column).
    #[arg(long)]
    pub target: Option<String>,

    /// Ordinal column with its categories from low to high, e.g. `size=S,M,L`.
    #[arg(long = "ordinal", value_name = "COL=CATS")]
    pub ordinal: Vec<String>,

    /// Force a column to be treated as nominal.
    #[arg(long = "nominal", value_name = "COL")]
    pub nominal: Vec<String>,
}

impl DataArgs {
    pub fn hints(&self) -> Result<SchemaHints, CliError> {
        let mut hints = SchemaHints::new();
        for spec in &self.ordinal {
            let (col, cats) = spec
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--ordinal expects COL=CATS, got `{spec}`")))?;
            let categories: Vec<String> = cats.split(',').map(|c| c.trim().to_string()).collect();
            if col.trim().is_empty() || categories.iter().any(String::is_empty) {
                return Err(CliError::Usage(format!("malformed --ordinal `{spec}`")));
            }
            hints.insert(col.trim().to_string(), ColumnKind::Ordinal { categories });
        }
        for col in &self.nominal {
            hints.insert(col.clone(), ColumnKind::Nominal);
        }
        Ok(hints)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LearnerArgs {
    /// Base learner.
    #[arg(long, value_enum, default_value_t = Base::Tree)]
    pub base: Base,

    /// Maximum tree depth (default: unlimited).
    #[arg(long)]
    pub max_depth: Option<usize>,

    #[arg(long, default_value_t = 1)]
    pub min_samples_leaf: usize,

    /// Features examined per split (default: all).
    #[arg(long)]
    pub max_features: Option<usize>,

    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    pub n_trees: usize,

    /// Neighbours for k-NN.
    #[arg(long, default_value_t = 3)]
    pub k: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl LearnerArgs {
    pub fn spec(&self) -> Result<LearnerSpec, CliError> {
        if self.min_samples_leaf == 0 {
            return Err(CliError::Usage("--min-samples-leaf must be >= 1".into()));
        }
        if self.max_features == Some(0) {
            return Err(CliError::Usage("--max-features must be >= 1".into()));
        }
        let tree = |split_mode| TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            max_features: self.max_features,
            split_mode,
            seed: self.seed,
            ..Default::default()
        };
        let forest = |mode| ForestParams {
            n_trees: self.n_trees,
            mode,
            tree: tree(SplitMode::Exact),
            seed: self.seed,
            ..Default::default()
        };
        Ok(match self.base {
            Base::Tree => LearnerSpec::Tree(tree(SplitMode::Exact)),
            Base::Extra => LearnerSpec::Tree(tree(SplitMode::Random)),
            Base::Forest => LearnerSpec::Forest(forest(ForestMode::Bagging)),
            Base::ExtraForest => LearnerSpec::Forest(forest(ForestMode::Extra)),
            Base::Knn => LearnerSpec::Knn(KnnParams { k: self.k }),
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PdcArgs {
    /// Leave out (x, x) pairs when building the pair dataset.
    #[arg(long)]
    pub no_self_pairs: bool,

    /// Pair sample weighting.
    #[arg(long, value_enum, default_value_t = Weighting::Balanced)]
    pub weighting: Weighting,

    /// Keep a random subset of this many anchors (default: all training rows).
    #[arg(long)]
    pub anchors: Option<usize>,

    /// Add-one smoothing of the class prior.
    #[arg(long)]
    pub prior_smoothing: bool,
}

impl PdcArgs {
    pub fn config(&self, seed: u64) -> PdcConfig {
        PdcConfig {
            include_self_pairs: !self.no_self_pairs,
            weighting: match self.weighting {
                Weighting::Balanced => PairWeighting::Balanced,
                Weighting::None => PairWeighting::None,
            },
            anchor_policy: match self.anchors {
                None => AnchorPolicy::All,
                Some(count) => AnchorPolicy::Subsample { count, seed },
            },
            prior_smoothing: self.prior_smoothing,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CvArgs {
    #[arg(long, default_value_t = 5)]
    pub folds: usize,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    /// Plain instead of stratified folds.
    #[arg(long)]
    pub no_stratify: bool,

    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Paired t-test over matched folds instead of the two-sample test.
    #[arg(long)]
    pub paired: bool,

    /// Tune depth / trees / k on each training fold with this many inner folds.
    #[arg(long, value_name = "FOLDS")]
    pub inner_search: Option<usize>,
}

impl CvArgs {
    pub fn config(&self, seed: u64) -> Result<CvConfig, CliError> {
        if self.folds < 2 {
            return Err(CliError::Usage("--folds must be >= 2".into()));
        }
        if self.repeats == 0 {
            return Err(CliError::Usage("--repeats must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(CliError::Usage("--alpha must lie in (0, 1]".into()));
        }
        if self.inner_search.is_some_and(|f| f < 2) {
            return Err(CliError::Usage("--inner-search must be >= 2".into()));
        }
        Ok(CvConfig {
            folds: self.folds,
            repeats: self.repeats,
            seed,
            stratified: !self.no_stratify,
            inner_folds: self.inner_search,
        })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Training CSV.
    pub data: PathBuf,

    #[command(flatten)]
    pub data_args: DataArgs,

    #[command(flatten)]
    pub learner: LearnerArgs,

    /// Wrap the base learner as a pairwise classifier.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub pdc: Switch,

    #[command(flatten)]
    pub pdc_args: PdcArgs,

    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Model written by `fit`.
    pub model: PathBuf,

    /// CSV to score; the target column is optional.
    pub data: PathBuf,

    /// Add one probability column per class.
    #[arg(long)]
    pub proba: bool,

    /// Add total, aleatoric and epistemic uncertainty columns (pairwise models only).
    #[arg(long)]
    pub uncertainty: bool,

    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    pub data: PathBuf,

    #[command(flatten)]
    pub data_args: DataArgs,

    #[command(flatten)]
    pub learner: LearnerArgs,

    #[command(flatten)]
    pub pdc_args: PdcArgs,

    #[command(flatten)]
    pub cv: CvArgs,

    /// Also evaluate the pairwise wrapper on the same folds.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub pdc_compare: Switch,

    /// Directory for folds.csv, summary.json and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct AnchorsArgs {
    pub data: PathBuf,

    #[command(flatten)]
    pub data_args: DataArgs,

    #[command(flatten)]
    pub learner: LearnerArgs,

    #[command(flatten)]
    pub pdc_args: PdcArgs,

    /// Anchor counts, comma separated (default: powers of two). 1 and the
    /// full anchor count are always added.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,

    /// Random anchor subsets per size.
    #[arg(long, default_value_t = 30)]
    pub repeats: usize,

    /// One in this many rows (stratified) is held out for scoring.
    #[arg(long, default_value_t = 3)]
    pub holdout_folds: usize,

    /// Directory for curve.csv, fit.json and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchmarkArgs {
    /// Directory of CSV files; each uses its last column as the target.
    pub dir: PathBuf,

    #[command(flatten)]
    pub learner: LearnerArgs,

    #[command(flatten)]
    pub pdc_args: PdcArgs,

    #[command(flatten)]
    pub cv: CvArgs,

    /// Directory for benchmark.csv, summary.json and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}
