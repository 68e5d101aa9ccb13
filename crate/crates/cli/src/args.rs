use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mtlens",
    version,
    about = "Translation-artifact analysis for multilingual question corpora",
    args_override_self = true,
    after_help = "Exit status: 0 success, 1 domain error, 2 usage error.\n\
                  A config file (--config FILE, before the subcommand) supplies defaults as\n\
                  `key = value` lines under `[subcommand]` sections; flags override it."
)]
pub struct Cli {
    /// Defaults for subcommand flags, see below.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Round-trip translate a corpus through a pivot language.
    Roundtrip(RoundtripArgs),
    /// Translate a non-English corpus into English.
    TranslateTest(TranslateTestArgs),
    /// Macro-averaged type/token ratio and lexical density.
    Diversity(DiversityArgs),
    /// Corpus BLEU or chrF.
    MtScore(MtScoreArgs),
    /// Human-vs-machine origin detector.
    #[command(subcommand)]
    Detector(DetectorCommand),
    /// Fréchet distance between two embedding files.
    Fid(FidArgs),
    /// FID of each evaluation set against human and MT training embeddings.
    FidReport(FidReportArgs),
    /// MERGE and TAG data augmentation.
    #[command(subcommand)]
    Augment(AugmentCommand),
    /// Accuracy per group of question ids.
    GroupAccuracy(GroupAccuracyArgs),
    /// Paired t-test between two score lists.
    Ttest(TtestArgs),
    /// Combine JSON results into one report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long = "in", value_name = "CORPUS")]
    pub input: PathBuf,
    #[arg(long)]
    pub pivot: String,
    /// `mock:DICT.json`, an http(s) endpoint, or a JSON backend config file.
    #[arg(long)]
    pub backend: String,
    /// Forward decoding, e.g. `nucleus:0.9,no_repeat=5`.
    #[arg(long)]
    pub fwd: Option<String>,
    /// Backward decoding, e.g. `beam:5,no_repeat=5`.
    #[arg(long)]
    pub bwd: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TranslateTestArgs {
    #[arg(long = "in", value_name = "CORPUS")]
    pub input: PathBuf,
    #[arg(long)]
    pub backend: String,
    /// Source language; taken from the corpus when omitted.
    #[arg(long)]
    pub lang: Option<String>,
    /// Decoding, default `beam:4`.
    #[arg(long)]
    pub decoding: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[arg(long = "in", value_name = "CORPUS")]
    pub input: PathBuf,
    /// One function word per line; the built-in English list by default.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum MetricArg {
    Bleu,
    Chrf,
}

#[derive(Debug, Args)]
pub struct MtScoreArgs {
    /// Hypotheses: one per line, or a .jsonl corpus aligned to --ref by id.
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, value_enum, default_value = "bleu")]
    pub metric: MetricArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum DetectorCommand {
    Train(TrainArgs),
    Score(ScoreArgs),
    Split(SplitArgs),
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub human: PathBuf,
    #[arg(long)]
    pub machine: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub l2: f64,
    #[arg(long, default_value_t = 1 << 18)]
    pub hash_dim: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in", value_name = "CORPUS")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in", value_name = "CORPUS")]
    pub input: PathBuf,
    #[arg(long)]
    pub human_like: PathBuf,
    #[arg(long)]
    pub nmt_like: PathBuf,
    /// Also write `{id: "human_like" | "nmt_like"}` for group-accuracy.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub human: PathBuf,
    #[arg(long)]
    pub machine: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FidArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = mtlens::reprdist::DEFAULT_EPS)]
    pub eps: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FidReportArgs {
    #[arg(long)]
    pub train_human: PathBuf,
    #[arg(long)]
    pub train_mt: PathBuf,
    /// Evaluation set as NAME=PATH; repeatable.
    #[arg(long = "eval", value_name = "NAME=PATH", required = true)]
    pub evals: Vec<String>,
    #[arg(long, default_value_t = mtlens::reprdist::DEFAULT_EPS)]
    pub eps: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum AugmentCommand {
    Merge(MergeArgs),
    Tag(TagArgs),
    Untag(TagArgs),
    MergeTag(MergeArgs),
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(long)]
    pub human: PathBuf,
    #[arg(long)]
    pub machine: PathBuf,
    #[arg(long, default_value = mtlens::augment::DEFAULT_TAG_TOKEN)]
    pub tag_token: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[arg(long = "in", value_name = "CORPUS")]
    pub input: PathBuf,
    #[arg(long, default_value = mtlens::augment::DEFAULT_TAG_TOKEN)]
    pub tag_token: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GroupAccuracyArgs {
    /// JSON object mapping sample id to predicted answer.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// JSON object mapping sample id to group label.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Count missing predictions as wrong instead of failing.
    #[arg(long)]
    pub allow_missing: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TtestArgs {
    /// Scores: a JSON array or whitespace-separated numbers.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A JSON result file as NAME=PATH; repeatable.
    #[arg(long = "part", value_name = "NAME=PATH", required = true)]
    pub parts: Vec<String>,
    #[command(flatten)]
    pub output: Output,
}
