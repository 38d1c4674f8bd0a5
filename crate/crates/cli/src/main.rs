//! `noisy-forge`: corpus augmentation and evaluation toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (alignment,
//! encoding, bad records), 3 I/O error. Diagnostics go to stderr; data
//! goes to stdout or the path given with `-o`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use noisy_forge_core::bpe::{
    apply_bpe_tokens, count_words, learn_bpe_with_min_freq, undo_bpe, BpeModel,
};
use noisy_forge_core::filters::{
    dedup_pairs, length_ratio_filter, LengthUnit, RatioFilterConfig, Side,
};
use noisy_forge_core::fuzzy::{augment_mono, augment_parallel, FuzzyConfig};
use noisy_forge_core::metrics::{bleu, corpus_wer};
use noisy_forge_core::pipeline::{
    assemble_asr, assemble_bt, assemble_ft, build_finetune_set, merge_directions,
    FinetuneComponent,
};
use noisy_forge_core::{
    corpus_stats, detokenize, fix_french_punctuation, load_mono, load_parallel, load_tsv,
    read_lines, tokenize, write_tsv, Corpus, DataOrigin, Error, Result, TagConfig, TokenSeq,
};

#[derive(Parser)]
#[command(
    name = "noisy-forge",
    version,
    about = "Corpus augmentation and evaluation toolkit for noisy machine translation"
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LangArgs {
    /// Source language code.
    #[arg(long, default_value = "en", value_name = "CODE")]
    src_lang: String,
    /// Target language code.
    #[arg(long, default_value = "fr", value_name = "CODE")]
    tgt_lang: String,
}

#[derive(Args)]
struct CorpusInput {
    /// TSV corpus: source TAB target per line.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["src", "tgt"])]
    tsv: Option<PathBuf>,
    /// Source-side line file (use together with --tgt).
    #[arg(long, value_name = "FILE", requires = "tgt")]
    src: Option<PathBuf>,
    /// Target-side line file (use together with --src).
    #[arg(long, value_name = "FILE", requires = "src")]
    tgt: Option<PathBuf>,
}

impl CorpusInput {
    fn load(&self, langs: &LangArgs, origin: DataOrigin) -> Result<Corpus> {
        match (&self.tsv, &self.src, &self.tgt) {
            (Some(tsv), None, None) => load_tsv(tsv, &langs.src_lang, &langs.tgt_lang, origin),
            (None, Some(src), Some(tgt)) => {
                load_parallel(src, tgt, &langs.src_lang, &langs.tgt_lang, origin)
            }
            _ => Err(Error::InvalidConfig(
                "provide --tsv FILE, or --src FILE with --tgt FILE".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Parallel,
    Mono,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Source,
    Target,
}

impl From<SideArg> for Side {
    fn from(side: SideArg) -> Side {
        match side {
            SideArg::Source => Side::Source,
            SideArg::Target => Side::Target,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Tokens,
    Chars,
}

impl From<UnitArg> for LengthUnit {
    fn from(unit: UnitArg) -> LengthUnit {
        match unit {
            UnitArg::Tokens => LengthUnit::Tokens,
            UnitArg::Chars => LengthUnit::Chars,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AssembleMode {
    /// Forward translation: mono is the source side, hyp the target.
    Ft,
    /// Back translation: mono is the target side, hyp the source.
    Bt,
    /// ASR transcripts paired with translations, ratio-filtered.
    Asr,
}

#[derive(Subcommand)]
enum Command {
    /// Split stdin lines into space-separated tokens.
    Tokenize {
        /// Language code controlling the rule set.
        #[arg(long, default_value = "en", value_name = "CODE")]
        lang: String,
        /// Write data here instead of stdout.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Join token lines from stdin back into plain text.
    Detok {
        /// Language code controlling the rule set.
        #[arg(long, default_value = "en", value_name = "CODE")]
        lang: String,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Normalize apostrophes and paired quotes on stdin lines.
    FixPunct {
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Prepend the origin's tag to each stdin line (or strip it).
    Tag {
        /// Data origin whose tag is applied.
        #[arg(long, value_name = "NAME")]
        origin: String,
        /// JSON file mapping origin names to tag tokens.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Remove the tag instead of adding it.
        #[arg(long)]
        strip: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Learn a BPE merge table from stdin lines.
    BpeLearn {
        /// Maximum number of merges to learn.
        #[arg(long, default_value_t = 50_000, value_name = "N")]
        merges: usize,
        /// Stop once no pair occurs at least this often.
        #[arg(long, default_value_t = 2, value_name = "F")]
        min_freq: u64,
        /// Write the model here instead of stdout.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Split whitespace tokens from stdin into subwords with @@ marks.
    BpeApply {
        /// Merge table produced by bpe-learn.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Rejoin @@-marked subwords from stdin into full tokens.
    BpeUndo {
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Mine fuzzy matches in a corpus and emit new pairs as TSV.
    FuzzyAugment {
        /// Match within the parallel corpus, or mono lines against it.
        #[arg(long, value_enum, default_value = "parallel")]
        mode: ModeArg,
        /// Normalized edit-distance threshold; lower is stricter.
        #[arg(long, default_value_t = 0.5, value_name = "X")]
        lambda: f64,
        /// Candidates retrieved per sentence in indexed mode.
        #[arg(long, default_value_t = 10, value_name = "K")]
        top_k: usize,
        /// Minimum candidate Jaccard overlap in indexed mode.
        #[arg(long, default_value_t = 0.0, value_name = "X")]
        min_jaccard: f64,
        /// Score every sentence pair instead of using the index.
        #[arg(long)]
        exhaustive: bool,
        /// Keep emitted pairs that duplicate existing ones.
        #[arg(long)]
        no_dedup: bool,
        /// Write one JSON match record per line to this file.
        #[arg(long, value_name = "FILE")]
        manifest: Option<PathBuf>,
        /// Monolingual lines to match (mode mono only).
        #[arg(long, value_name = "FILE")]
        mono: Option<PathBuf>,
        #[command(flatten)]
        input: CorpusInput,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Drop pairs whose side-length ratio exceeds a threshold.
    FilterRatio {
        /// Side whose length is the ratio numerator.
        #[arg(long, value_enum, default_value = "target")]
        num: SideArg,
        /// Side whose length is the ratio denominator.
        #[arg(long, value_enum, default_value = "source")]
        den: SideArg,
        /// Keep pairs with ratio <= lambda; zero denominators are removed.
        #[arg(long, default_value_t = 1.5, value_name = "X")]
        lambda: f64,
        /// Length unit for both sides.
        #[arg(long, value_enum, default_value = "tokens")]
        unit: UnitArg,
        /// Write removed pairs here as TSV.
        #[arg(long, value_name = "FILE")]
        removed: Option<PathBuf>,
        #[command(flatten)]
        input: CorpusInput,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Remove duplicate pairs, keeping first occurrences.
    Dedup {
        #[command(flatten)]
        input: CorpusInput,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Word error rate of hypothesis lines against reference lines.
    Wer {
        /// Reference transcript, one sentence per line.
        #[arg(long, value_name = "FILE")]
        refs: PathBuf,
        /// Hypotheses, line-aligned with the references.
        #[arg(long, value_name = "FILE")]
        hyps: PathBuf,
        /// Language code for tokenization.
        #[arg(long, default_value = "en", value_name = "CODE")]
        lang: String,
        /// Lowercase both sides before scoring.
        #[arg(long)]
        uncased: bool,
        /// Drop punctuation-only tokens before scoring.
        #[arg(long)]
        strip_punct: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Corpus BLEU of hypothesis lines against reference lines.
    Bleu {
        /// References, one sentence per line.
        #[arg(long, value_name = "FILE")]
        refs: PathBuf,
        /// Hypotheses, line-aligned with the references.
        #[arg(long, value_name = "FILE")]
        hyps: PathBuf,
        /// Lowercase both sides before scoring.
        #[arg(long)]
        uncased: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Merge a reverse-direction TSV into a forward-direction TSV.
    MergeDirections {
        /// Forward-direction corpus (src-lang -> tgt-lang).
        #[arg(value_name = "AB_TSV")]
        ab: PathBuf,
        /// Reverse-direction corpus (tgt-lang -> src-lang), swapped in.
        #[arg(value_name = "BA_TSV")]
        ba: PathBuf,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Pair monolingual lines with their translations.
    Assemble {
        #[arg(long, value_enum)]
        mode: AssembleMode,
        /// Monolingual input lines.
        #[arg(long, value_name = "FILE")]
        mono: PathBuf,
        /// Machine translations of the monolingual lines.
        #[arg(long, value_name = "FILE")]
        hyp: PathBuf,
        /// Ratio threshold for mode asr (default 1.2).
        #[arg(long, value_name = "X")]
        lambda: Option<f64>,
        /// Write pairs removed by the asr ratio filter here as TSV.
        #[arg(long, value_name = "FILE")]
        removed: Option<PathBuf>,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Build a weighted fine-tuning mixture and its manifest.
    BuildSet {
        /// Component as path:origin:weight; repeatable.
        #[arg(long = "component", value_name = "SPEC", required = true)]
        components: Vec<String>,
        /// JSON file mapping origin names to tag tokens.
        #[arg(long, value_name = "FILE", conflicts_with = "default_tags")]
        tags: Option<PathBuf>,
        /// Tag sources with the built-in <origin> tags.
        #[arg(long)]
        default_tags: bool,
        /// Shuffle the mixture with this seed; omit to concatenate.
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        /// Stage label recorded in the manifest.
        #[arg(long, value_name = "LABEL")]
        stage: Option<String>,
        /// Write the build manifest JSON here.
        #[arg(long, value_name = "FILE")]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Sentence and whitespace-word counts of a corpus.
    Stats {
        /// Print the report as a JSON object.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        input: CorpusInput,
        #[command(flatten)]
        langs: LangArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                std::process::exit(0);
            }
            eprint!("{err}");
            std::process::exit(1);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("noisy-forge: --threads: {err}");
            std::process::exit(1);
        }
    }
    if let Err(err) = run(cli.command) {
        eprintln!("noisy-forge: {err}");
        std::process::exit(match err {
            Error::InvalidConfig(_) => 1,
            Error::Io(_) => 3,
            _ => 2,
        });
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// stdin as UTF-8 lines with the same LF/CRLF handling as file loading;
/// encoding failures report the 1-based line number.
fn stdin_lines() -> Result<Vec<String>> {
    let mut bytes = Vec::new();
    io::stdin().lock().read_to_end(&mut bytes)?;
    let mut chunks: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    if bytes.is_empty() || bytes.last() == Some(&b'\n') {
        chunks.pop();
    }
    let mut lines = Vec::with_capacity(chunks.len());
    for (i, mut chunk) in chunks.into_iter().enumerate() {
        if chunk.last() == Some(&b'\r') {
            chunk = &chunk[..chunk.len() - 1];
        }
        let text =
            std::str::from_utf8(chunk).map_err(|_| Error::InvalidUtf8 { line: i + 1 })?;
        lines.push(text.to_string());
    }
    Ok(lines)
}

fn transform_lines<F>(output: Option<&PathBuf>, transform: F) -> Result<()>
where
    F: Fn(usize, &str) -> Result<String>,
{
    let lines = stdin_lines()?;
    let mut out = open_output(output)?;
    for (i, line) in lines.iter().enumerate() {
        writeln!(out, "{}", transform(i + 1, line)?)?;
    }
    out.flush()?;
    Ok(())
}

fn write_corpus(corpus: &Corpus, output: Option<&PathBuf>) -> Result<()> {
    let mut out = open_output(output)?;
    write_tsv(corpus, &mut out)?;
    out.flush()?;
    Ok(())
}

fn write_corpus_to(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_tsv(corpus, &mut out)?;
    out.flush()?;
    Ok(())
}

fn load_tag_config(path: Option<&PathBuf>) -> Result<TagConfig> {
    let Some(path) = path else {
        return Ok(TagConfig::default_tags());
    };
    let text = std::fs::read_to_string(path)?;
    let map: BTreeMap<String, String> = serde_json::from_str(&text).map_err(|err| {
        Error::InvalidConfig(format!("tag config {}: {err}", path.display()))
    })?;
    TagConfig::new(map.into_iter().map(|(name, tag)| {
        let origin: DataOrigin = name.parse().expect("origin parsing is infallible");
        (origin, tag)
    }))
}

fn parse_component(spec: &str) -> Result<(PathBuf, DataOrigin, u32)> {
    let bad = || {
        Error::InvalidConfig(format!(
            "bad --component `{spec}`; expected path:origin:weight"
        ))
    };
    let mut fields = spec.rsplitn(3, ':');
    let weight = fields.next().ok_or_else(bad)?;
    let origin = fields.next().ok_or_else(bad)?;
    let path = fields.next().ok_or_else(bad)?;
    if path.is_empty() || origin.is_empty() {
        return Err(bad());
    }
    let weight: u32 = weight.parse().map_err(|_| bad())?;
    let origin: DataOrigin = origin.parse().expect("origin parsing is infallible");
    Ok((PathBuf::from(path), origin, weight))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Tokenize { lang, output } => transform_lines(output.as_ref(), |_, line| {
            Ok(tokenize(line, &lang).to_string())
        }),
        Command::Detok { lang, output } => transform_lines(output.as_ref(), |_, line| {
            Ok(detokenize(&TokenSeq::from_whitespace(line), &lang))
        }),
        Command::FixPunct { output } => {
            transform_lines(output.as_ref(), |_, line| Ok(fix_french_punctuation(line)))
        }
        Command::Tag { origin, config, strip, output } => {
            let cfg = load_tag_config(config.as_ref())?;
            let origin: DataOrigin = origin.parse().expect("origin parsing is infallible");
            let tag = cfg.tag_for(&origin)?.to_string();
            let prefix = format!("{tag} ");
            transform_lines(output.as_ref(), |_, line| {
                Ok(if strip {
                    match line.strip_prefix(&prefix) {
                        Some(rest) => rest.to_string(),
                        None if line == tag => String::new(),
                        None => line.to_string(),
                    }
                } else {
                    format!("{tag} {line}")
                })
            })
        }
        Command::BpeLearn { merges, min_freq, output } => {
            let lines = stdin_lines()?;
            let freqs = count_words(lines.iter().map(String::as_str));
            let model = learn_bpe_with_min_freq(&freqs, merges, min_freq);
            eprintln!("bpe-learn: {} merges from {} distinct words", model.len(), freqs.len());
            let mut out = open_output(output.as_ref())?;
            model.save(&mut out)?;
            out.flush()?;
            Ok(())
        }
        Command::BpeApply { model, output } => {
            let model = BpeModel::load(&model)?;
            transform_lines(output.as_ref(), |_, line| {
                Ok(apply_bpe_tokens(&model, &TokenSeq::from_whitespace(line)).to_string())
            })
        }
        Command::BpeUndo { output } => transform_lines(output.as_ref(), |line_no, line| {
            let (tokens, dangling) = undo_bpe(&TokenSeq::from_whitespace(line));
            if dangling {
                eprintln!("bpe-undo: line {line_no}: dangling continuation mark");
            }
            Ok(tokens.to_string())
        }),
        Command::FuzzyAugment {
            mode,
            lambda,
            top_k,
            min_jaccard,
            exhaustive,
            no_dedup,
            manifest,
            mono,
            input,
            langs,
            output,
        } => {
            let cfg = FuzzyConfig {
                lambda_dist: lambda,
                k: top_k,
                min_jaccard,
                exhaustive,
                dedup: !no_dedup,
            };
            let corpus = input.load(&langs, DataOrigin::Mtnt)?;
            let (augmented, records) = match mode {
                ModeArg::Parallel => {
                    if mono.is_some() {
                        return Err(Error::InvalidConfig(
                            "--mono only applies to --mode mono".into(),
                        ));
                    }
                    augment_parallel(&corpus, &cfg)?
                }
                ModeArg::Mono => {
                    let mono = mono.ok_or_else(|| {
                        Error::InvalidConfig("--mode mono requires --mono FILE".into())
                    })?;
                    let mono = load_mono(&mono, &langs.src_lang)?;
                    augment_mono(&mono, &corpus, &cfg)?
                }
            };
            if let Some(path) = manifest {
                let mut out = BufWriter::new(File::create(&path)?);
                for record in &records {
                    let json =
                        serde_json::to_string(record).expect("match records serialize");
                    writeln!(out, "{json}")?;
                }
                out.flush()?;
            }
            eprintln!(
                "fuzzy-augment: {} matches, {} new pairs",
                records.len(),
                augmented.len()
            );
            write_corpus(&augmented, output.as_ref())
        }
        Command::FilterRatio { num, den, lambda, unit, removed, input, langs, output } => {
            let cfg = RatioFilterConfig {
                numerator: num.into(),
                denominator: den.into(),
                lambda_ratio: lambda,
                unit: unit.into(),
            };
            let corpus = input.load(&langs, DataOrigin::Clean)?;
            let (kept, dropped) = length_ratio_filter(&corpus, &cfg)?;
            eprintln!("filter-ratio: kept {}, removed {}", kept.len(), dropped.len());
            if let Some(path) = removed {
                write_corpus_to(&dropped, &path)?;
            }
            write_corpus(&kept, output.as_ref())
        }
        Command::Dedup { input, langs, output } => {
            let corpus = input.load(&langs, DataOrigin::Clean)?;
            let unique = dedup_pairs(&corpus);
            eprintln!("dedup: kept {} of {}", unique.len(), corpus.len());
            write_corpus(&unique, output.as_ref())
        }
        Command::Wer { refs, hyps, lang, uncased, strip_punct, output } => {
            let prepare = |line: &String| {
                let tokens = tokenize(line, &lang)
                    .into_vec()
                    .into_iter()
                    .map(|t| if uncased { t.to_lowercase() } else { t })
                    .filter(|t| !strip_punct || t.chars().any(char::is_alphanumeric))
                    .collect();
                TokenSeq::new(tokens).expect("tokenizer output stays valid")
            };
            let refs: Vec<TokenSeq> = read_lines(&refs)?.iter().map(prepare).collect();
            let hyps: Vec<TokenSeq> = read_lines(&hyps)?.iter().map(prepare).collect();
            let report = corpus_wer(&refs, &hyps)?;
            let mut out = open_output(output.as_ref())?;
            writeln!(out, "{report}")?;
            out.flush()?;
            Ok(())
        }
        Command::Bleu { refs, hyps, uncased, output } => {
            let refs = read_lines(&refs)?;
            let hyps = read_lines(&hyps)?;
            let report = bleu(&refs, &hyps, !uncased)?;
            let mut out = open_output(output.as_ref())?;
            writeln!(out, "{report}")?;
            out.flush()?;
            Ok(())
        }
        Command::MergeDirections { ab, ba, langs, output } => {
            let forward = load_tsv(&ab, &langs.src_lang, &langs.tgt_lang, DataOrigin::Clean)?;
            let reverse = load_tsv(&ba, &langs.tgt_lang, &langs.src_lang, DataOrigin::Clean)?;
            let merged = merge_directions(&forward, &reverse)?;
            eprintln!(
                "merge-directions: {} + {} = {} pairs",
                forward.len(),
                reverse.len(),
                merged.len()
            );
            write_corpus(&merged, output.as_ref())
        }
        Command::Assemble { mode, mono, hyp, lambda, removed, langs, output } => {
            if !matches!(mode, AssembleMode::Asr) && (lambda.is_some() || removed.is_some()) {
                return Err(Error::InvalidConfig(
                    "--lambda and --removed only apply to --mode asr".into(),
                ));
            }
            let corpus = match mode {
                AssembleMode::Ft => {
                    let mono = load_mono(&mono, &langs.src_lang)?;
                    let hyp = load_mono(&hyp, &langs.tgt_lang)?;
                    assemble_ft(&mono, &hyp)?
                }
                AssembleMode::Bt => {
                    let mono = load_mono(&mono, &langs.tgt_lang)?;
                    let hyp = load_mono(&hyp, &langs.src_lang)?;
                    assemble_bt(&mono, &hyp)?
                }
                AssembleMode::Asr => {
                    let transcripts = load_mono(&mono, &langs.src_lang)?;
                    let translations = load_mono(&hyp, &langs.tgt_lang)?;
                    let cfg = RatioFilterConfig {
                        lambda_ratio: lambda.unwrap_or(1.2),
                        ..RatioFilterConfig::default()
                    };
                    let (kept, dropped) = assemble_asr(&transcripts, &translations, &cfg)?;
                    eprintln!("assemble: kept {}, removed {}", kept.len(), dropped.len());
                    if let Some(path) = removed {
                        write_corpus_to(&dropped, &path)?;
                    }
                    kept
                }
            };
            write_corpus(&corpus, output.as_ref())
        }
        Command::BuildSet {
            components,
            tags,
            default_tags,
            seed,
            stage,
            manifest,
            langs,
            output,
        } => {
            let mut parts = Vec::with_capacity(components.len());
            for spec in &components {
                let (path, origin, weight) = parse_component(spec)?;
                let corpus = load_tsv(&path, &langs.src_lang, &langs.tgt_lang, origin)?;
                let name = path
                    .file_stem()
                    .map(|stem| stem.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                let mut part = FinetuneComponent::new(corpus, weight, name);
                part.source_files = vec![path.display().to_string()];
                parts.push(part);
            }
            let tag_cfg = if default_tags {
                Some(TagConfig::default_tags())
            } else {
                tags.as_ref().map(|path| load_tag_config(Some(path))).transpose()?
            };
            let (set, mut build_manifest) = build_finetune_set(&parts, tag_cfg.as_ref(), seed)?;
            build_manifest.stage = stage;
            eprintln!(
                "build-set: {} components, {} pairs",
                build_manifest.components.len(),
                build_manifest.total_pairs
            );
            if let Some(path) = manifest {
                let json = serde_json::to_string_pretty(&build_manifest)
                    .expect("manifest serializes");
                let mut out = BufWriter::new(File::create(&path)?);
                writeln!(out, "{json}")?;
                out.flush()?;
            }
            write_corpus(&set, output.as_ref())
        }
        Command::Stats { json, input, langs, output } => {
            let corpus = input.load(&langs, DataOrigin::Clean)?;
            let report = corpus_stats(&corpus);
            let mut out = open_output(output.as_ref())?;
            if json {
                let line = serde_json::to_string(&report).expect("stats serialize");
                writeln!(out, "{line}")?;
            } else {
                writeln!(out, "{report}")?;
            }
            out.flush()?;
            Ok(())
        }
    }
}
