//! Corpus augmentation and evaluation toolkit for machine-translation
//! robustness work: fuzzy-match augmentation, forward/back-translation
//! assembly, ASR-pair filtering, subword processing, and BLEU / WER
//! scoring.
//!
//! Everything operates on line-oriented UTF-8 text and is deterministic:
//! identical inputs (and seeds) produce identical outputs.

pub mod bpe;
pub mod corpus;
pub mod error;
pub mod filters;
pub mod fuzzy;
pub mod metrics;
pub mod pipeline;
pub mod similarity;
pub mod text_norm;

pub use corpus::{
    corpus_stats, load_mono, load_parallel, load_tsv, parse_tsv, read_lines, write_parallel,
    write_tsv, Corpus, DataOrigin, MonoCorpus, Sentence, SentencePair, StatsReport,
};
pub use error::{Error, Result};
pub use text_norm::{detokenize, fix_french_punctuation, inject_tag, strip_tag, tokenize, TagConfig, TokenSeq};
