//! Length-ratio filtering and exact-duplicate removal.

use std::collections::HashSet;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::text_norm::tokenize;

/// Which side of a pair a ratio term reads from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

/// How lengths are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthUnit {
    Tokens,
    Chars,
}

/// Ratio-filter settings. The default mirrors the ASR cleanup formula:
/// target length over source length, threshold 1.5, token units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioFilterConfig {
    pub numerator: Side,
    pub denominator: Side,
    pub lambda_ratio: f64,
    pub unit: LengthUnit,
}

impl Default for RatioFilterConfig {
    fn default() -> Self {
        RatioFilterConfig {
            numerator: Side::Target,
            denominator: Side::Source,
            lambda_ratio: 1.5,
            unit: LengthUnit::Tokens,
        }
    }
}

impl RatioFilterConfig {
    fn validate(&self) -> Result<()> {
        if self.numerator == self.denominator {
            return Err(Error::InvalidConfig("ratio numerator and denominator must differ".into()));
        }
        if !(self.lambda_ratio > 0.0) || !self.lambda_ratio.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "ratio threshold must be positive and finite, got {}",
                self.lambda_ratio
            )));
        }
        Ok(())
    }
}

fn side_len(text: &str, lang: &str, unit: LengthUnit) -> usize {
    match unit {
        LengthUnit::Tokens => tokenize(text, lang).len(),
        LengthUnit::Chars => text.chars().count(),
    }
}

/// Partition a corpus into (kept, removed). A pair is removed iff the
/// length ratio strictly exceeds the threshold, or the denominator side
/// has length zero. Both outputs preserve input order and the original
/// pair indices.
pub fn length_ratio_filter(corpus: &Corpus, cfg: &RatioFilterConfig) -> Result<(Corpus, Corpus)> {
    cfg.validate()?;
    let lang_of = |side: Side| match side {
        Side::Source => corpus.src_lang(),
        Side::Target => corpus.tgt_lang(),
    };
    fn text_of(pair: &crate::corpus::SentencePair, side: Side) -> &str {
        match side {
            Side::Source => &pair.source.text,
            Side::Target => &pair.target.text,
        }
    }
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for pair in corpus.pairs() {
        let num = side_len(text_of(pair, cfg.numerator), lang_of(cfg.numerator), cfg.unit);
        let den = side_len(text_of(pair, cfg.denominator), lang_of(cfg.denominator), cfg.unit);
        let drop = den == 0 || (num as f64 / den as f64) > cfg.lambda_ratio;
        if drop {
            removed.push(pair.clone());
        } else {
            kept.push(pair.clone());
        }
    }
    Ok((
        Corpus::from_pairs(corpus.src_lang(), corpus.tgt_lang(), kept),
        Corpus::from_pairs(corpus.src_lang(), corpus.tgt_lang(), removed),
    ))
}

/// Keep the first occurrence of every (source text, target text) pair,
/// preserving order and original indices.
pub fn dedup_pairs(corpus: &Corpus) -> Corpus {
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut kept = Vec::new();
    for pair in corpus.pairs() {
        if seen.insert((&pair.source.text, &pair.target.text)) {
            kept.push(pair.clone());
        }
    }
    Corpus::from_pairs(corpus.src_lang(), corpus.tgt_lang(), kept)
}
