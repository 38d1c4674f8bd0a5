//! Dataset assembly: direction merging, forward/back-translation pair
//! construction, ASR pair filtering, and weighted fine-tuning mixtures
//! with manifests.
//!
//! Translation hypotheses are always read from files prepared elsewhere;
//! nothing here runs a model.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DataOrigin, MonoCorpus};
use crate::error::{Error, Result};
use crate::filters::{length_ratio_filter, RatioFilterConfig};
use crate::text_norm::{inject_tag, TagConfig};

/// Append the swapped pairs of a B→A corpus to an A→B corpus. Origins are
/// preserved; pairs are reindexed in output order.
pub fn merge_directions(c_ab: &Corpus, c_ba: &Corpus) -> Result<Corpus> {
    if c_ba.src_lang() != c_ab.tgt_lang() || c_ba.tgt_lang() != c_ab.src_lang() {
        return Err(Error::LangMismatch {
            expected: format!("{}->{}", c_ab.tgt_lang(), c_ab.src_lang()),
            found: format!("{}->{}", c_ba.src_lang(), c_ba.tgt_lang()),
        });
    }
    let mut out = Corpus::new(c_ab.src_lang(), c_ab.tgt_lang())?;
    for p in c_ab.pairs() {
        out.push(p.source.text.clone(), p.target.text.clone(), p.origin.clone())?;
    }
    for p in c_ba.pairs() {
        out.push(p.target.text.clone(), p.source.text.clone(), p.origin.clone())?;
    }
    Ok(out)
}

/// Pair source-language monolingual text with its forward translations:
/// pair i = (monoᵢ, hypᵢ), origin `forward_translation`.
pub fn assemble_ft(mono_src: &MonoCorpus, hyp_tgt: &MonoCorpus) -> Result<Corpus> {
    if mono_src.len() != hyp_tgt.len() {
        return Err(Error::LineCountMismatch {
            left: mono_src.len(),
            right: hyp_tgt.len(),
        });
    }
    let mut out = Corpus::new(mono_src.lang(), hyp_tgt.lang())?;
    for (m, h) in mono_src.sentences().iter().zip(hyp_tgt.sentences()) {
        out.push(m.text.clone(), h.text.clone(), DataOrigin::ForwardTranslation)?;
    }
    Ok(out)
}

/// Pair target-language monolingual text with its back-translations: the
/// hypothesis becomes the source, pair i = (hypᵢ, monoᵢ), origin
/// `back_translation`.
pub fn assemble_bt(mono_tgt: &MonoCorpus, hyp_src: &MonoCorpus) -> Result<Corpus> {
    if mono_tgt.len() != hyp_src.len() {
        return Err(Error::LineCountMismatch {
            left: mono_tgt.len(),
            right: hyp_src.len(),
        });
    }
    let mut out = Corpus::new(hyp_src.lang(), mono_tgt.lang())?;
    for (m, h) in mono_tgt.sentences().iter().zip(hyp_src.sentences()) {
        out.push(h.text.clone(), m.text.clone(), DataOrigin::BackTranslation)?;
    }
    Ok(out)
}

/// Pair ASR transcripts with reference translations (origin `asr`) and
/// apply the length-ratio filter. Returns (kept, removed).
pub fn assemble_asr(
    transcripts: &MonoCorpus,
    translations: &MonoCorpus,
    cfg: &RatioFilterConfig,
) -> Result<(Corpus, Corpus)> {
    if transcripts.len() != translations.len() {
        return Err(Error::LineCountMismatch {
            left: transcripts.len(),
            right: translations.len(),
        });
    }
    let mut paired = Corpus::new(transcripts.lang(), translations.lang())?;
    for (s, t) in transcripts.sentences().iter().zip(translations.sentences()) {
        paired.push(s.text.clone(), t.text.clone(), DataOrigin::Asr)?;
    }
    length_ratio_filter(&paired, cfg)
}

/// One ingredient of a fine-tuning mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneComponent {
    pub corpus: Corpus,
    /// Integer oversampling factor; must be at least 1.
    pub weight: u32,
    /// Label recorded in the manifest.
    pub name: String,
    /// Input paths recorded in the manifest; informational only.
    pub source_files: Vec<String>,
}

impl FinetuneComponent {
    pub fn new(corpus: Corpus, weight: u32, name: impl Into<String>) -> Self {
        FinetuneComponent {
            corpus,
            weight,
            name: name.into(),
            source_files: Vec::new(),
        }
    }
}

/// Manifest entry for one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestComponent {
    pub name: String,
    /// Origin shared by every pair of the component, when uniform.
    pub origin: Option<DataOrigin>,
    pub weight: u32,
    pub input_pairs: usize,
    /// Contribution to the output: weight × input_pairs.
    pub pair_count: usize,
    pub source_files: Vec<String>,
    pub parameters: BTreeMap<String, String>,
}

/// Record of how a fine-tuning set was assembled. Component pair counts
/// sum to `total_pairs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationManifest {
    pub toolkit_version: String,
    pub created_at: String,
    pub src_lang: String,
    pub tgt_lang: String,
    pub tagged: bool,
    pub shuffle_seed: Option<u64>,
    /// Free-form label (e.g. for staged fine-tuning runs).
    pub stage: Option<String>,
    pub components: Vec<ManifestComponent>,
    pub total_pairs: usize,
}

/// RFC 3339 UTC timestamp; SOURCE_DATE_EPOCH overrides the clock for
/// reproducible builds.
fn manifest_timestamp() -> String {
    let dt = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    dt.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn uniform_origin(corpus: &Corpus) -> Option<DataOrigin> {
    let mut origins = corpus.pairs().iter().map(|p| &p.origin);
    let first = origins.next()?;
    origins.all(|o| o == first).then(|| first.clone())
}

/// Build a weighted fine-tuning mixture: each component is repeated
/// `weight` times in order, tags are injected per origin when a config is
/// given, and a seed switches on a deterministic shuffle. Also returns
/// the manifest describing the build.
pub fn build_finetune_set(
    components: &[FinetuneComponent],
    tag_cfg: Option<&TagConfig>,
    shuffle_seed: Option<u64>,
) -> Result<(Corpus, AugmentationManifest)> {
    let Some(first) = components.first() else {
        return Err(Error::EmptyCorpus);
    };
    let (src_lang, tgt_lang) = (first.corpus.src_lang(), first.corpus.tgt_lang());
    let mut manifest_components = Vec::with_capacity(components.len());
    let mut pairs = Vec::new();
    for comp in components {
        if comp.weight == 0 {
            return Err(Error::InvalidConfig(format!(
                "component `{}` has weight 0; weights must be at least 1",
                comp.name
            )));
        }
        if comp.corpus.src_lang() != src_lang || comp.corpus.tgt_lang() != tgt_lang {
            return Err(Error::LangMismatch {
                expected: format!("{src_lang}->{tgt_lang}"),
                found: format!("{}->{}", comp.corpus.src_lang(), comp.corpus.tgt_lang()),
            });
        }
        for _ in 0..comp.weight {
            for pair in comp.corpus.pairs() {
                let pair = match tag_cfg {
                    Some(cfg) => inject_tag(pair, cfg)?,
                    None => pair.clone(),
                };
                pairs.push((pair.source.text, pair.target.text, pair.origin));
            }
        }
        manifest_components.push(ManifestComponent {
            name: comp.name.clone(),
            origin: uniform_origin(&comp.corpus),
            weight: comp.weight,
            input_pairs: comp.corpus.len(),
            pair_count: comp.weight as usize * comp.corpus.len(),
            source_files: comp.source_files.clone(),
            parameters: BTreeMap::new(),
        });
    }
    if let Some(seed) = shuffle_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
    }
    let mut out = Corpus::new(src_lang, tgt_lang)?;
    for (src, tgt, origin) in pairs {
        out.push(src, tgt, origin)?;
    }
    let manifest = AugmentationManifest {
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        created_at: manifest_timestamp(),
        src_lang: src_lang.to_string(),
        tgt_lang: tgt_lang.to_string(),
        tagged: tag_cfg.is_some(),
        shuffle_seed,
        stage: None,
        components: manifest_components,
        total_pairs: out.len(),
    };
    Ok((out, manifest))
}
