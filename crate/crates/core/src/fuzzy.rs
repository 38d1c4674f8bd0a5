//! Fuzzy-match augmentation: mine new sentence pairs from near-duplicate
//! sources inside a parallel corpus, or from a monolingual corpus against
//! one.
//!
//! A match is an unordered pair of distinct non-empty source sides whose
//! normalized edit distance is at most `lambda_dist`. Candidate search
//! goes through the inverted index unless `exhaustive` is set, which
//! scans all pairs (the oracle mode: with any `k` the indexed output is a
//! subset of it). Empty sentences never match: the index never proposes
//! them, and the exhaustive scan skips them for consistency.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Corpus, DataOrigin, MonoCorpus};
use crate::error::{Error, Result};
use crate::similarity::{eq1_score, SimilarityIndex};
use crate::text_norm::{tokenize, TokenSeq};

/// Knobs for fuzzy matching.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyConfig {
    /// Acceptance threshold on the normalized distance, in [0, 1].
    pub lambda_dist: f64,
    /// Candidate cap per query for the indexed mode.
    pub k: usize,
    /// Minimum Jaccard overlap for a candidate, in [0, 1]; 0 means any
    /// token overlap qualifies.
    pub min_jaccard: f64,
    /// Scan all pairs instead of querying the index.
    pub exhaustive: bool,
    /// Drop emitted pairs that duplicate the base corpus or each other
    /// (tokenized-text equality).
    pub dedup: bool,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        FuzzyConfig {
            lambda_dist: 0.5,
            k: 10,
            min_jaccard: 0.0,
            exhaustive: false,
            dedup: true,
        }
    }
}

impl FuzzyConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda_dist) {
            return Err(Error::InvalidConfig(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda_dist
            )));
        }
        if !(0.0..=1.0).contains(&self.min_jaccard) {
            return Err(Error::InvalidConfig(format!(
                "min-jaccard must lie in [0, 1], got {}",
                self.min_jaccard
            )));
        }
        Ok(())
    }
}

/// One emitted pair, as recorded in the audit trail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmittedPair {
    pub source: String,
    pub target: String,
    pub origin: DataOrigin,
}

/// Audit record for one accepted match. `pairs` lists the emissions that
/// survived deduplication, so it may be empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchRecord {
    pub query_id: usize,
    pub match_id: usize,
    pub score: f64,
    pub pairs: Vec<EmittedPair>,
}

fn dedup_key(src: &str, src_lang: &str, tgt: &str, tgt_lang: &str) -> (String, String) {
    (tokenize(src, src_lang).to_string(), tokenize(tgt, tgt_lang).to_string())
}

fn base_keys(corpus: &Corpus) -> HashSet<(String, String)> {
    corpus
        .pairs()
        .iter()
        .map(|p| dedup_key(&p.source.text, corpus.src_lang(), &p.target.text, corpus.tgt_lang()))
        .collect()
}

/// Match sources within one parallel corpus; every accepted unordered
/// match {i, j} emits (sᵢ, tⱼ) and (sⱼ, tᵢ) with origin `fuzzy_parallel`.
/// Output order is ascending (i, j); each match contributes once even
/// when both directions retrieve each other.
pub fn augment_parallel(corpus: &Corpus, cfg: &FuzzyConfig) -> Result<(Corpus, Vec<MatchRecord>)> {
    cfg.validate()?;
    let src_lang = corpus.src_lang();
    let tokens: Vec<TokenSeq> = corpus
        .pairs()
        .par_iter()
        .map(|p| tokenize(&p.source.text, src_lang))
        .collect();

    let mut matches: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    if cfg.exhaustive {
        let found: Vec<Vec<(usize, usize, f64)>> = (0..tokens.len())
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::new();
                if tokens[i].is_empty() {
                    return out;
                }
                for j in i + 1..tokens.len() {
                    if tokens[j].is_empty() {
                        continue;
                    }
                    let score = eq1_score(&tokens[i], &tokens[j]);
                    if score.is_match(cfg.lambda_dist) {
                        out.push((i, j, score.value().expect("matched scores are defined")));
                    }
                }
                out
            })
            .collect();
        for group in found {
            for (i, j, s) in group {
                matches.insert((i, j), s);
            }
        }
    } else {
        let index = SimilarityIndex::build(&tokens);
        let found: Vec<Vec<(usize, usize, f64)>> = (0..tokens.len())
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::new();
                for j in index.top_k_min_jaccard(&tokens[i], cfg.k, Some(i), cfg.min_jaccard) {
                    if tokens[i].is_empty() || tokens[j].is_empty() {
                        continue;
                    }
                    let score = eq1_score(&tokens[i], &tokens[j]);
                    if score.is_match(cfg.lambda_dist) {
                        out.push((i.min(j), i.max(j), score.value().expect("matched scores are defined")));
                    }
                }
                out
            })
            .collect();
        for group in found {
            for (i, j, s) in group {
                matches.insert((i, j), s);
            }
        }
    }

    let mut seen = if cfg.dedup { base_keys(corpus) } else { HashSet::new() };
    let mut output = Corpus::new(src_lang, corpus.tgt_lang())?;
    let mut records = Vec::with_capacity(matches.len());
    let pairs = corpus.pairs();
    for ((i, j), score) in matches {
        let mut record = MatchRecord {
            query_id: i,
            match_id: j,
            score,
            pairs: Vec::with_capacity(2),
        };
        for (src_id, tgt_id) in [(i, j), (j, i)] {
            let src = &pairs[src_id].source.text;
            let tgt = &pairs[tgt_id].target.text;
            if cfg.dedup {
                let key = dedup_key(src, src_lang, tgt, corpus.tgt_lang());
                if !seen.insert(key) {
                    continue;
                }
            }
            output.push(src.clone(), tgt.clone(), DataOrigin::FuzzyParallel)?;
            record.pairs.push(EmittedPair {
                source: src.clone(),
                target: tgt.clone(),
                origin: DataOrigin::FuzzyParallel,
            });
        }
        records.push(record);
    }
    Ok((output, records))
}

/// Match monolingual sentences against a corpus' source sides; each
/// accepted (mᵢ, sⱼ) emits (mᵢ, tⱼ) with origin `fuzzy_mono`. Output
/// order is ascending (i, j).
pub fn augment_mono(mono: &MonoCorpus, corpus: &Corpus, cfg: &FuzzyConfig) -> Result<(Corpus, Vec<MatchRecord>)> {
    cfg.validate()?;
    if mono.lang() != corpus.src_lang() {
        return Err(Error::LangMismatch {
            expected: corpus.src_lang().to_string(),
            found: mono.lang().to_string(),
        });
    }
    let src_lang = corpus.src_lang();
    let src_tokens: Vec<TokenSeq> = corpus
        .pairs()
        .par_iter()
        .map(|p| tokenize(&p.source.text, src_lang))
        .collect();
    let mono_tokens: Vec<TokenSeq> = mono
        .sentences()
        .par_iter()
        .map(|s| tokenize(&s.text, src_lang))
        .collect();

    let index = if cfg.exhaustive {
        None
    } else {
        Some(SimilarityIndex::build(&src_tokens))
    };
    let found: Vec<Vec<(usize, f64)>> = mono_tokens
        .par_iter()
        .map(|query| {
            let mut out = Vec::new();
            if query.is_empty() {
                return out;
            }
            let candidates: Vec<usize> = match &index {
                Some(idx) => idx.top_k_min_jaccard(query, cfg.k, None, cfg.min_jaccard),
                None => (0..src_tokens.len()).collect(),
            };
            for j in candidates {
                if src_tokens[j].is_empty() {
                    continue;
                }
                let score = eq1_score(query, &src_tokens[j]);
                if score.is_match(cfg.lambda_dist) {
                    out.push((j, score.value().expect("matched scores are defined")));
                }
            }
            out.sort_by(|a, b| a.0.cmp(&b.0));
            out
        })
        .collect();

    let mut seen = if cfg.dedup { base_keys(corpus) } else { HashSet::new() };
    let mut output = Corpus::new(src_lang, corpus.tgt_lang())?;
    let mut records = Vec::new();
    let pairs = corpus.pairs();
    for (i, js) in found.into_iter().enumerate() {
        for (j, score) in js {
            let src = &mono.sentences()[i].text;
            let tgt = &pairs[j].target.text;
            let mut record = MatchRecord {
                query_id: i,
                match_id: j,
                score,
                pairs: Vec::with_capacity(1),
            };
            let emit = if cfg.dedup {
                seen.insert(dedup_key(src, src_lang, tgt, corpus.tgt_lang()))
            } else {
                true
            };
            if emit {
                output.push(src.clone(), tgt.clone(), DataOrigin::FuzzyMono)?;
                record.pairs.push(EmittedPair {
                    source: src.clone(),
                    target: tgt.clone(),
                    origin: DataOrigin::FuzzyMono,
                });
            }
            records.push(record);
        }
    }
    Ok((output, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corpus(pairs: &[(&str, &str)]) -> Corpus {
        let mut c = Corpus::new("en", "fr").unwrap();
        for &(s, t) in pairs {
            c.push(s, t, DataOrigin::Mtnt).unwrap();
        }
        c
    }

    fn text_pairs(c: &Corpus) -> Vec<(String, String)> {
        c.pairs()
            .iter()
            .map(|p| (p.source.text.clone(), p.target.text.clone()))
            .collect()
    }

    #[test]
    fn parallel_worked_example() {
        let base = corpus(&[("a b c", "T0"), ("a b d", "T1"), ("x y z", "T2")]);
        let (out, records) = augment_parallel(&base, &FuzzyConfig::default()).unwrap();
        assert_eq!(
            text_pairs(&out),
            vec![
                ("a b c".to_string(), "T1".to_string()),
                ("a b d".to_string(), "T0".to_string()),
            ]
        );
        assert!(out.pairs().iter().all(|p| p.origin == DataOrigin::FuzzyParallel));
        assert_eq!(records.len(), 1);
        assert_eq!((records[0].query_id, records[0].match_id), (0, 1));
        assert_eq!(records[0].score, 1.0 / 3.0);
        assert_eq!(records[0].pairs.len(), 2);
    }

    #[test]
    fn parallel_disjoint_sources_emit_nothing() {
        let base = corpus(&[("a b", "T0"), ("c d", "T1"), ("e f", "T2")]);
        let (out, records) = augment_parallel(&base, &FuzzyConfig::default()).unwrap();
        assert!(out.is_empty());
        assert!(records.is_empty());
    }

    #[test]
    fn parallel_dedups_against_base() {
        let base = corpus(&[("a b", "T"), ("a b", "T")]);
        let cfg = FuzzyConfig::default();
        let (out, records) = augment_parallel(&base, &cfg).unwrap();
        // the match exists but both emissions duplicate the base pair
        assert!(out.is_empty());
        assert_eq!(records.len(), 1);
        assert!(records[0].pairs.is_empty());

        let (out, _) = augment_parallel(&base, &FuzzyConfig { dedup: false, ..cfg }).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn parallel_dedup_uses_tokenized_text() {
        // sources differ only in spacing, so emissions collide
        let base = corpus(&[("a  b", "T0"), ("a b", "T0")]);
        let (out, _) = augment_parallel(&base, &FuzzyConfig::default()).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn parallel_skips_empty_sources() {
        let base = corpus(&[("", "T0"), ("", "T1"), ("a", "T2")]);
        for exhaustive in [false, true] {
            let cfg = FuzzyConfig { exhaustive, ..FuzzyConfig::default() };
            let (out, records) = augment_parallel(&base, &cfg).unwrap();
            assert!(out.is_empty(), "exhaustive={exhaustive}");
            assert!(records.is_empty());
        }
    }

    #[test]
    fn parallel_rejects_bad_lambda() {
        let base = corpus(&[("a", "b")]);
        for bad in [-0.1, 1.1, f64::NAN] {
            let cfg = FuzzyConfig { lambda_dist: bad, ..FuzzyConfig::default() };
            assert!(augment_parallel(&base, &cfg).is_err(), "lambda {bad}");
        }
    }

    #[test]
    fn mono_exact_match_scores_zero() {
        let base = corpus(&[("a b c", "T0"), ("x y", "T1")]);
        let mut mono = MonoCorpus::new("en").unwrap();
        mono.push("a b c").unwrap();
        // the match is recorded at score 0, but its emission reproduces
        // the base pair exactly, so default dedup drops it
        let (out, records) = augment_mono(&mono, &base, &FuzzyConfig::default()).unwrap();
        assert!(out.is_empty());
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].score, 0.0);
        assert!(records[0].pairs.is_empty());

        let no_dedup = FuzzyConfig { dedup: false, ..FuzzyConfig::default() };
        let (out, records) = augment_mono(&mono, &base, &no_dedup).unwrap();
        assert_eq!(text_pairs(&out), vec![("a b c".to_string(), "T0".to_string())]);
        assert_eq!(out.pairs()[0].origin, DataOrigin::FuzzyMono);
        assert_eq!(records[0].score, 0.0);
    }

    #[test]
    fn mono_disjoint_emits_nothing() {
        let base = corpus(&[("a b", "T0")]);
        let mut mono = MonoCorpus::new("en").unwrap();
        mono.push("p q").unwrap();
        let (out, records) = augment_mono(&mono, &base, &FuzzyConfig::default()).unwrap();
        assert!(out.is_empty());
        assert!(records.is_empty());
    }

    #[test]
    fn mono_lang_mismatch() {
        let base = corpus(&[("a", "b")]);
        let mono = MonoCorpus::new("fr").unwrap();
        let err = augment_mono(&mono, &base, &FuzzyConfig::default()).unwrap_err();
        assert!(matches!(err, Error::LangMismatch { .. }));
    }

    #[test]
    fn mono_emits_one_pair_per_qualifying_match() {
        let base = corpus(&[("a b c", "T0"), ("a b d", "T1")]);
        let mut mono = MonoCorpus::new("en").unwrap();
        mono.push("a b x").unwrap();
        let (out, _) = augment_mono(&mono, &base, &FuzzyConfig::default()).unwrap();
        assert_eq!(
            text_pairs(&out),
            vec![
                ("a b x".to_string(), "T0".to_string()),
                ("a b x".to_string(), "T1".to_string()),
            ]
        );
    }

    #[test]
    fn match_record_json_shape() {
        let rec = MatchRecord {
            query_id: 3,
            match_id: 7,
            score: 0.25,
            pairs: vec![EmittedPair {
                source: "a".into(),
                target: "b".into(),
                origin: DataOrigin::FuzzyParallel,
            }],
        };
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"query_id":3,"match_id":7,"score":0.25,"pairs":[{"source":"a","target":"b","origin":"fuzzy_parallel"}]}"#
        );
    }

    fn arb_corpus() -> impl Strategy<Value = Vec<(String, String)>> {
        let sentence = proptest::collection::vec("[a-e]", 1..6).prop_map(|w| w.join(" "));
        proptest::collection::vec((sentence, "[A-D]{1,3}"), 1..25)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn indexed_is_subset_of_exhaustive(pairs in arb_corpus(), lambda in 0.0f64..1.0) {
            let rows: Vec<(&str, &str)> = pairs.iter().map(|(s, t)| (s.as_str(), t.as_str())).collect();
            let base = corpus(&rows);
            let idx_cfg = FuzzyConfig { lambda_dist: lambda, ..FuzzyConfig::default() };
            let exh_cfg = FuzzyConfig { lambda_dist: lambda, exhaustive: true, ..FuzzyConfig::default() };
            let (indexed, _) = augment_parallel(&base, &idx_cfg).unwrap();
            let (exhaustive, _) = augment_parallel(&base, &exh_cfg).unwrap();
            let exh_set: HashSet<_> = text_pairs(&exhaustive).into_iter().collect();
            for p in text_pairs(&indexed) {
                prop_assert!(exh_set.contains(&p));
            }
        }

        #[test]
        fn indexed_with_full_k_equals_exhaustive_at_half(pairs in arb_corpus()) {
            // at lambda <= 0.5 a match requires token overlap, so the
            // index loses nothing once k covers the corpus
            let rows: Vec<(&str, &str)> = pairs.iter().map(|(s, t)| (s.as_str(), t.as_str())).collect();
            let base = corpus(&rows);
            let idx_cfg = FuzzyConfig { k: base.len(), ..FuzzyConfig::default() };
            let exh_cfg = FuzzyConfig { exhaustive: true, ..FuzzyConfig::default() };
            let (indexed, _) = augment_parallel(&base, &idx_cfg).unwrap();
            let (exhaustive, _) = augment_parallel(&base, &exh_cfg).unwrap();
            prop_assert_eq!(text_pairs(&indexed), text_pairs(&exhaustive));
        }

        #[test]
        fn threshold_is_monotone(pairs in arb_corpus(), l1 in 0.0f64..1.0, l2 in 0.0f64..1.0) {
            let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            let rows: Vec<(&str, &str)> = pairs.iter().map(|(s, t)| (s.as_str(), t.as_str())).collect();
            let base = corpus(&rows);
            let cfg_lo = FuzzyConfig { lambda_dist: lo, exhaustive: true, ..FuzzyConfig::default() };
            let cfg_hi = FuzzyConfig { lambda_dist: hi, exhaustive: true, ..FuzzyConfig::default() };
            let (out_lo, _) = augment_parallel(&base, &cfg_lo).unwrap();
            let (out_hi, _) = augment_parallel(&base, &cfg_hi).unwrap();
            let hi_set: HashSet<_> = text_pairs(&out_hi).into_iter().collect();
            for p in text_pairs(&out_lo) {
                prop_assert!(hi_set.contains(&p));
            }
        }

        #[test]
        fn parallel_emissions_are_symmetric(pairs in arb_corpus()) {
            let rows: Vec<(&str, &str)> = pairs.iter().map(|(s, t)| (s.as_str(), t.as_str())).collect();
            let base = corpus(&rows);
            let cfg = FuzzyConfig { dedup: false, exhaustive: true, ..FuzzyConfig::default() };
            let (out, records) = augment_parallel(&base, &cfg).unwrap();
            // every match emits both directions, so (s_i, t_j) always has
            // its mirror (s_j, t_i)
            prop_assert_eq!(out.len(), 2 * records.len());
            for rec in &records {
                let (i, j) = (rec.query_id, rec.match_id);
                prop_assert!(i < j);
                prop_assert_eq!(rec.pairs.len(), 2);
                prop_assert_eq!(&rec.pairs[0].source, &base.pairs()[i].source.text);
                prop_assert_eq!(&rec.pairs[0].target, &base.pairs()[j].target.text);
                prop_assert_eq!(&rec.pairs[1].source, &base.pairs()[j].source.text);
                prop_assert_eq!(&rec.pairs[1].target, &base.pairs()[i].target.text);
            }
        }
    }
}
