//! Corpus-level WER/WRR and BLEU.
//!
//! WER counts come from a minimum-edit alignment with unit costs; among
//! cost-equal alignments the backtrace prefers substitution over deletion
//! over insertion. BLEU follows the multi-bleu family: clipped n-gram
//! precisions up to 4-grams, geometric mean, brevity penalty, no
//! smoothing, 0-100 scale. Both sides are run through the lang-neutral
//! tokenizer first; exact byte compatibility with external scripts is a
//! documented non-goal.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::text_norm::{tokenize_neutral, TokenSeq};

/// Alignment counts plus the derived rates. `wer` may exceed 1 when
/// insertions dominate; `wer` and `wrr` need not sum to 1 for the same
/// reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WerReport {
    /// Reference token count N.
    pub n_ref: usize,
    pub hits: usize,
    pub subs: usize,
    pub dels: usize,
    pub ins: usize,
}

impl WerReport {
    pub fn wer(&self) -> f64 {
        (self.subs + self.dels + self.ins) as f64 / self.n_ref as f64
    }

    pub fn wrr(&self) -> f64 {
        self.hits as f64 / self.n_ref as f64
    }

    pub fn hyp_len(&self) -> usize {
        self.hits + self.subs + self.ins
    }

    fn add(&mut self, other: &WerReport) {
        self.n_ref += other.n_ref;
        self.hits += other.hits;
        self.subs += other.subs;
        self.dels += other.dels;
        self.ins += other.ins;
    }
}

impl fmt::Display for WerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WER={:.2}% WRR={:.2}% N={} S={} D={} I={}",
            self.wer() * 100.0,
            self.wrr() * 100.0,
            self.n_ref,
            self.subs,
            self.dels,
            self.ins
        )
    }
}

fn align_counts(reference: &TokenSeq, hypothesis: &TokenSeq) -> WerReport {
    let r = reference.as_slice();
    let h = hypothesis.as_slice();
    let (n, m) = (r.len(), h.len());
    // dp[i][j]: edits between r[..i] and h[..j]
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for i in 0..=n {
        dp[i][0] = i;
    }
    for j in 0..=m {
        dp[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dp[i - 1][j - 1] + usize::from(r[i - 1] != h[j - 1]);
            dp[i][j] = sub.min(dp[i - 1][j] + 1).min(dp[i][j - 1] + 1);
        }
    }
    let mut report = WerReport { n_ref: n, ..Default::default() };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] + usize::from(r[i - 1] != h[j - 1]) {
            if r[i - 1] == h[j - 1] {
                report.hits += 1;
            } else {
                report.subs += 1;
            }
            i -= 1;
            j -= 1;
        } else if i > 0 && dp[i][j] == dp[i - 1][j] + 1 {
            report.dels += 1;
            i -= 1;
        } else {
            report.ins += 1;
            j -= 1;
        }
    }
    report
}

/// Word error rate of one hypothesis against one reference.
pub fn wer(reference: &TokenSeq, hypothesis: &TokenSeq) -> Result<WerReport> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    Ok(align_counts(reference, hypothesis))
}

/// Micro-averaged corpus WER: counts are summed over sentences before the
/// rates are taken.
pub fn corpus_wer(references: &[TokenSeq], hypotheses: &[TokenSeq]) -> Result<WerReport> {
    if references.len() != hypotheses.len() {
        return Err(Error::LengthMismatch {
            left: references.len(),
            right: hypotheses.len(),
        });
    }
    let mut total = WerReport::default();
    for (r, h) in references.iter().zip(hypotheses) {
        total.add(&align_counts(r, h));
    }
    if total.n_ref == 0 {
        return Err(Error::EmptyReference);
    }
    Ok(total)
}

/// Corpus BLEU: clipped n-gram precisions, brevity penalty, geometric
/// mean, 0-100 scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BleuReport {
    /// Modified n-gram precisions for n = 1..4, as fractions in [0, 1].
    pub precisions: [f64; 4],
    pub brevity_penalty: f64,
    pub bleu: f64,
    pub ref_len: usize,
    pub hyp_len: usize,
    pub cased: bool,
}

impl fmt::Display for BleuReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precisions.map(|v| v * 100.0);
        write!(
            f,
            "BLEU = {:.2}, {:.1}/{:.1}/{:.1}/{:.1} (BP={:.3}, ratio={:.3}, hyp_len={}, ref_len={})",
            self.bleu,
            p[0],
            p[1],
            p[2],
            p[3],
            self.brevity_penalty,
            self.hyp_len as f64 / self.ref_len as f64,
            self.hyp_len,
            self.ref_len
        )
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn bleu_tokens(text: &str, cased: bool) -> TokenSeq {
    if cased {
        tokenize_neutral(text)
    } else {
        tokenize_neutral(&text.to_lowercase())
    }
}

/// Single-reference corpus BLEU over detokenized lines. Both sides go
/// through the internal lang-neutral tokenizer; `cased = false` lowercases
/// first.
pub fn bleu<R: AsRef<str>, H: AsRef<str>>(references: &[R], hypotheses: &[H], cased: bool) -> Result<BleuReport> {
    let grouped: Vec<Vec<&str>> = references.iter().map(|r| vec![r.as_ref()]).collect();
    bleu_multi(&grouped, hypotheses, cased)
}

/// Multi-reference corpus BLEU: clipping uses the maximum reference count
/// per n-gram; the effective reference length per sentence is the closest
/// to the hypothesis length, ties resolved toward the shorter.
pub fn bleu_multi<R: AsRef<str>, H: AsRef<str>>(
    reference_sets: &[Vec<R>],
    hypotheses: &[H],
    cased: bool,
) -> Result<BleuReport> {
    if reference_sets.len() != hypotheses.len() {
        return Err(Error::LengthMismatch {
            left: reference_sets.len(),
            right: hypotheses.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut clipped = [0usize; 4];
    let mut totals = [0usize; 4];
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    for (refs, hyp) in reference_sets.iter().zip(hypotheses) {
        if refs.is_empty() {
            return Err(Error::EmptyReference);
        }
        let hyp_toks = bleu_tokens(hyp.as_ref(), cased);
        let ref_toks: Vec<TokenSeq> = refs.iter().map(|r| bleu_tokens(r.as_ref(), cased)).collect();
        hyp_len += hyp_toks.len();
        ref_len += ref_toks
            .iter()
            .map(TokenSeq::len)
            .min_by_key(|&l| (l.abs_diff(hyp_toks.len()), l))
            .expect("non-empty reference set");
        for n in 1..=4 {
            let hyp_counts = ngram_counts(hyp_toks.as_slice(), n);
            let mut best_ref: HashMap<&[String], usize> = HashMap::new();
            for rt in &ref_toks {
                for (gram, count) in ngram_counts(rt.as_slice(), n) {
                    let entry = best_ref.entry(gram).or_insert(0);
                    *entry = (*entry).max(count);
                }
            }
            for (gram, count) in &hyp_counts {
                totals[n - 1] += count;
                clipped[n - 1] += count.min(best_ref.get(gram).unwrap_or(&0));
            }
        }
    }
    if hyp_len == 0 {
        return Err(Error::EmptyCorpus);
    }
    let precisions = std::array::from_fn(|n| {
        if totals[n] == 0 {
            0.0
        } else {
            clipped[n] as f64 / totals[n] as f64
        }
    });
    let brevity_penalty = if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    let bleu = if precisions.iter().all(|&p| p > 0.0) {
        100.0 * brevity_penalty * (precisions.iter().map(|p| p.ln()).sum::<f64>() / 4.0).exp()
    } else {
        0.0
    };
    Ok(BleuReport {
        precisions,
        brevity_penalty,
        bleu,
        ref_len,
        hyp_len,
        cased,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> TokenSeq {
        TokenSeq::from_whitespace(s)
    }

    #[test]
    fn wer_single_substitution() {
        let r = wer(&seq("a b c"), &seq("a x c")).unwrap();
        assert_eq!((r.subs, r.dels, r.ins, r.hits), (1, 0, 0, 2));
        assert_eq!(r.wer(), 1.0 / 3.0);
        assert_eq!(r.wrr(), 2.0 / 3.0);
    }

    #[test]
    fn wer_identity() {
        let r = wer(&seq("a b c"), &seq("a b c")).unwrap();
        assert_eq!(r.wer(), 0.0);
        assert_eq!(r.wrr(), 1.0);
    }

    #[test]
    fn wer_all_deletions() {
        let r = wer(&seq("a b"), &seq("")).unwrap();
        assert_eq!((r.subs, r.dels, r.ins, r.hits), (0, 2, 0, 0));
        assert_eq!(r.wer(), 1.0);
        assert_eq!(r.wrr(), 0.0);
    }

    #[test]
    fn wer_empty_reference_is_an_error() {
        assert!(matches!(wer(&seq(""), &seq("a")).unwrap_err(), Error::EmptyReference));
    }

    #[test]
    fn wer_prefers_substitution_on_ties() {
        // distance 2 alignments of (a b, x) could be del+del+ins or
        // sub+del; the backtrace must report a substitution
        let r = wer(&seq("a b"), &seq("x")).unwrap();
        assert_eq!((r.subs, r.dels, r.ins, r.hits), (1, 1, 0, 0));
    }

    #[test]
    fn wer_exceeds_one_under_insertions() {
        let r = wer(&seq("a"), &seq("a b c")).unwrap();
        assert_eq!((r.subs, r.dels, r.ins, r.hits), (0, 0, 2, 1));
        assert_eq!(r.wer(), 2.0);
        assert_eq!(r.wrr(), 1.0);
    }

    #[test]
    fn corpus_wer_micro_average() {
        let refs = [seq("a b c"), seq("d e f")];
        let hyps = [seq("a x c"), seq("d e f")];
        let r = corpus_wer(&refs, &hyps).unwrap();
        assert_eq!(r.wer(), 1.0 / 6.0);
        assert_eq!(r.wrr(), 5.0 / 6.0);
        assert_eq!(r.n_ref, 6);
    }

    #[test]
    fn corpus_wer_identity_and_errors() {
        let refs = [seq("a b"), seq("c")];
        assert_eq!(corpus_wer(&refs, &refs).unwrap().wer(), 0.0);
        assert!(matches!(
            corpus_wer(&refs, &[seq("a")]).unwrap_err(),
            Error::LengthMismatch { left: 2, right: 1 }
        ));
        assert!(matches!(
            corpus_wer(&[seq("")], &[seq("a")]).unwrap_err(),
            Error::EmptyReference
        ));
    }

    #[test]
    fn wer_report_format() {
        let r = wer(&seq("a b c"), &seq("a x c")).unwrap();
        assert_eq!(r.to_string(), "WER=33.33% WRR=66.67% N=3 S=1 D=0 I=0");
    }

    #[test]
    fn bleu_identity_is_100() {
        let lines = ["the cat sat on the mat", "a b c d e"];
        let r = bleu(&lines, &lines, true).unwrap();
        assert_eq!(r.bleu, 100.0);
        assert_eq!(r.brevity_penalty, 1.0);
        assert_eq!(r.precisions, [1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn bleu_clipping_example() {
        // hyp unigrams: the*3 cat*2 on mat (7); clipping caps the at 2
        // and cat at 1, so 5 of 7 survive; 4-grams all miss
        let r = bleu(&["the cat sat on the mat"], &["the cat the cat on the mat"], true).unwrap();
        assert_eq!(r.precisions[0], 5.0 / 7.0);
        assert_eq!(r.precisions[1], 3.0 / 6.0);
        assert_eq!(r.precisions[2], 1.0 / 5.0);
        assert_eq!(r.precisions[3], 0.0);
        assert_eq!(r.brevity_penalty, 1.0);
        assert_eq!((r.hyp_len, r.ref_len), (7, 6));
        assert_eq!(r.bleu, 0.0);
    }

    #[test]
    fn bleu_zero_on_disjoint_unigrams() {
        let r = bleu(&["a b c d"], &["x y z w"], true).unwrap();
        assert_eq!(r.bleu, 0.0);
        assert_eq!(r.precisions[0], 0.0);
    }

    #[test]
    fn bleu_brevity_penalty_kicks_in_when_short() {
        let r = bleu(&["a b c d e"], &["a b c d"], true).unwrap();
        assert_eq!(r.brevity_penalty, (1.0f64 - 5.0 / 4.0).exp());
        assert!(r.bleu > 0.0);
        assert!(r.brevity_penalty < 1.0);
    }

    #[test]
    fn bleu_uncased_forgives_case() {
        let refs = ["The Cat Sat On The Mat"];
        let hyps = ["the cat sat on the mat"];
        let cased = bleu(&refs, &hyps, true).unwrap();
        let uncased = bleu(&refs, &hyps, false).unwrap();
        assert_eq!(cased.bleu, 0.0);
        assert_eq!(uncased.bleu, 100.0);
    }

    #[test]
    fn bleu_applies_internal_tokenization() {
        // punctuation splits identically on both sides, so scores stay 100
        let r = bleu(&["Hello, world! Yes."], &["Hello, world! Yes."], true).unwrap();
        assert_eq!(r.bleu, 100.0);
        assert!(r.hyp_len >= 6);
    }

    #[test]
    fn bleu_errors() {
        assert!(matches!(
            bleu(&["a", "b"], &["a"], true).unwrap_err(),
            Error::LengthMismatch { left: 2, right: 1 }
        ));
        assert!(matches!(bleu::<&str, &str>(&[], &[], true).unwrap_err(), Error::EmptyCorpus));
        assert!(matches!(bleu(&["a"], &[""], true).unwrap_err(), Error::EmptyCorpus));
    }

    #[test]
    fn bleu_multi_reference_clipping_and_length() {
        // closest ref length to the 2-token hyp is 2 (tie broken short)
        let refs = vec![vec!["a b c", "a b"]];
        let r = bleu_multi(&refs, &["a b"], true).unwrap();
        assert_eq!(r.ref_len, 2);
        assert_eq!(r.precisions[0], 1.0);
        assert_eq!(r.precisions[1], 1.0);
        // clipping takes the max count over references
        let refs = vec![vec!["x x y", "x z"]];
        let r = bleu_multi(&refs, &["x x"], true).unwrap();
        assert_eq!(r.precisions[0], 1.0);
    }

    #[test]
    fn bleu_report_format() {
        let r = bleu(&["the cat sat on the mat"], &["the cat the cat on the mat"], true).unwrap();
        assert_eq!(
            r.to_string(),
            "BLEU = 0.00, 71.4/50.0/20.0/0.0 (BP=1.000, ratio=1.167, hyp_len=7, ref_len=6)"
        );
        let ident = bleu(&["a b c d"], &["a b c d"], true).unwrap();
        assert_eq!(
            ident.to_string(),
            "BLEU = 100.00, 100.0/100.0/100.0/100.0 (BP=1.000, ratio=1.000, hyp_len=4, ref_len=4)"
        );
    }

    fn arb_lines() -> impl Strategy<Value = Vec<(String, String)>> {
        let line = proptest::collection::vec("[a-d]", 1..8).prop_map(|w| w.join(" "));
        proptest::collection::vec((line.clone(), line), 1..12)
    }

    proptest! {
        #[test]
        fn wer_count_invariants(
            r in proptest::collection::vec("[a-c]", 0..10),
            h in proptest::collection::vec("[a-c]", 0..10),
        ) {
            let (rs, hs) = (TokenSeq::new(r.clone()).unwrap(), TokenSeq::new(h.clone()).unwrap());
            let rep = align_counts(&rs, &hs);
            prop_assert_eq!(rep.hits + rep.subs + rep.dels, r.len());
            prop_assert_eq!(rep.hits + rep.subs + rep.ins, h.len());
            // total edits equal the edit distance
            prop_assert_eq!(
                rep.subs + rep.dels + rep.ins,
                crate::similarity::token_edit_distance(&rs, &hs)
            );
        }

        #[test]
        fn bleu_is_permutation_invariant(lines in arb_lines(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let refs: Vec<String> = lines.iter().map(|(r, _)| r.clone()).collect();
            let hyps: Vec<String> = lines.iter().map(|(_, h)| h.clone()).collect();
            let base = bleu(&refs, &hyps, true).unwrap();
            let mut order: Vec<usize> = (0..lines.len()).collect();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
            let refs2: Vec<String> = order.iter().map(|&i| refs[i].clone()).collect();
            let hyps2: Vec<String> = order.iter().map(|&i| hyps[i].clone()).collect();
            let shuffled = bleu(&refs2, &hyps2, true).unwrap();
            prop_assert_eq!(base.bleu.to_bits(), shuffled.bleu.to_bits());
            prop_assert_eq!(base.precisions, shuffled.precisions);
        }
    }
}
