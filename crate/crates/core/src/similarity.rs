//! Token-level Levenshtein distance, the normalized similarity score, and
//! an inverted-index candidate pre-selector.
//!
//! The score is a normalized distance (smaller = more similar): edit
//! distance divided by the shorter length. A score is undefined when
//! exactly one side is empty; undefined scores never match anything.
//! Candidate ranking uses Jaccard similarity over deduplicated token
//! sets, with exact integer comparisons so ordering is deterministic.

use std::collections::HashMap;

use crate::text_norm::TokenSeq;

/// Normalized similarity score: edit distance over the minimum length.
/// Undefined when exactly one sequence is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimScore(Option<f64>);

impl SimScore {
    pub fn is_defined(&self) -> bool {
        self.0.is_some()
    }

    pub fn value(&self) -> Option<f64> {
        self.0
    }

    /// Match predicate: defined and at most `lambda`.
    pub fn is_match(&self, lambda: f64) -> bool {
        self.0.is_some_and(|v| v <= lambda)
    }
}

/// Minimum number of token insertions, deletions, and substitutions (unit
/// costs) transforming `a` into `b`. Two-row dynamic program.
pub fn token_edit_distance(a: &TokenSeq, b: &TokenSeq) -> usize {
    let (a, b) = (a.as_slice(), b.as_slice());
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr: Vec<usize> = vec![0; b.len() + 1];
    for (i, ta) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, tb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ta != tb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Edit distance divided by the minimum of the two lengths. Both empty
/// gives 0 (identical); exactly one empty is undefined.
pub fn eq1_score(a: &TokenSeq, b: &TokenSeq) -> SimScore {
    match (a.len(), b.len()) {
        (0, 0) => SimScore(Some(0.0)),
        (0, _) | (_, 0) => SimScore(None),
        (la, lb) => {
            let d = token_edit_distance(a, b) as f64;
            SimScore(Some(d / la.min(lb) as f64))
        }
    }
}

/// Immutable inverted index over deduplicated token sets. Built once,
/// then queried from any number of threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityIndex {
    postings: HashMap<String, Vec<usize>>,
    set_sizes: Vec<usize>,
}

impl SimilarityIndex {
    /// Index the deduplicated token set of every sentence. Postings lists
    /// come out sorted ascending because sentences are scanned in order.
    pub fn build(sentences: &[TokenSeq]) -> SimilarityIndex {
        let mut postings: HashMap<String, Vec<usize>> = HashMap::new();
        let mut set_sizes = Vec::with_capacity(sentences.len());
        for (id, sent) in sentences.iter().enumerate() {
            let mut uniq: Vec<&String> = sent.iter().collect();
            uniq.sort_unstable();
            uniq.dedup();
            set_sizes.push(uniq.len());
            for tok in uniq {
                postings.entry(tok.clone()).or_default().push(id);
            }
        }
        SimilarityIndex { postings, set_sizes }
    }

    /// Number of indexed sentences.
    pub fn len(&self) -> usize {
        self.set_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set_sizes.is_empty()
    }

    /// Posting list (ascending sentence ids) for one token.
    pub fn postings(&self, token: &str) -> &[usize] {
        self.postings.get(token).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Ids ranked by descending Jaccard similarity to the query's token
    /// set, ties broken by ascending id, zero-overlap ids excluded, at
    /// most `k` results. `exclude` is never returned.
    pub fn top_k_candidates(&self, query: &TokenSeq, k: usize, exclude: Option<usize>) -> Vec<usize> {
        self.top_k_min_jaccard(query, k, exclude, 0.0)
    }

    /// As [`top_k_candidates`](Self::top_k_candidates) with a minimum
    /// Jaccard cutoff applied before ranking.
    pub fn top_k_min_jaccard(
        &self,
        query: &TokenSeq,
        k: usize,
        exclude: Option<usize>,
        min_jaccard: f64,
    ) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        let mut uniq: Vec<&String> = query.iter().collect();
        uniq.sort_unstable();
        uniq.dedup();
        let query_size = uniq.len();
        let mut overlap: HashMap<usize, usize> = HashMap::new();
        for tok in uniq {
            for &id in self.postings(tok) {
                *overlap.entry(id).or_insert(0) += 1;
            }
        }
        // (id, intersection, union); Jaccard = inter/union compared via
        // integer cross-multiplication to keep ordering exact
        let mut cands: Vec<(usize, usize, usize)> = overlap
            .into_iter()
            .filter(|&(id, _)| Some(id) != exclude)
            .map(|(id, inter)| (id, inter, query_size + self.set_sizes[id] - inter))
            .filter(|&(_, inter, union)| inter as f64 >= min_jaccard * union as f64)
            .collect();
        cands.sort_unstable_by(|&(id_a, ia, ua), &(id_b, ib, ub)| {
            let left = ia as u128 * ub as u128;
            let right = ib as u128 * ua as u128;
            right.cmp(&left).then(id_a.cmp(&id_b))
        });
        cands.truncate(k);
        cands.into_iter().map(|(id, _, _)| id).collect()
    }
}
