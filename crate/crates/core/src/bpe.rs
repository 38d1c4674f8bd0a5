//! Byte-pair-encoding subword merges: learn, apply, undo.
//!
//! Words are represented as character symbols followed by the reserved
//! end-of-word marker `</w>`. Learning greedily merges the most frequent
//! adjacent symbol pair; ties break lexicographically on (left, right)
//! with `</w>` ordered after every ordinary symbol. Applied subwords
//! carry a trailing `@@` continuation marker except the last.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::corpus::read_lines;
use crate::error::{Error, Result};
use crate::text_norm::TokenSeq;

pub const END_OF_WORD: &str = "</w>";
pub const CONTINUATION: &str = "@@";

/// An ordered list of learned merges. Order is the application order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
}

impl BpeModel {
    /// Build from explicit merges, rejecting duplicates and malformed
    /// symbols.
    pub fn new(merges: Vec<(String, String)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (l, r) in &merges {
            for s in [l, r] {
                if s.is_empty() || s.chars().any(char::is_whitespace) {
                    return Err(Error::InvalidConfig(format!("bad merge symbol `{s}`")));
                }
            }
            if !seen.insert((l.clone(), r.clone())) {
                return Err(Error::InvalidConfig(format!("duplicate merge `{l} {r}`")));
            }
        }
        Ok(BpeModel { merges })
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// One merge per line, `left right`, in learn order.
    pub fn save<W: Write>(&self, out: &mut W) -> Result<()> {
        for (l, r) in &self.merges {
            writeln!(out, "{l} {r}")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(read_lines(path)?)
    }

    /// Parse model lines; errors carry 1-based line numbers.
    pub fn parse(lines: Vec<String>) -> Result<Self> {
        let mut merges = Vec::with_capacity(lines.len());
        let mut seen = std::collections::HashSet::new();
        for (i, line) in lines.into_iter().enumerate() {
            let mut fields = line.split(' ');
            let (l, r) = match (fields.next(), fields.next(), fields.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => (l, r),
                _ => return Err(Error::BadModelLine { line: i + 1 }),
            };
            if !seen.insert((l.to_string(), r.to_string())) {
                return Err(Error::BadModelLine { line: i + 1 });
            }
            merges.push((l.to_string(), r.to_string()));
        }
        Ok(BpeModel { merges })
    }
}

/// Lexicographic symbol order with `</w>` greater than every ordinary
/// symbol, so end-of-word merges lose frequency ties.
fn sym_key(s: &str) -> (bool, &str) {
    (s == END_OF_WORD, s)
}

fn word_symbols(word: &str) -> Vec<String> {
    let mut syms: Vec<String> = word.chars().map(|c| c.to_string()).collect();
    syms.push(END_OF_WORD.to_string());
    syms
}

/// Replace every adjacent (left, right) occurrence, scanning left to
/// right without overlap.
fn merge_in_place(syms: &mut Vec<String>, left: &str, right: &str) {
    let mut out = Vec::with_capacity(syms.len());
    let mut i = 0;
    while i < syms.len() {
        if i + 1 < syms.len() && syms[i] == left && syms[i + 1] == right {
            out.push(format!("{left}{right}"));
            i += 2;
        } else {
            out.push(std::mem::take(&mut syms[i]));
            i += 1;
        }
    }
    *syms = out;
}

/// Learn up to `num_merges` merges with the default minimum pair
/// frequency of 2.
pub fn learn_bpe(word_freqs: &HashMap<String, u64>, num_merges: usize) -> BpeModel {
    learn_bpe_with_min_freq(word_freqs, num_merges, 2)
}

/// Learn merges, stopping early once the best pair's frequency drops
/// below `min_freq`. An empty vocabulary yields an empty model.
pub fn learn_bpe_with_min_freq(word_freqs: &HashMap<String, u64>, num_merges: usize, min_freq: u64) -> BpeModel {
    let mut vocab: Vec<(Vec<String>, u64)> = word_freqs
        .iter()
        .filter(|(w, &c)| !w.is_empty() && c > 0)
        .map(|(w, &c)| (word_symbols(w), c))
        .collect();
    let mut merges = Vec::new();
    for _ in 0..num_merges {
        let mut pair_counts: HashMap<(&str, &str), u64> = HashMap::new();
        for (syms, count) in &vocab {
            for win in syms.windows(2) {
                *pair_counts.entry((&win[0], &win[1])).or_insert(0) += count;
            }
        }
        let best = pair_counts.into_iter().max_by(|a, b| {
            a.1.cmp(&b.1)
                .then_with(|| (sym_key(b.0 .0), sym_key(b.0 .1)).cmp(&(sym_key(a.0 .0), sym_key(a.0 .1))))
        });
        let Some(((left, right), count)) = best else {
            break;
        };
        if count < min_freq {
            break;
        }
        let (left, right) = (left.to_string(), right.to_string());
        for (syms, _) in &mut vocab {
            merge_in_place(syms, &left, &right);
        }
        merges.push((left, right));
    }
    BpeModel { merges }
}

/// Count whitespace-separated words across lines, for feeding
/// [`learn_bpe`].
pub fn count_words<'a>(lines: impl IntoIterator<Item = &'a str>) -> HashMap<String, u64> {
    let mut freqs = HashMap::new();
    for line in lines {
        for word in line.split_whitespace() {
            *freqs.entry(word.to_string()).or_insert(0) += 1;
        }
    }
    freqs
}

/// Segment one token into subwords. All subwords except the last carry
/// the `@@` continuation marker; concatenating them (markers stripped)
/// reproduces the token.
pub fn apply_bpe(model: &BpeModel, token: &str) -> Vec<String> {
    if token.is_empty() {
        return Vec::new();
    }
    let mut syms = word_symbols(token);
    for (l, r) in &model.merges {
        if syms.len() < 2 {
            break;
        }
        merge_in_place(&mut syms, l, r);
    }
    if syms.last().map(String::as_str) == Some(END_OF_WORD) {
        syms.pop();
    } else if let Some(last) = syms.last_mut() {
        if let Some(stripped) = last.strip_suffix(END_OF_WORD) {
            *last = stripped.to_string();
        }
    }
    let n = syms.len();
    syms.iter()
        .enumerate()
        .map(|(i, s)| if i + 1 < n { format!("{s}{CONTINUATION}") } else { s.clone() })
        .collect()
}

/// Segment every token of a sequence, flattening the subwords.
pub fn apply_bpe_tokens(model: &BpeModel, tokens: &TokenSeq) -> TokenSeq {
    let mut out = Vec::with_capacity(tokens.len());
    for tok in tokens {
        out.extend(apply_bpe(model, tok));
    }
    TokenSeq::from_raw(out)
}

/// Join continuation-marked subwords back into words. The boolean is a
/// dangling-marker warning: the final token ended in `@@` and was joined
/// as-is after stripping.
pub fn undo_bpe(tokens: &TokenSeq) -> (TokenSeq, bool) {
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut pending = String::new();
    let mut dangling = false;
    for tok in tokens {
        match tok.strip_suffix(CONTINUATION) {
            Some(head) => pending.push_str(head),
            None => {
                pending.push_str(tok);
                out.push(std::mem::take(&mut pending));
            }
        }
    }
    if !pending.is_empty() {
        dangling = true;
        out.push(pending);
    }
    (TokenSeq::from_raw(out), dangling)
}
