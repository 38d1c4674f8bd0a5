//! Tokenization, detokenization, domain-tag injection, and the French
//! punctuation fix.
//!
//! The tokenizer implements a documented rule subset rather than the full
//! Moses behavior: leading/trailing punctuation from the set
//! `. , ! ? ; : ( ) " « »` is split off as separate tokens, tokens
//! containing `://` are kept whole, and in French the elision prefixes
//! (l', d', j', n', s', t', c', qu', m') are split from the following
//! word. Everything here is a pure function.

use std::collections::BTreeMap;
use std::fmt;

use crate::corpus::{DataOrigin, Sentence, SentencePair};
use crate::error::{Error, Result};

/// An ordered sequence of non-empty tokens, none containing whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Build from explicit tokens, rejecting empty or whitespace-bearing
    /// ones.
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        for t in &tokens {
            if t.is_empty() {
                return Err(Error::InvalidConfig("empty token".into()));
            }
            if t.chars().any(char::is_whitespace) {
                return Err(Error::InvalidConfig(format!("token `{t}` contains whitespace")));
            }
        }
        Ok(TokenSeq(tokens))
    }

    /// Split a line on whitespace. Never fails: the pieces are non-empty
    /// and whitespace-free by construction.
    pub fn from_whitespace(line: &str) -> Self {
        TokenSeq(line.split_whitespace().map(str::to_string).collect())
    }

    pub(crate) fn from_raw(tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        TokenSeq(tokens)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

const SPLIT_PUNCT: [char; 11] = ['.', ',', '!', '?', ';', ':', '(', ')', '"', '«', '»'];

fn is_split_punct(c: char) -> bool {
    SPLIT_PUNCT.contains(&c)
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Byte length of a leading elision prefix (`l'`, `qu'`, ...) when the
/// token continues past it.
fn elision_prefix_len(s: &str) -> Option<usize> {
    let mut it = s.char_indices();
    let (_, c0) = it.next()?;
    let (_, c1) = it.next()?;
    if is_apostrophe(c1) && matches!(c0.to_ascii_lowercase(), 'l' | 'd' | 'j' | 'n' | 's' | 't' | 'c' | 'm') {
        return it.next().map(|(i2, _)| i2);
    }
    let (_, c2) = it.next()?;
    if is_apostrophe(c2) && c0.to_ascii_lowercase() == 'q' && c1.to_ascii_lowercase() == 'u' {
        return it.next().map(|(i3, _)| i3);
    }
    None
}

fn push_elision_split(token: &str, out: &mut Vec<String>) {
    let mut rest = token;
    while let Some(n) = elision_prefix_len(rest) {
        out.push(rest[..n].to_string());
        rest = &rest[n..];
    }
    out.push(rest.to_string());
}

/// Tokenize one line. Deterministic; empty input gives an empty sequence.
/// Any language other than `fr` uses the neutral rule set (no elision
/// splitting).
pub fn tokenize(text: &str, lang: &str) -> TokenSeq {
    tokenize_rules(text, lang == "fr")
}

/// Neutral-rule tokenization, used internally for BLEU.
pub(crate) fn tokenize_neutral(text: &str) -> TokenSeq {
    tokenize_rules(text, false)
}

fn tokenize_rules(text: &str, french_elision: bool) -> TokenSeq {
    let mut out: Vec<String> = Vec::new();
    for chunk in text.split_whitespace() {
        if chunk.contains("://") {
            out.push(chunk.to_string());
            continue;
        }
        let mut middle = chunk;
        // leading punctuation, one token per character
        while let Some(c) = middle.chars().next() {
            if !is_split_punct(c) {
                break;
            }
            out.push(c.to_string());
            middle = &middle[c.len_utf8()..];
        }
        // trailing punctuation, emitted after the middle in text order
        let mut trailing: Vec<char> = Vec::new();
        while let Some(c) = middle.chars().next_back() {
            if !is_split_punct(c) {
                break;
            }
            trailing.push(c);
            middle = &middle[..middle.len() - c.len_utf8()];
        }
        if !middle.is_empty() {
            if french_elision {
                push_elision_split(middle, &mut out);
            } else {
                out.push(middle.to_string());
            }
        }
        out.extend(trailing.into_iter().rev().map(|c| c.to_string()));
    }
    TokenSeq::from_raw(out)
}

/// Join tokens back into a line: no space before `, . ! ? ;` and, in
/// French, no space after a token ending in an apostrophe. For sentences
/// already in canonical spacing this inverts [`tokenize`].
pub fn detokenize(tokens: &TokenSeq, lang: &str) -> String {
    let french = lang == "fr";
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            let attach = matches!(tok.as_str(), "," | "." | "!" | "?" | ";")
                || (french && tokens.as_slice()[i - 1].chars().next_back().is_some_and(is_apostrophe));
            if !attach {
                out.push(' ');
            }
        }
        out.push_str(tok);
    }
    out
}

/// Maps data origins to the tag token prepended to source sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagConfig {
    map: BTreeMap<DataOrigin, String>,
}

impl TagConfig {
    /// Build from origin/tag entries. Tags must be unique, non-empty, and
    /// whitespace-free.
    pub fn new(entries: impl IntoIterator<Item = (DataOrigin, String)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (origin, tag) in entries {
            if tag.is_empty() {
                return Err(Error::InvalidConfig(format!("empty tag for origin `{origin}`")));
            }
            if tag.chars().any(char::is_whitespace) {
                return Err(Error::InvalidConfig(format!("tag `{tag}` contains whitespace")));
            }
            if !seen.insert(tag.clone()) {
                return Err(Error::InvalidConfig(format!("duplicate tag `{tag}`")));
            }
            map.insert(origin, tag);
        }
        Ok(TagConfig { map })
    }

    /// Angle-bracket tags `<name>` for every built-in origin.
    pub fn default_tags() -> Self {
        let entries = DataOrigin::known()
            .into_iter()
            .map(|o| {
                let tag = format!("<{}>", o.name());
                (o, tag)
            })
            .collect::<Vec<_>>();
        TagConfig::new(entries).expect("built-in tags are valid")
    }

    pub fn tag_for(&self, origin: &DataOrigin) -> Result<&str> {
        self.map
            .get(origin)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownOrigin(origin.name().to_string()))
    }
}

/// Prepend the origin tag to the source side. Not idempotent: calling
/// twice double-tags, so tag exactly once. [`strip_tag`] is the inverse.
pub fn inject_tag(pair: &SentencePair, cfg: &TagConfig) -> Result<SentencePair> {
    let tag = cfg.tag_for(&pair.origin)?;
    let text = format!("{tag} {}", pair.source.text);
    Ok(SentencePair {
        source: Sentence::new(text, &pair.source.lang)?,
        target: pair.target.clone(),
        origin: pair.origin.clone(),
        index: pair.index,
    })
}

/// Remove the origin tag from the source side when present; a pair whose
/// source does not start with its tag is returned unchanged.
pub fn strip_tag(pair: &SentencePair, cfg: &TagConfig) -> Result<SentencePair> {
    let tag = cfg.tag_for(&pair.origin)?;
    let prefix = format!("{tag} ");
    let text = match pair.source.text.strip_prefix(&prefix) {
        Some(rest) => rest.to_string(),
        None => return Ok(pair.clone()),
    };
    Ok(SentencePair {
        source: Sentence::new(text, &pair.source.lang)?,
        target: pair.target.clone(),
        origin: pair.origin.clone(),
        index: pair.index,
    })
}

/// Normalize MTNT-style French punctuation: intra-word ASCII apostrophes
/// become U+2019 and ASCII double quotes become guillemets in left-to-right
/// alternation («&nbsp;opening, »&nbsp;closing), collapsing spaces adjacent
/// to the inserted ones. An unpaired final quote is left alone, which
/// makes the whole transform idempotent.
pub fn fix_french_punctuation(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();

    // intra-word apostrophes, judged on the original neighborhood
    let mut fixed: Vec<char> = Vec::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if c == '\'' {
            let prev_letter = i.checked_sub(1).map(|p| chars[p].is_alphabetic()).unwrap_or(false);
            let next_letter = chars.get(i + 1).map(|n| n.is_alphabetic()).unwrap_or(false);
            if prev_letter && next_letter {
                fixed.push('\u{2019}');
                continue;
            }
        }
        fixed.push(c);
    }

    // paired double quotes; an odd trailing quote stays
    let total_quotes = fixed.iter().filter(|&&c| c == '"').count();
    let paired = total_quotes - total_quotes % 2;
    let mut out = String::with_capacity(text.len() + 8);
    let mut seen = 0usize;
    let mut swallow_spaces = false;
    for &c in &fixed {
        if c == '"' && seen < paired {
            if seen % 2 == 0 {
                out.push('«');
                out.push(' ');
                swallow_spaces = true;
            } else {
                while out.ends_with(' ') {
                    out.pop();
                }
                out.push(' ');
                out.push('»');
                swallow_spaces = false;
            }
            seen += 1;
            continue;
        }
        if swallow_spaces && c == ' ' {
            continue;
        }
        swallow_spaces = false;
        out.push(c);
    }
    out
}
