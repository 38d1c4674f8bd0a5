//! Parallel and monolingual corpora with per-pair provenance.
//!
//! Corpora are immutable once loaded and safe to share read-only across
//! threads. Lines are split on LF with a trailing CR stripped, so CRLF
//! input is tolerated. Empty lines are kept as empty sentences to preserve
//! alignment; downstream operations decide what to do with empties.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance label carried by every sentence pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataOrigin {
    Clean,
    Mtnt,
    FuzzyParallel,
    FuzzyMono,
    ForwardTranslation,
    BackTranslation,
    Asr,
    Iwslt,
    Mustc,
    Other(String),
}

impl DataOrigin {
    /// Stable name used in tag configs, manifests, and CLI flags.
    pub fn name(&self) -> &str {
        match self {
            DataOrigin::Clean => "clean",
            DataOrigin::Mtnt => "mtnt",
            DataOrigin::FuzzyParallel => "fuzzy_parallel",
            DataOrigin::FuzzyMono => "fuzzy_mono",
            DataOrigin::ForwardTranslation => "forward_translation",
            DataOrigin::BackTranslation => "back_translation",
            DataOrigin::Asr => "asr",
            DataOrigin::Iwslt => "iwslt",
            DataOrigin::Mustc => "mustc",
            DataOrigin::Other(s) => s,
        }
    }

    /// All built-in origins, in declaration order.
    pub fn known() -> [DataOrigin; 9] {
        [
            DataOrigin::Clean,
            DataOrigin::Mtnt,
            DataOrigin::FuzzyParallel,
            DataOrigin::FuzzyMono,
            DataOrigin::ForwardTranslation,
            DataOrigin::BackTranslation,
            DataOrigin::Asr,
            DataOrigin::Iwslt,
            DataOrigin::Mustc,
        ]
    }
}

impl fmt::Display for DataOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DataOrigin {
    type Err = std::convert::Infallible;

    /// Any string parses; unknown names become `Other`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "clean" => DataOrigin::Clean,
            "mtnt" => DataOrigin::Mtnt,
            "fuzzy_parallel" => DataOrigin::FuzzyParallel,
            "fuzzy_mono" => DataOrigin::FuzzyMono,
            "forward_translation" => DataOrigin::ForwardTranslation,
            "back_translation" => DataOrigin::BackTranslation,
            "asr" => DataOrigin::Asr,
            "iwslt" => DataOrigin::Iwslt,
            "mustc" => DataOrigin::Mustc,
            other => DataOrigin::Other(other.to_string()),
        })
    }
}

impl Serialize for DataOrigin {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DataOrigin {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse().expect("infallible"))
    }
}

/// One line of text in one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    pub lang: String,
}

impl Sentence {
    /// Build a sentence, rejecting embedded newlines and malformed
    /// language codes (must be non-empty lowercase ASCII).
    pub fn new(text: impl Into<String>, lang: &str) -> Result<Self> {
        let text = text.into();
        if text.contains('\n') || text.contains('\r') {
            return Err(Error::InvalidConfig(
                "sentence text must not contain newline characters".into(),
            ));
        }
        validate_lang(lang)?;
        Ok(Sentence {
            text,
            lang: lang.to_string(),
        })
    }
}

pub(crate) fn validate_lang(lang: &str) -> Result<()> {
    let ok = !lang.is_empty()
        && lang
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "language code `{lang}` must be non-empty lowercase ASCII"
        )))
    }
}

/// An aligned source/target sentence pair with provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub source: Sentence,
    pub target: Sentence,
    pub origin: DataOrigin,
    /// Ordinal within the owning corpus; unique there.
    pub index: usize,
}

/// An ordered collection of aligned sentence pairs sharing one language
/// direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pairs: Vec<SentencePair>,
    src_lang: String,
    tgt_lang: String,
}

impl Corpus {
    /// Empty corpus for the given direction. Source and target languages
    /// must differ.
    pub fn new(src_lang: &str, tgt_lang: &str) -> Result<Self> {
        validate_lang(src_lang)?;
        validate_lang(tgt_lang)?;
        if src_lang == tgt_lang {
            return Err(Error::InvalidConfig(format!(
                "source and target language must differ, both are `{src_lang}`"
            )));
        }
        Ok(Corpus {
            pairs: Vec::new(),
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
        })
    }

    /// Append a pair; the index is assigned automatically.
    pub fn push(&mut self, source_text: impl Into<String>, target_text: impl Into<String>, origin: DataOrigin) -> Result<()> {
        let index = self.pairs.len();
        self.pairs.push(SentencePair {
            source: Sentence::new(source_text, &self.src_lang)?,
            target: Sentence::new(target_text, &self.tgt_lang)?,
            origin,
            index,
        });
        Ok(())
    }

    /// Rebuild a corpus from pairs that already carry valid indices
    /// (subsets keep their original ordinals).
    pub(crate) fn from_pairs(src_lang: &str, tgt_lang: &str, pairs: Vec<SentencePair>) -> Self {
        Corpus {
            pairs,
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
        }
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn src_lang(&self) -> &str {
        &self.src_lang
    }

    pub fn tgt_lang(&self) -> &str {
        &self.tgt_lang
    }

    /// Same pairs with source and target sides exchanged; indices are
    /// reassigned in order. Involutive.
    pub fn swapped(&self) -> Corpus {
        let pairs = self
            .pairs
            .iter()
            .enumerate()
            .map(|(index, p)| SentencePair {
                source: p.target.clone(),
                target: p.source.clone(),
                origin: p.origin.clone(),
                index,
            })
            .collect();
        Corpus {
            pairs,
            src_lang: self.tgt_lang.clone(),
            tgt_lang: self.src_lang.clone(),
        }
    }
}

/// Monolingual corpus: ordered sentences in one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoCorpus {
    sentences: Vec<Sentence>,
    lang: String,
}

impl MonoCorpus {
    pub fn new(lang: &str) -> Result<Self> {
        validate_lang(lang)?;
        Ok(MonoCorpus {
            sentences: Vec::new(),
            lang: lang.to_string(),
        })
    }

    pub fn push(&mut self, text: impl Into<String>) -> Result<()> {
        let s = Sentence::new(text, &self.lang)?;
        self.sentences.push(s);
        Ok(())
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }
}

/// Corpus size summary: sentence count plus whitespace-token word counts
/// over the raw text of each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    #[serde(rename = "sentences")]
    pub sentence_count: usize,
    #[serde(rename = "src_words")]
    pub source_word_count: usize,
    #[serde(rename = "tgt_words")]
    pub target_word_count: usize,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sentences={} src_words={} tgt_words={}",
            self.sentence_count, self.source_word_count, self.target_word_count
        )
    }
}

/// Read a file as UTF-8 lines. Lines are split on LF; a trailing CR is
/// stripped. Invalid UTF-8 reports the 1-based line number.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path)?;
    let mut reader = BufReader::new(file);
    let mut lines = Vec::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        let text = std::str::from_utf8(&buf).map_err(|_| Error::InvalidUtf8 { line: line_no })?;
        lines.push(text.to_string());
    }
    Ok(lines)
}

/// Load an aligned pair of one-sentence-per-line files.
pub fn load_parallel(
    src_path: &Path,
    tgt_path: &Path,
    src_lang: &str,
    tgt_lang: &str,
    origin: DataOrigin,
) -> Result<Corpus> {
    let src_lines = read_lines(src_path)?;
    let tgt_lines = read_lines(tgt_path)?;
    if src_lines.len() != tgt_lines.len() {
        return Err(Error::LineCountMismatch {
            left: src_lines.len(),
            right: tgt_lines.len(),
        });
    }
    let mut corpus = Corpus::new(src_lang, tgt_lang)?;
    for (src, tgt) in src_lines.into_iter().zip(tgt_lines) {
        corpus.push(src, tgt, origin.clone())?;
    }
    Ok(corpus)
}

/// Load a TSV file: source TAB target, one pair per line.
pub fn load_tsv(path: &Path, src_lang: &str, tgt_lang: &str, origin: DataOrigin) -> Result<Corpus> {
    let lines = read_lines(path)?;
    parse_tsv(lines, src_lang, tgt_lang, origin)
}

/// Parse already-read TSV lines; line numbers in errors are 1-based.
pub fn parse_tsv(lines: Vec<String>, src_lang: &str, tgt_lang: &str, origin: DataOrigin) -> Result<Corpus> {
    let mut corpus = Corpus::new(src_lang, tgt_lang)?;
    for (i, line) in lines.into_iter().enumerate() {
        let mut fields = line.split('\t');
        let (src, tgt) = match (fields.next(), fields.next(), fields.next()) {
            (Some(src), Some(tgt), None) => (src, tgt),
            _ => return Err(Error::BadRecord { line: i + 1 }),
        };
        corpus.push(src, tgt, origin.clone())?;
    }
    Ok(corpus)
}

/// Load a one-sentence-per-line monolingual file.
pub fn load_mono(path: &Path, lang: &str) -> Result<MonoCorpus> {
    let lines = read_lines(path)?;
    let mut mono = MonoCorpus::new(lang)?;
    for line in lines {
        mono.push(line)?;
    }
    Ok(mono)
}

/// Write a corpus back to a pair of line-aligned files. Round-trips with
/// [`load_parallel`]; files end with a trailing newline iff non-empty.
pub fn write_parallel(corpus: &Corpus, src_path: &Path, tgt_path: &Path) -> Result<()> {
    let mut src = BufWriter::new(File::create(src_path)?);
    let mut tgt = BufWriter::new(File::create(tgt_path)?);
    for pair in corpus.pairs() {
        src.write_all(pair.source.text.as_bytes())?;
        src.write_all(b"\n")?;
        tgt.write_all(pair.target.text.as_bytes())?;
        tgt.write_all(b"\n")?;
    }
    src.flush()?;
    tgt.flush()?;
    Ok(())
}

/// Write a corpus as TSV lines to any writer.
pub fn write_tsv<W: Write>(corpus: &Corpus, out: &mut W) -> Result<()> {
    for pair in corpus.pairs() {
        writeln!(out, "{}\t{}", pair.source.text, pair.target.text)?;
    }
    Ok(())
}

/// Sentence and whitespace-word counts. Words are maximal runs of
/// non-whitespace in the raw text, computed before any tokenization.
pub fn corpus_stats(corpus: &Corpus) -> StatsReport {
    let mut source_word_count = 0;
    let mut target_word_count = 0;
    for pair in corpus.pairs() {
        source_word_count += pair.source.text.split_whitespace().count();
        target_word_count += pair.target.text.split_whitespace().count();
    }
    StatsReport {
        sentence_count: corpus.len(),
        source_word_count,
        target_word_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn write_file(dir: &TempDir, name: &str, contents: &[u8]) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(contents).unwrap();
        path
    }

    #[test]
    fn load_parallel_aligns_by_line() {
        let dir = TempDir::new().unwrap();
        let src = write_file(&dir, "s", b"a\nb\nc\n");
        let tgt = write_file(&dir, "t", b"x\ny\nz\n");
        let c = load_parallel(&src, &tgt, "en", "fr", DataOrigin::Clean).unwrap();
        assert_eq!(c.len(), 3);
        for (i, pair) in c.pairs().iter().enumerate() {
            assert_eq!(pair.index, i);
        }
        assert_eq!(c.pairs()[1].source.text, "b");
        assert_eq!(c.pairs()[1].target.text, "y");
    }

    #[test]
    fn load_parallel_line_count_mismatch() {
        let dir = TempDir::new().unwrap();
        let src = write_file(&dir, "s", b"a\nb\nc\n");
        let tgt = write_file(&dir, "t", b"x\ny\nz\nw\n");
        let err = load_parallel(&src, &tgt, "en", "fr", DataOrigin::Clean).unwrap_err();
        match err {
            Error::LineCountMismatch { left, right } => {
                assert_eq!((left, right), (3, 4));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_parallel_empty_files() {
        let dir = TempDir::new().unwrap();
        let src = write_file(&dir, "s", b"");
        let tgt = write_file(&dir, "t", b"");
        let c = load_parallel(&src, &tgt, "en", "fr", DataOrigin::Clean).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn load_parallel_tolerates_crlf_and_missing_final_newline() {
        let dir = TempDir::new().unwrap();
        let src = write_file(&dir, "s", b"a\r\nb");
        let tgt = write_file(&dir, "t", b"x\ny\n");
        let c = load_parallel(&src, &tgt, "en", "fr", DataOrigin::Clean).unwrap();
        assert_eq!(c.pairs()[0].source.text, "a");
        assert_eq!(c.pairs()[1].source.text, "b");
    }

    #[test]
    fn load_parallel_invalid_utf8_reports_line() {
        let dir = TempDir::new().unwrap();
        let src = write_file(&dir, "s", b"ok\n\xff\xfe\nalso ok\n");
        let tgt = write_file(&dir, "t", b"x\ny\nz\n");
        let err = load_parallel(&src, &tgt, "en", "fr", DataOrigin::Clean).unwrap_err();
        match err {
            Error::InvalidUtf8 { line } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_tsv_single_record() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "p.tsv", b"a b\tc d\n");
        let c = load_tsv(&path, "en", "fr", DataOrigin::Mtnt).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.pairs()[0].source.text, "a b");
        assert_eq!(c.pairs()[0].target.text, "c d");
        assert_eq!(c.pairs()[0].origin, DataOrigin::Mtnt);
    }

    #[test]
    fn load_tsv_bad_record() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "p.tsv", b"a b c d\n");
        match load_tsv(&path, "en", "fr", DataOrigin::Mtnt).unwrap_err() {
            Error::BadRecord { line } => assert_eq!(line, 1),
            other => panic!("unexpected error: {other}"),
        }
        // two tabs is just as bad as zero
        let path = write_file(&dir, "q.tsv", b"a\tb\tc\n");
        assert!(matches!(
            load_tsv(&path, "en", "fr", DataOrigin::Mtnt).unwrap_err(),
            Error::BadRecord { line: 1 }
        ));
    }

    #[test]
    fn load_tsv_empty() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "p.tsv", b"");
        let c = load_tsv(&path, "en", "fr", DataOrigin::Mtnt).unwrap();
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn write_parallel_round_trip() {
        let dir = TempDir::new().unwrap();
        let mut c = Corpus::new("fr", "en").unwrap();
        for (s, t) in [
            ("l'équipe a gagné", "the team won"),
            ("", ""),
            ("éàü", "eau"),
            ("un deux", "one two"),
            ("fin", "end"),
        ] {
            c.push(s, t, DataOrigin::Mtnt).unwrap();
        }
        let src = dir.path().join("out.fr");
        let tgt = dir.path().join("out.en");
        write_parallel(&c, &src, &tgt).unwrap();
        let back = load_parallel(&src, &tgt, "fr", "en", DataOrigin::Mtnt).unwrap();
        assert_eq!(back, c);
        // bytes preserved exactly
        assert!(std::fs::read_to_string(&src).unwrap().contains("l'équipe"));
    }

    #[test]
    fn write_parallel_empty_corpus_writes_empty_files() {
        let dir = TempDir::new().unwrap();
        let c = Corpus::new("en", "fr").unwrap();
        let src = dir.path().join("s");
        let tgt = dir.path().join("t");
        write_parallel(&c, &src, &tgt).unwrap();
        assert_eq!(std::fs::metadata(&src).unwrap().len(), 0);
        assert_eq!(std::fs::metadata(&tgt).unwrap().len(), 0);
    }

    #[test]
    fn stats_counts_whitespace_words() {
        let mut c = Corpus::new("en", "fr").unwrap();
        c.push("a b", "c", DataOrigin::Clean).unwrap();
        let s = corpus_stats(&c);
        assert_eq!(
            s,
            StatsReport {
                sentence_count: 1,
                source_word_count: 2,
                target_word_count: 1
            }
        );
    }

    #[test]
    fn stats_empty_corpus_is_all_zero() {
        let c = Corpus::new("en", "fr").unwrap();
        let s = corpus_stats(&c);
        assert_eq!((s.sentence_count, s.source_word_count, s.target_word_count), (0, 0, 0));
    }

    #[test]
    fn stats_are_additive_over_concatenation() {
        let mut a = Corpus::new("en", "fr").unwrap();
        a.push("one two three", "un deux", DataOrigin::Clean).unwrap();
        a.push("four", "quatre cinq six", DataOrigin::Clean).unwrap();
        let mut b = Corpus::new("en", "fr").unwrap();
        b.push("seven eight", "sept", DataOrigin::Mtnt).unwrap();

        let mut ab = a.clone();
        for p in b.pairs() {
            ab.push(p.source.text.clone(), p.target.text.clone(), p.origin.clone()).unwrap();
        }
        let (sa, sb, sab) = (corpus_stats(&a), corpus_stats(&b), corpus_stats(&ab));
        assert_eq!(sab.sentence_count, sa.sentence_count + sb.sentence_count);
        assert_eq!(sab.source_word_count, sa.source_word_count + sb.source_word_count);
        assert_eq!(sab.target_word_count, sa.target_word_count + sb.target_word_count);
    }

    #[test]
    fn stats_text_and_json_formats() {
        let mut c = Corpus::new("en", "fr").unwrap();
        c.push("a b", "c", DataOrigin::Clean).unwrap();
        let s = corpus_stats(&c);
        assert_eq!(s.to_string(), "sentences=1 src_words=2 tgt_words=1");
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"sentences":1,"src_words":2,"tgt_words":1}"#
        );
    }

    #[test]
    fn swapped_is_involutive() {
        let mut c = Corpus::new("en", "fr").unwrap();
        c.push("hi", "salut", DataOrigin::Mtnt).unwrap();
        c.push("bye", "ciao", DataOrigin::Clean).unwrap();
        assert_eq!(c.swapped().swapped(), c);
        assert_eq!(c.swapped().src_lang(), "fr");
        assert_eq!(c.swapped().pairs()[0].source.text, "salut");
    }

    #[test]
    fn corpus_rejects_same_language_direction() {
        assert!(Corpus::new("en", "en").is_err());
        assert!(Corpus::new("EN", "fr").is_err());
        assert!(Corpus::new("", "fr").is_err());
    }

    #[test]
    fn origin_name_round_trip() {
        for origin in DataOrigin::known() {
            let parsed: DataOrigin = origin.name().parse().unwrap();
            assert_eq!(parsed, origin);
        }
        let other: DataOrigin = "reddit_crawl".parse().unwrap();
        assert_eq!(other, DataOrigin::Other("reddit_crawl".into()));
    }
}
