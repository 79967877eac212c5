//! Dated text documents, term lexicons and per-document lexicon scoring.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub date: NaiveDate,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Document {
    pub fn new(date: NaiveDate, text: impl Into<String>, source: Option<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InvalidInput(format!("document dated {date} has empty text")));
        }
        Ok(Self { date, text, source })
    }

    pub fn tokens(&self) -> Vec<String> {
        tokenize(&self.text)
    }
}

/// Documents ordered by date (ties keep their input order).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(mut documents: Vec<Document>) -> Self {
        documents.sort_by_key(|d| d.date);
        Self { documents }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Documents dated within `[from, to]`.
    pub fn between(&self, from: NaiveDate, to: NaiveDate) -> &[Document] {
        let start = self.documents.partition_point(|d| d.date < from);
        let end = self.documents.partition_point(|d| d.date <= to).max(start);
        &self.documents[start..end]
    }

    /// Documents in `[from, to]` grouped by day, in date order.
    pub fn by_day(&self, from: NaiveDate, to: NaiveDate) -> BTreeMap<NaiveDate, Vec<&Document>> {
        let mut days: BTreeMap<NaiveDate, Vec<&Document>> = BTreeMap::new();
        for doc in self.between(from, to) {
            days.entry(doc.date).or_default().push(doc);
        }
        days
    }

    pub fn date_range(&self) -> Option<(NaiveDate, NaiveDate)> {
        Some((self.documents.first()?.date, self.documents.last()?.date))
    }
}

/// A named set of lowercase terms; a term may span several tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    terms: BTreeSet<String>,
}

impl Lexicon {
    /// Lowercases and trims every term, dropping blanks and duplicates.
    pub fn new<I, S>(name: impl Into<String>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut set = BTreeSet::new();
        for t in terms {
            let t = t.as_ref().trim().to_lowercase();
            if t.is_empty() {
                continue;
            }
            if tokenize(&t).is_empty() {
                return Err(Error::InvalidTerm(t));
            }
            set.insert(t);
        }
        if set.is_empty() {
            return Err(Error::EmptyLexicon(name));
        }
        Ok(Self { name, terms: set })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Terms in alphabetical order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.terms.contains(token)
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let terms = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    Lexicon::new(name, terms).map_err(|e| match e {
        Error::EmptyLexicon(_) => Error::EmptyLexicon(path.display().to_string()),
        other => other,
    })
}

#[derive(Deserialize)]
struct JsonRecord {
    date: String,
    text: String,
    #[serde(default)]
    source: Option<String>,
}

/// Reads a `.jsonl` or `.tsv` corpus (see the README for the record layout).
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let tsv = match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => false,
        Some("tsv") => true,
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: "corpus files must end in .jsonl or .tsv".into(),
            })
        }
    };
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (date, body, source) = if tsv {
            let mut cols = line.split('\t');
            let date = cols.next().unwrap_or_default().to_string();
            let body = cols
                .next()
                .ok_or_else(|| err("expected date<TAB>text[<TAB>source]".into()))?
                .to_string();
            let source = cols.next().map(str::to_string).filter(|s| !s.is_empty());
            if cols.next().is_some() {
                return Err(err("too many columns".into()));
            }
            (date, body, source)
        } else {
            let rec: JsonRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            (rec.date, rec.text, rec.source)
        };
        let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d")
            .map_err(|e| err(format!("bad date {date:?}: {e}")))?;
        docs.push(Document::new(date, body, source).map_err(|e| err(e.to_string()))?);
    }
    Ok(Corpus::new(docs))
}

/// Writes the corpus in the format implied by the file extension.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => {
            for d in corpus.documents() {
                if d.text.contains(['\t', '\n', '\r']) {
                    return Err(Error::InvalidInput(format!(
                        "document dated {} cannot be stored as TSV",
                        d.date
                    )));
                }
                out.push_str(&d.date.format("%Y-%m-%d").to_string());
                out.push('\t');
                out.push_str(&d.text);
                if let Some(s) = &d.source {
                    out.push('\t');
                    out.push_str(s);
                }
                out.push('\n');
            }
        }
        Some("jsonl") => {
            for d in corpus.documents() {
                out.push_str(&serde_json::to_string(d).expect("document serializes"));
                out.push('\n');
            }
        }
        _ => {
            return Err(Error::InvalidInput(
                "corpus files must end in .jsonl or .tsv".into(),
            ))
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Splits on maximal runs of non-alphanumeric characters and lowercases.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Fraction of the document's tokens that are lexicon terms; 0 for a
/// document without tokens.
pub fn negative_ratio(doc: &Document, lex: &Lexicon) -> f64 {
    token_ratio(&doc.tokens(), lex)
}

pub(crate) fn token_ratio(tokens: &[String], lex: &Lexicon) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    let hits = tokens.iter().filter(|t| lex.contains(t)).count();
    hits as f64 / tokens.len() as f64
}

pub fn contains_term(doc: &Document, term: &str) -> bool {
    let needle = tokenize(term);
    count_occurrences(&doc.tokens(), &needle) > 0
}

/// Occurrences of `needle` as a contiguous run inside `haystack`
/// (overlapping occurrences each count).
pub(crate) fn count_occurrences(haystack: &[String], needle: &[String]) -> usize {
    if needle.is_empty() || needle.len() > haystack.len() {
        return 0;
    }
    haystack.windows(needle.len()).filter(|w| *w == needle).count()
}

/// Occurrence count of every lexicon term over documents dated in `[from, to]`,
/// most frequent first with ties in alphabetical order.
pub fn term_frequency_report(
    corpus: &Corpus,
    lex: &Lexicon,
    from: NaiveDate,
    to: NaiveDate,
) -> Vec<(String, usize)> {
    let needles: Vec<(String, Vec<String>)> =
        lex.terms().map(|t| (t.to_string(), tokenize(t))).collect();
    let mut counts = vec![0usize; needles.len()];
    for doc in corpus.between(from, to) {
        let tokens = doc.tokens();
        for (c, (_, n)) in counts.iter_mut().zip(&needles) {
            *c += count_occurrences(&tokens, n);
        }
    }
    let mut report: Vec<(String, usize)> = needles
        .into_iter()
        .map(|(t, _)| t)
        .zip(counts)
        .collect();
    report.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    report
}
