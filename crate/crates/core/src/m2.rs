//! Multi-annotator M2 files.
//!
//! ```text
//! S 비행기 음식이 안 막였습니다 .
//! A 1 2|||R:NOUN+ADP → NOUN+ADP|||음식을|||REQUIRED|||-NONE-|||0
//! A 3 4|||R:SPELL|||먹었습니다|||REQUIRED|||-NONE-|||0
//! A 3 4|||R:SPELL|||맞았습니다|||REQUIRED|||-NONE-|||1
//! ```
//!
//! Blocks are separated by one blank line. The required flag and comment
//! fields are carried through untouched.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::classifier::{Edit, Label};

const FIELD_SEP: &str = "|||";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct M2Error {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("annotator {0} has no annotations for this sentence")]
    UnknownAnnotator(u32),
}

/// Source tokens plus every annotator's edits, in file order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotatedSentence {
    pub source_tokens: Vec<String>,
    pub edits: Vec<Edit>,
}

impl AnnotatedSentence {
    pub fn new(source_tokens: Vec<String>) -> Self {
        AnnotatedSentence {
            source_tokens,
            edits: Vec::new(),
        }
    }

    pub fn from_text(source: &str) -> Self {
        AnnotatedSentence::new(source.split_whitespace().map(str::to_string).collect())
    }

    pub fn source_text(&self) -> String {
        self.source_tokens.join(" ")
    }

    /// Annotator ids with at least one line (noop included).
    pub fn annotators(&self) -> BTreeSet<u32> {
        self.edits.iter().map(|e| e.annotator).collect()
    }

    /// Real (non-noop) edits of one annotator.
    pub fn edits_for(&self, annotator: u32) -> impl Iterator<Item = &Edit> {
        self.edits
            .iter()
            .filter(move |e| e.annotator == annotator && !e.is_noop())
    }

    /// Realizes one annotator's correction by replacing spans right to
    /// left. A sentence with no annotation lines at all yields its source
    /// for any id.
    pub fn apply_edits(&self, annotator: u32) -> Result<String, ApplyError> {
        if !self.edits.is_empty() && !self.edits.iter().any(|e| e.annotator == annotator) {
            return Err(ApplyError::UnknownAnnotator(annotator));
        }
        let mut edits: Vec<&Edit> = self.edits_for(annotator).collect();
        // Stable sort keeps file order for insertions at the same point.
        edits.sort_by_key(|e| (e.src_span.start, e.src_span.end));
        let mut tokens: Vec<&str> = self.source_tokens.iter().map(String::as_str).collect();
        for edit in edits.iter().rev() {
            tokens.splice(edit.src_span.clone(), edit.replacement_tokens());
        }
        Ok(tokens.join(" "))
    }
}

/// Free-function form of [`AnnotatedSentence::apply_edits`].
pub fn apply_edits(sentence: &AnnotatedSentence, annotator: u32) -> Result<String, ApplyError> {
    sentence.apply_edits(annotator)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct M2Corpus {
    pub sentences: Vec<AnnotatedSentence>,
}

impl M2Corpus {
    pub fn new(sentences: Vec<AnnotatedSentence>) -> Self {
        M2Corpus { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn annotators(&self) -> BTreeSet<u32> {
        self.sentences.iter().flat_map(|s| s.annotators()).collect()
    }
}

struct BlockBuilder {
    sentence: AnnotatedSentence,
    spans: BTreeMap<u32, Vec<Range<usize>>>,
    noop: BTreeSet<u32>,
}

impl BlockBuilder {
    fn new(tokens: Vec<String>) -> Self {
        BlockBuilder {
            sentence: AnnotatedSentence::new(tokens),
            spans: BTreeMap::new(),
            noop: BTreeSet::new(),
        }
    }

    fn push(&mut self, edit: Edit, line: usize) -> Result<(), M2Error> {
        let err = |reason: String| M2Error { line, reason };
        let id = edit.annotator;
        if edit.is_noop() {
            if self.noop.contains(&id) || self.spans.contains_key(&id) {
                return Err(err(format!("noop for annotator {id} must be its only edit")));
            }
            self.noop.insert(id);
        } else {
            if self.noop.contains(&id) {
                return Err(err(format!("annotator {id} already has a noop line")));
            }
            let span = &edit.src_span;
            if span.end > self.sentence.source_tokens.len() {
                return Err(err(format!(
                    "span {}..{} exceeds sentence length {}",
                    span.start,
                    span.end,
                    self.sentence.source_tokens.len()
                )));
            }
            let spans = self.spans.entry(id).or_default();
            if let Some(other) = spans
                .iter()
                .find(|o| span.start < o.end && o.start < span.end)
            {
                return Err(err(format!(
                    "span {}..{} overlaps {}..{} for annotator {id}",
                    span.start, span.end, other.start, other.end
                )));
            }
            spans.push(span.clone());
        }
        self.sentence.edits.push(edit);
        Ok(())
    }
}

fn parse_index(field: &str, line: usize) -> Result<i64, M2Error> {
    field.parse::<i64>().map_err(|_| M2Error {
        line,
        reason: format!("non-integer index {field:?}"),
    })
}

fn parse_edit_line(body: &str, line: usize) -> Result<Edit, M2Error> {
    let err = |reason: String| M2Error { line, reason };
    let fields: Vec<&str> = body.split(FIELD_SEP).collect();
    if fields.len() != 6 {
        return Err(err(format!(
            "expected 6 `|||`-separated fields, found {}",
            fields.len()
        )));
    }
    let mut bounds = fields[0].split(' ');
    let (start, end) = match (bounds.next(), bounds.next(), bounds.next()) {
        (Some(s), Some(e), None) => (parse_index(s, line)?, parse_index(e, line)?),
        _ => return Err(err(format!("malformed span {:?}", fields[0]))),
    };
    let label = Label::parse(fields[1]);
    let annotator: u32 = fields[5]
        .parse()
        .map_err(|_| err(format!("invalid annotator id {:?}", fields[5])))?;
    let src_span = match (&label, start, end) {
        (Label::Noop, -1, -1) => 0..0,
        (Label::Noop, _, _) => return Err(err("noop edits must use span -1 -1".into())),
        (_, -1, -1) => return Err(err("span -1 -1 is reserved for noop edits".into())),
        (_, s, e) if s < 0 || e < s => {
            return Err(err(format!("invalid span {s}..{e}")));
        }
        (_, s, e) => s as usize..e as usize,
    };
    Ok(Edit {
        src_span,
        label,
        replacement: fields[2].to_string(),
        annotator,
        required: fields[3].to_string(),
        comment: fields[4].to_string(),
    })
}

/// Single-pass parser; every error carries its 1-based line number.
pub fn parse_m2(text: &str) -> Result<M2Corpus, M2Error> {
    let mut sentences = Vec::new();
    let mut current: Option<BlockBuilder> = None;
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let content = raw.strip_suffix('\r').unwrap_or(raw);
        if content.trim().is_empty() {
            if let Some(block) = current.take() {
                sentences.push(block.sentence);
            }
            continue;
        }
        if let Some(rest) = content.strip_prefix("S ").or((content == "S").then_some("")) {
            if let Some(block) = current.take() {
                sentences.push(block.sentence);
            }
            let tokens = rest.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
            current = Some(BlockBuilder::new(tokens));
        } else if let Some(rest) = content.strip_prefix("A ") {
            let block = current.as_mut().ok_or_else(|| M2Error {
                line,
                reason: "edit line before any source line".into(),
            })?;
            let edit = parse_edit_line(rest, line)?;
            block.push(edit, line)?;
        } else {
            return Err(M2Error {
                line,
                reason: "expected a line starting with `S ` or `A `".into(),
            });
        }
    }
    if let Some(block) = current.take() {
        sentences.push(block.sentence);
    }
    Ok(M2Corpus { sentences })
}

pub fn write_edit_line(out: &mut String, edit: &Edit) {
    let (start, end) = if edit.is_noop() {
        (-1, -1)
    } else {
        (edit.src_span.start as i64, edit.src_span.end as i64)
    };
    let _ = writeln!(
        out,
        "A {start} {end}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}{}{FIELD_SEP}{}",
        edit.label, edit.replacement, edit.required, edit.comment, edit.annotator
    );
}

/// Each block is written as its lines followed by one blank line.
pub fn serialize_m2(corpus: &M2Corpus) -> String {
    let mut out = String::new();
    for sentence in &corpus.sentences {
        out.push_str("S ");
        out.push_str(&sentence.source_tokens.join(" "));
        out.push('\n');
        for edit in &sentence.edits {
            write_edit_line(&mut out, edit);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    SpansOutOfOrder { sentence: usize, annotator: u32 },
    AnnotatorIdGap { sentence: usize, ids: Vec<u32> },
    AnnotatorCount { sentence: usize, found: usize, expected: usize },
    EmptyCorrection { sentence: usize, annotator: u32, span: Range<usize>, label: String },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::SpansOutOfOrder { sentence, annotator } => write!(
                f,
                "sentence {sentence}: spans of annotator {annotator} are not in ascending order"
            ),
            Finding::AnnotatorIdGap { sentence, ids } => {
                let ids: Vec<String> = ids.iter().map(u32::to_string).collect();
                write!(f, "sentence {sentence}: annotator ids {{{}}} are not contiguous from 0", ids.join(","))
            }
            Finding::AnnotatorCount { sentence, found, expected } => write!(
                f,
                "sentence {sentence}: {found} annotator(s), expected {expected}"
            ),
            Finding::EmptyCorrection { sentence, annotator, span, label } => write!(
                f,
                "sentence {sentence}: annotator {annotator} edit {}..{} labelled {label} has an empty correction",
                span.start, span.end
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LintConfig {
    pub expected_annotators: usize,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig {
            expected_annotators: 2,
        }
    }
}

/// Audits a parsed corpus. Sentence numbers in findings are 1-based.
/// Blocks with no edit lines at all are accepted as error-free under the
/// noop-less convention.
pub fn lint(corpus: &M2Corpus, config: LintConfig) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (idx, sentence) in corpus.sentences.iter().enumerate() {
        let number = idx + 1;
        let ids = sentence.annotators();
        for &id in &ids {
            let starts: Vec<(usize, usize)> = sentence
                .edits_for(id)
                .map(|e| (e.src_span.start, e.src_span.end))
                .collect();
            if starts.windows(2).any(|w| w[0] > w[1]) {
                findings.push(Finding::SpansOutOfOrder { sentence: number, annotator: id });
            }
        }
        if ids.iter().copied().ne(0..ids.len() as u32) {
            findings.push(Finding::AnnotatorIdGap {
                sentence: number,
                ids: ids.iter().copied().collect(),
            });
        }
        if !ids.is_empty() && ids.len() != config.expected_annotators {
            findings.push(Finding::AnnotatorCount {
                sentence: number,
                found: ids.len(),
                expected: config.expected_annotators,
            });
        }
        for edit in &sentence.edits {
            if !edit.is_noop() && edit.replacement_key().trim().is_empty() && !edit.label.is_deletion() {
                findings.push(Finding::EmptyCorrection {
                    sentence: number,
                    annotator: edit.annotator,
                    span: edit.src_span.clone(),
                    label: edit.label.to_string(),
                });
            }
        }
    }
    findings
}
