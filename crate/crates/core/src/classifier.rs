//! Error typology and the edit-labelling procedure.
//!
//! Every non-EQUAL alignment operation gets exactly one label. Structural
//! operations (split, merge, swap) are decided by the op kind alone; a
//! substitution is inspected for stem and functional-morpheme agreement.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::alignment::{merge_ops, AlignOp, Aligner, OpKind};
use crate::hangul::{tokenize, Eojeol, Lexicon, MorphemeKind, NormalizationTable};

pub const DEFAULT_REQUIRED: &str = "REQUIRED";
pub const DEFAULT_COMMENT: &str = "-NONE-";
/// Correction text that some M2 writers use for "no tokens".
pub const NONE_MARKER: &str = "-NONE-";
const ARROW: &str = " → ";

const NOUN: &str = "NOUN";
const UNKNOWN_POS: &str = "X";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ErrorLabel {
    /// Correct content word carrying a superfluous functional morpheme.
    AdpUnnecessary {
        src_pos: String,
        tgt_pos: String,
        kind: MorphemeKind,
    },
    /// Correct content word lacking a functional morpheme.
    AdpMissing {
        src_pos: String,
        tgt_pos: String,
        kind: MorphemeKind,
    },
    /// One functional morpheme replaced by another.
    AdpSubstitution {
        pos: String,
        from: MorphemeKind,
        to: MorphemeKind,
    },
    Spell,
    MissingWordBoundary,
    UnnecessaryWordBoundary,
    Order,
    MissingOther,
    UnnecessaryOther,
    ReplacementOther,
}

fn valid_pos(pos: &str) -> bool {
    !pos.is_empty() && pos.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Makes an arbitrary tag usable inside a rendered label.
fn sanitize_pos(pos: &str) -> String {
    let cleaned: String = pos
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if cleaned.is_empty() {
        UNKNOWN_POS.to_string()
    } else {
        cleaned
    }
}

impl fmt::Display for ErrorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorLabel::AdpUnnecessary { src_pos, tgt_pos, kind } => {
                write!(f, "R:{src_pos}+{kind}{ARROW}{tgt_pos}")
            }
            ErrorLabel::AdpMissing { src_pos, tgt_pos, kind } => {
                write!(f, "R:{src_pos}{ARROW}{tgt_pos}+{kind}")
            }
            ErrorLabel::AdpSubstitution { pos, from, to } => {
                write!(f, "R:{pos}+{from}{ARROW}{pos}+{to}")
            }
            ErrorLabel::Spell => f.write_str("R:SPELL"),
            ErrorLabel::MissingWordBoundary => f.write_str("M:WB"),
            ErrorLabel::UnnecessaryWordBoundary => f.write_str("U:WB"),
            ErrorLabel::Order => f.write_str("R:ORDER"),
            ErrorLabel::MissingOther => f.write_str("M:OTHER"),
            ErrorLabel::UnnecessaryOther => f.write_str("U:OTHER"),
            ErrorLabel::ReplacementOther => f.write_str("R:OTHER"),
        }
    }
}

impl ErrorLabel {
    /// Parses the canonical rendering. Returns `None` for anything that
    /// would not render back to exactly `text`.
    pub fn parse(text: &str) -> Option<Self> {
        let label = match text {
            "R:SPELL" => ErrorLabel::Spell,
            "M:WB" => ErrorLabel::MissingWordBoundary,
            "U:WB" => ErrorLabel::UnnecessaryWordBoundary,
            "R:ORDER" => ErrorLabel::Order,
            "M:OTHER" => ErrorLabel::MissingOther,
            "U:OTHER" => ErrorLabel::UnnecessaryOther,
            "R:OTHER" => ErrorLabel::ReplacementOther,
            _ => parse_morpheme_label(text)?,
        };
        (label.to_string() == text).then_some(label)
    }
}

fn split_side(side: &str) -> Option<(&str, Option<MorphemeKind>)> {
    match side.split_once('+') {
        Some((pos, kind)) => Some((pos, Some(kind.parse().ok()?))),
        None => Some((side, None)),
    }
}

fn parse_morpheme_label(text: &str) -> Option<ErrorLabel> {
    let body = text.strip_prefix("R:")?;
    let (left, right) = body.split_once(ARROW)?;
    let (lpos, lkind) = split_side(left)?;
    let (rpos, rkind) = split_side(right)?;
    if !valid_pos(lpos) || !valid_pos(rpos) {
        return None;
    }
    match (lkind, rkind) {
        (Some(kind), None) => Some(ErrorLabel::AdpUnnecessary {
            src_pos: lpos.into(),
            tgt_pos: rpos.into(),
            kind,
        }),
        (None, Some(kind)) => Some(ErrorLabel::AdpMissing {
            src_pos: lpos.into(),
            tgt_pos: rpos.into(),
            kind,
        }),
        (Some(from), Some(to)) if lpos == rpos => Some(ErrorLabel::AdpSubstitution {
            pos: lpos.into(),
            from,
            to,
        }),
        _ => None,
    }
}

/// Label text as it appears in an M2 file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Typed(ErrorLabel),
    /// Placeholder for an annotator who made no corrections.
    Noop,
    /// Any label outside the typology, kept verbatim.
    Other(String),
}

impl Label {
    pub fn parse(text: &str) -> Label {
        if text == "noop" {
            return Label::Noop;
        }
        match ErrorLabel::parse(text) {
            Some(l) => Label::Typed(l),
            None => Label::Other(text.to_string()),
        }
    }

    pub fn is_noop(&self) -> bool {
        matches!(self, Label::Noop)
    }

    /// Labels whose correction legitimately has no tokens.
    pub fn is_deletion(&self) -> bool {
        match self {
            Label::Typed(l) => *l == ErrorLabel::UnnecessaryOther,
            Label::Noop => true,
            Label::Other(s) => s.starts_with("U:") && s != "U:WB",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Typed(l) => l.fmt(f),
            Label::Noop => f.write_str("noop"),
            Label::Other(s) => f.write_str(s),
        }
    }
}

impl From<ErrorLabel> for Label {
    fn from(l: ErrorLabel) -> Self {
        Label::Typed(l)
    }
}

/// One annotated correction.
///
/// Noop edits (`label == Label::Noop`) have no meaningful span; they are
/// written as `-1 -1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edit {
    pub src_span: Range<usize>,
    pub label: Label,
    pub replacement: String,
    pub annotator: u32,
    pub required: String,
    pub comment: String,
}

impl Edit {
    pub fn new(src_span: Range<usize>, label: impl Into<Label>, replacement: &str, annotator: u32) -> Self {
        Edit {
            src_span,
            label: label.into(),
            replacement: replacement.trim().to_string(),
            annotator,
            required: DEFAULT_REQUIRED.to_string(),
            comment: DEFAULT_COMMENT.to_string(),
        }
    }

    pub fn noop(annotator: u32) -> Self {
        Edit {
            src_span: 0..0,
            label: Label::Noop,
            replacement: NONE_MARKER.to_string(),
            annotator,
            required: DEFAULT_REQUIRED.to_string(),
            comment: DEFAULT_COMMENT.to_string(),
        }
    }

    pub fn is_noop(&self) -> bool {
        self.label.is_noop()
    }

    /// Replacement tokens; the `-NONE-` marker and the empty string both
    /// mean "no tokens".
    pub fn replacement_tokens(&self) -> Vec<&str> {
        if self.replacement == NONE_MARKER {
            Vec::new()
        } else {
            self.replacement.split_whitespace().collect()
        }
    }

    /// Replacement with the `-NONE-` marker folded into the empty string.
    pub fn replacement_key(&self) -> &str {
        if self.replacement == NONE_MARKER {
            ""
        } else {
            &self.replacement
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("EQUAL operations carry no error")]
    EqualOp,
    #[error("operation {0} lies outside the sentence pair")]
    OutOfBounds(String),
}

fn pos_for(token: &Eojeol, counterpart: &Eojeol) -> String {
    if let Some(p) = token.pos.as_deref().or(counterpart.pos.as_deref()) {
        return sanitize_pos(p);
    }
    let nominal = [token, counterpart]
        .iter()
        .any(|t| matches!(&t.particle, Some(m) if m.kind == MorphemeKind::Adp));
    if nominal { NOUN } else { UNKNOWN_POS }.to_string()
}

/// Labels one alignment operation.
pub fn classify(op: &AlignOp, source: &[Eojeol], target: &[Eojeol]) -> Result<ErrorLabel, ClassifyError> {
    if op.src.end > source.len() || op.tgt.end > target.len() {
        return Err(ClassifyError::OutOfBounds(op.to_string()));
    }
    let label = match op.kind {
        OpKind::Equal => return Err(ClassifyError::EqualOp),
        OpKind::Split => ErrorLabel::MissingWordBoundary,
        OpKind::Merge => ErrorLabel::UnnecessaryWordBoundary,
        OpKind::Transpose => ErrorLabel::Order,
        OpKind::Insert => ErrorLabel::MissingOther,
        OpKind::Delete => ErrorLabel::UnnecessaryOther,
        OpKind::Substitute => {
            let s = &source[op.src.start];
            let t = &target[op.tgt.start];
            classify_substitution(s, t)
        }
    };
    Ok(label)
}

fn classify_substitution(s: &Eojeol, t: &Eojeol) -> ErrorLabel {
    if s.stem != t.stem {
        // A wrong content word subsumes any morpheme error on it.
        return ErrorLabel::Spell;
    }
    match (&s.particle, &t.particle) {
        (Some(sp), None) => ErrorLabel::AdpUnnecessary {
            src_pos: pos_for(s, t),
            tgt_pos: pos_for(t, s),
            kind: sp.kind,
        },
        (None, Some(tp)) => ErrorLabel::AdpMissing {
            src_pos: pos_for(s, t),
            tgt_pos: pos_for(t, s),
            kind: tp.kind,
        },
        (Some(sp), Some(tp)) if sp.text != tp.text => ErrorLabel::AdpSubstitution {
            pos: pos_for(s, t),
            from: sp.kind,
            to: tp.kind,
        },
        _ => ErrorLabel::ReplacementOther,
    }
}

/// Alignment + labelling in one call.
#[derive(Debug, Clone, Default)]
pub struct ErrorAnnotator {
    pub lexicon: Lexicon,
    pub aligner: Aligner,
    pub normalization: NormalizationTable,
}

impl ErrorAnnotator {
    pub fn new(lexicon: Lexicon) -> Self {
        ErrorAnnotator {
            lexicon,
            ..Default::default()
        }
    }

    pub fn with_normalization(mut self, table: NormalizationTable) -> Self {
        self.normalization = table;
        self
    }

    pub fn tokenize(&self, text: &str) -> Vec<Eojeol> {
        if self.normalization.is_empty() {
            tokenize(text, &self.lexicon)
        } else {
            tokenize(&self.normalization.apply(text), &self.lexicon)
        }
    }

    pub fn annotate_pair(&self, source_text: &str, target_text: &str, annotator: u32) -> Vec<Edit> {
        let source = self.tokenize(source_text);
        let target = self.tokenize(target_text);
        self.annotate_tokens(&source, &target, annotator)
    }

    /// Edits for already tokenized sequences, in source order.
    pub fn annotate_tokens(&self, source: &[Eojeol], target: &[Eojeol], annotator: u32) -> Vec<Edit> {
        let ops = self.aligner.align(source, target);
        let ops = merge_ops(&ops, source, target);
        ops.iter()
            .filter(|op| op.kind != OpKind::Equal)
            .map(|op| {
                let label = classify(op, source, target).expect("aligner ops are in bounds and non-equal");
                let replacement = target[op.tgt.clone()]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                Edit::new(op.src.clone(), label, &replacement, annotator)
            })
            .collect()
    }
}

/// [`ErrorAnnotator::annotate_pair`] with the default lexicon and costs.
pub fn annotate_pair(source_text: &str, target_text: &str, annotator: u32) -> Vec<Edit> {
    ErrorAnnotator::default().annotate_pair(source_text, target_text, annotator)
}
