//! Edit-level evaluation against multiple references.
//!
//! For every sentence the hypothesis is compared with each gold annotator
//! separately and the annotator with the best sentence-level F-beta is kept.
//! Corpus scores are computed from the summed counts of the chosen
//! references.

use std::collections::HashMap;
use std::ops::{Add, AddAssign};

use thiserror::Error;

use crate::classifier::{Edit, ErrorAnnotator};
use crate::m2::{AnnotatedSentence, M2Corpus};

pub const DEFAULT_BETA: f64 = 0.5;
/// Annotator id that carries system edits in a hypothesis M2 file.
pub const SYSTEM_ANNOTATOR: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl MatchCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        MatchCounts { tp, fp, fn_ }
    }

    /// 1.0 when nothing was proposed.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// 1.0 when there was nothing to find.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f_beta(&self, beta: f64) -> f64 {
        f_beta(self.precision(), self.recall(), beta)
    }
}

impl Add for MatchCounts {
    type Output = MatchCounts;

    fn add(self, rhs: Self) -> Self {
        MatchCounts {
            tp: self.tp + rhs.tp,
            fp: self.fp + rhs.fp,
            fn_: self.fn_ + rhs.fn_,
        }
    }
}

impl AddAssign for MatchCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for MatchCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(MatchCounts::default(), Add::add)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// `(1+β²)·P·R / (β²·P + R)`, and 0 when both are 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    if den == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchOptions {
    /// Also require the label text to agree.
    pub label_sensitive: bool,
}

/// One-to-one matching on (span, replacement[, label]). Noop edits are
/// ignored on both sides.
pub fn match_edits(hyp: &[Edit], gold: &[Edit], options: MatchOptions) -> MatchCounts {
    let key = |e: &Edit| {
        let label = if options.label_sensitive {
            e.label.to_string()
        } else {
            String::new()
        };
        (e.src_span.start, e.src_span.end, e.replacement_key().to_string(), label)
    };
    let mut pool: HashMap<_, usize> = HashMap::new();
    let mut gold_total = 0;
    for e in gold.iter().filter(|e| !e.is_noop()) {
        *pool.entry(key(e)).or_default() += 1;
        gold_total += 1;
    }
    let mut tp = 0;
    let mut fp = 0;
    for e in hyp.iter().filter(|e| !e.is_noop()) {
        match pool.get_mut(&key(e)) {
            Some(n) if *n > 0 => {
                *n -= 1;
                tp += 1;
            }
            _ => fp += 1,
        }
    }
    MatchCounts::new(tp, fp, gold_total - tp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceScore {
    /// `None` when the gold sentence has no annotation lines.
    pub annotator: Option<u32>,
    pub counts: MatchCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_sentence: Vec<SentenceScore>,
    pub aggregate: MatchCounts,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
}

impl EvalReport {
    /// How often each gold annotator was selected.
    pub fn reference_distribution(&self) -> Vec<(Option<u32>, usize)> {
        let mut dist: Vec<(Option<u32>, usize)> = Vec::new();
        for s in &self.per_sentence {
            match dist.iter_mut().find(|(a, _)| *a == s.annotator) {
                Some((_, n)) => *n += 1,
                None => dist.push((s.annotator, 1)),
            }
        }
        dist.sort();
        dist
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("hypothesis has {hyp} sentences but gold has {gold}")]
    SentenceCount { hyp: usize, gold: usize },
    #[error("sentence {index}: hypothesis source differs from gold source")]
    SourceMismatch { index: usize },
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(String),
}

/// Picks the gold annotator with the best sentence F-beta; ties go to more
/// true positives, then to the lower id.
pub fn best_reference(
    hyp: &[Edit],
    gold: &AnnotatedSentence,
    beta: f64,
    options: MatchOptions,
) -> SentenceScore {
    let mut best: Option<SentenceScore> = None;
    for id in gold.annotators() {
        let gold_edits: Vec<Edit> = gold.edits_for(id).cloned().collect();
        let counts = match_edits(hyp, &gold_edits, options);
        let better = match &best {
            None => true,
            Some(b) => {
                let (f, bf) = (counts.f_beta(beta), b.counts.f_beta(beta));
                f > bf || (f == bf && counts.tp > b.counts.tp)
            }
        };
        if better {
            best = Some(SentenceScore {
                annotator: Some(id),
                counts,
            });
        }
    }
    best.unwrap_or_else(|| SentenceScore {
        annotator: None,
        counts: match_edits(hyp, &[], options),
    })
}

/// Scores system edits (annotator 0 of `hyp`) against every reference in
/// `gold`. Sentence indices in errors are 1-based.
pub fn evaluate(hyp: &M2Corpus, gold: &M2Corpus, beta: f64, options: MatchOptions) -> Result<EvalReport, EvalError> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(EvalError::InvalidBeta(beta.to_string()));
    }
    if hyp.len() != gold.len() {
        return Err(EvalError::SentenceCount {
            hyp: hyp.len(),
            gold: gold.len(),
        });
    }
    let mut per_sentence = Vec::with_capacity(gold.len());
    for (idx, (h, g)) in hyp.sentences.iter().zip(&gold.sentences).enumerate() {
        if h.source_tokens != g.source_tokens {
            return Err(EvalError::SourceMismatch { index: idx + 1 });
        }
        let system: Vec<Edit> = h.edits_for(SYSTEM_ANNOTATOR).cloned().collect();
        per_sentence.push(best_reference(&system, g, beta, options));
    }
    let aggregate: MatchCounts = per_sentence.iter().map(|s| s.counts).sum();
    Ok(EvalReport {
        precision: aggregate.precision(),
        recall: aggregate.recall(),
        f_beta: aggregate.f_beta(beta),
        aggregate,
        per_sentence,
        beta,
    })
}

/// Builds a hypothesis corpus from corrected sentences, one per gold
/// sentence, by annotating each against the gold source.
pub fn hypothesis_from_lines(
    lines: &[&str],
    gold: &M2Corpus,
    annotator: &ErrorAnnotator,
) -> Result<M2Corpus, EvalError> {
    if lines.len() != gold.len() {
        return Err(EvalError::SentenceCount {
            hyp: lines.len(),
            gold: gold.len(),
        });
    }
    let sentences = gold
        .sentences
        .iter()
        .zip(lines)
        .map(|(g, line)| {
            let source: Vec<_> = g
                .source_tokens
                .iter()
                .map(|t| crate::hangul::Eojeol::new(t, &annotator.lexicon))
                .collect();
            let target = annotator.tokenize(line);
            AnnotatedSentence {
                source_tokens: g.source_tokens.clone(),
                edits: annotator.annotate_tokens(&source, &target, SYSTEM_ANNOTATOR),
            }
        })
        .collect();
    Ok(M2Corpus::new(sentences))
}
