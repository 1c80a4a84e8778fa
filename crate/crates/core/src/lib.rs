//! Korean learner-corpus toolkit.
//!
//! * [`hangul`]: tokenization, jamo decomposition, particle stripping
//! * [`alignment`]: token edit scripts with split/merge/transpose
//! * [`classifier`]: error labels and the one-call annotation pipeline
//! * [`m2`]: multi-annotator M2 reading, writing, applying and linting
//! * [`scorer`]: multi-reference edit-level F-beta
//! * [`rubric`]: essay score sheets and Cohen's kappa
//! * [`corpus`]: corpus statistics, merge and split

pub mod alignment;
pub mod classifier;
pub mod corpus;
pub mod hangul;
pub mod m2;
pub mod rubric;
pub mod scorer;

pub use alignment::{align, merge_ops, AlignCosts, AlignOp, Aligner, OpKind};
pub use classifier::{annotate_pair, classify, Edit, ErrorAnnotator, ErrorLabel, Label};
pub use corpus::{corpus_stats, merge_corpora, split_by_annotator, CorpusStats};
pub use hangul::{decompose_jamo, jamo_similarity, strip_particle, tokenize, Eojeol, JamoString, Lexicon};
pub use m2::{apply_edits, lint, parse_m2, serialize_m2, AnnotatedSentence, Finding, LintConfig, M2Corpus};
pub use rubric::{cohen_kappa, kappa_report, parse_scores, KappaReport, LearnerGroup, ScoreSheet};
pub use scorer::{evaluate, match_edits, EvalReport, MatchCounts, MatchOptions};
