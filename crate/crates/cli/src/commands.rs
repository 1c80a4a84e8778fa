use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use kogec_core::classifier::{Edit, ErrorAnnotator};
use kogec_core::corpus::{corpus_stats, merge_corpora, split_by_annotator};
use kogec_core::hangul::{tokenize_tagged, Lexicon, NormalizationTable};
use kogec_core::m2::{lint, parse_m2, serialize_m2, AnnotatedSentence, LintConfig, M2Corpus};
use kogec_core::rubric::{kappa_report, parse_scores, LearnerGroup, ScoreFormat};
use kogec_core::scorer::{evaluate, hypothesis_from_lines, MatchOptions};

use crate::{AnnotateArgs, Failure, HypFormat, KappaArgs, MergeArgs, ScoreArgs, SplitArgs, StatsArgs, ValidateArgs};

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_m2(path: &Path) -> anyhow::Result<M2Corpus> {
    let text = read(path)?;
    parse_m2(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_lexicon(path: Option<&PathBuf>) -> anyhow::Result<Lexicon> {
    match path {
        Some(p) => Ok(Lexicon::from_path(p)?),
        None => Ok(Lexicon::default()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Input),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .context("writing to stdout")
                .map_err(Failure::Internal)
        }
    }
}

pub fn annotate(args: AnnotateArgs) -> CmdResult {
    let source = read(&args.source)?;
    let target = read(&args.target)?;
    let source_lines: Vec<&str> = source.lines().collect();
    let target_lines: Vec<&str> = target.lines().collect();
    if source_lines.len() != target_lines.len() {
        return Err(anyhow!("line count {} vs {}", source_lines.len(), target_lines.len()).into());
    }
    let mut annotator = ErrorAnnotator::new(load_lexicon(args.lexicon.lexicon.as_ref())?);
    if let Some(path) = &args.normalization {
        annotator = annotator.with_normalization(NormalizationTable::from_path(path).map_err(anyhow::Error::from)?);
    }
    let tagged = match &args.pos {
        Some(path) => {
            let text = read(path)?;
            let lines: Vec<String> = text.lines().map(str::to_string).collect();
            if lines.len() != source_lines.len() {
                return Err(anyhow!("POS file has {} lines, source has {}", lines.len(), source_lines.len()).into());
            }
            Some(lines)
        }
        None => None,
    };

    let mut sentences = Vec::with_capacity(source_lines.len());
    for (idx, (src, tgt)) in source_lines.iter().zip(&target_lines).enumerate() {
        let mut src_tokens = annotator.tokenize(src);
        if let Some(lines) = &tagged {
            let tags = tokenize_tagged(&lines[idx], &annotator.lexicon);
            let same = tags.len() == src_tokens.len() && tags.iter().zip(&src_tokens).all(|(a, b)| a.surface == b.surface);
            if !same {
                return Err(anyhow!("line {}: POS tokens do not match the source tokens", idx + 1).into());
            }
            src_tokens = tags;
        }
        let tgt_tokens = annotator.tokenize(tgt);
        let mut edits = annotator.annotate_tokens(&src_tokens, &tgt_tokens, args.annotator_id);
        if edits.is_empty() && !args.no_noop {
            edits.push(Edit::noop(args.annotator_id));
        }
        sentences.push(AnnotatedSentence {
            source_tokens: src_tokens.into_iter().map(|t| t.surface).collect(),
            edits,
        });
    }
    emit(args.out.as_deref(), &serialize_m2(&M2Corpus::new(sentences)))?;
    Ok(0)
}

pub fn merge(args: MergeArgs) -> CmdResult {
    let corpora = args
        .inputs
        .iter()
        .map(|p| read_m2(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let merged = merge_corpora(&corpora).map_err(anyhow::Error::from)?;
    emit(args.out.as_deref(), &serialize_m2(&merged))?;
    Ok(0)
}

pub fn split(args: SplitArgs) -> CmdResult {
    let corpus = read_m2(&args.input)?;
    for (id, part) in split_by_annotator(&corpus).iter().enumerate() {
        let path = PathBuf::from(format!("{}.{id}.m2", args.prefix.display()));
        emit(Some(&path), &serialize_m2(part))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

fn looks_like_m2(text: &str) -> bool {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.starts_with("S ") || l == "S")
}

pub fn score(args: ScoreArgs) -> CmdResult {
    let gold = read_m2(&args.gold)?;
    let hyp_text = read(&args.hyp)?;
    let as_m2 = match args.hyp_format {
        HypFormat::M2 => true,
        HypFormat::Text => false,
        HypFormat::Auto => looks_like_m2(&hyp_text),
    };
    let hyp = if as_m2 {
        parse_m2(&hyp_text).with_context(|| format!("parsing {}", args.hyp.display()))?
    } else {
        let annotator = ErrorAnnotator::new(load_lexicon(args.lexicon.lexicon.as_ref())?);
        let lines: Vec<&str> = hyp_text.lines().collect();
        hypothesis_from_lines(&lines, &gold, &annotator).map_err(anyhow::Error::from)?
    };
    let options = MatchOptions {
        label_sensitive: args.label_sensitive,
    };
    let report = evaluate(&hyp, &gold, args.beta, options).map_err(anyhow::Error::from)?;

    let mut out = String::new();
    let dist = report.reference_distribution();
    let ref_name = |a: Option<u32>| a.map_or_else(|| "none".to_string(), |id| id.to_string());
    if args.report {
        let _ = writeln!(out, "{:<12}{:>10}", "sentences", report.per_sentence.len());
        let _ = writeln!(out, "{:<12}{:>10}{:>10}{:>10}", "", "TP", "FP", "FN");
        let a = report.aggregate;
        let _ = writeln!(out, "{:<12}{:>10}{:>10}{:>10}", "counts", a.tp, a.fp, a.fn_);
        let _ = writeln!(out, "{:<12}{:>10}{:>10}{:>10}", "", "P", "R", format!("F{}", report.beta));
        let _ = writeln!(
            out,
            "{:<12}{:>10.4}{:>10.4}{:>10.4}",
            "scores", report.precision, report.recall, report.f_beta
        );
        for (a, n) in &dist {
            let _ = writeln!(out, "{:<12}{:>10}", format!("ref {}", ref_name(*a)), n);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "sentences={}", report.per_sentence.len());
    let _ = writeln!(out, "beta={}", report.beta);
    let _ = writeln!(out, "tp={}", report.aggregate.tp);
    let _ = writeln!(out, "fp={}", report.aggregate.fp);
    let _ = writeln!(out, "fn={}", report.aggregate.fn_);
    let _ = writeln!(out, "precision={:.4}", report.precision);
    let _ = writeln!(out, "recall={:.4}", report.recall);
    let _ = writeln!(out, "f_beta={:.4}", report.f_beta);
    for (a, n) in &dist {
        let _ = writeln!(out, "reference.{}={n}", ref_name(*a));
    }
    emit(None, &out)?;
    Ok(0)
}

pub fn kappa(args: KappaArgs) -> CmdResult {
    let format = ScoreFormat {
        order: args.column_order,
        range: args.score_range,
    };
    let inputs = [
        (LearnerGroup::FB, &args.fb),
        (LearnerGroup::FI, &args.fi),
        (LearnerGroup::HB, &args.hb),
        (LearnerGroup::HI, &args.hi),
    ];
    let mut sheets = Vec::new();
    for (group, path) in inputs {
        if let Some(path) = path {
            let text = read(path)?;
            let sheet = parse_scores(&text, group, format).with_context(|| format!("{group} scores in {}", path.display()))?;
            sheets.push(sheet);
        }
    }
    if sheets.is_empty() {
        return Err(anyhow!("no score files given (use --fb, --fi, --hb, --hi)").into());
    }
    let report = kappa_report(&sheets).map_err(anyhow::Error::from)?;
    let mut out = String::new();
    if args.report {
        let groups: Vec<String> = report.per_group.keys().map(|g| format!("{:>8}", g.code())).collect();
        let values: Vec<String> = report.per_group.values().map(|k| format!("{k:>8.4}")).collect();
        let overall = report.overall.map_or_else(|| format!("{:>8}", "n/a"), |k| format!("{k:>8.4}"));
        let _ = writeln!(out, "{}{:>8}", groups.concat(), "All");
        let _ = writeln!(out, "{}{overall}\n", values.concat());
    }
    for (group, k) in &report.per_group {
        let _ = writeln!(out, "kappa.{group}={k:.4}");
    }
    match report.overall {
        Some(k) => {
            let _ = writeln!(out, "kappa.All={k:.4}");
        }
        None => eprintln!("note: overall kappa needs all four groups"),
    }
    emit(None, &out)?;
    Ok(0)
}

pub fn stats(args: StatsArgs) -> CmdResult {
    let corpus = read_m2(&args.input)?;
    let stats = corpus_stats(&corpus);
    let mut out = String::new();
    if args.report {
        let _ = writeln!(out, "{:<14}{:>8}", "sentences", stats.sentence_count);
        let _ = writeln!(out, "{:<14}{:>8}", "references", stats.reference_count);
        let _ = writeln!(out, "{:<14}{:>8}", "annotators", stats.annotator_count);
        let _ = writeln!(out, "{:<14}{:>8}", "tokens", stats.token_count);
        let _ = writeln!(out, "{:<14}{:>8}", "edits", stats.edit_count);
        for (label, n) in &stats.error_label_histogram {
            let _ = writeln!(out, "  {label:<28}{n:>8}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "sentences={}", stats.sentence_count);
    let _ = writeln!(out, "references={}", stats.reference_count);
    let _ = writeln!(out, "annotators={}", stats.annotator_count);
    let _ = writeln!(out, "tokens={}", stats.token_count);
    let _ = writeln!(out, "edits={}", stats.edit_count);
    for (id, n) in &stats.edits_per_annotator {
        let _ = writeln!(out, "edits.annotator.{id}={n}");
    }
    for (label, n) in &stats.error_label_histogram {
        let _ = writeln!(out, "label[{label}]={n}");
    }
    emit(None, &out)?;
    Ok(0)
}

pub fn validate(args: ValidateArgs) -> CmdResult {
    let corpus = read_m2(&args.input)?;
    let findings = lint(
        &corpus,
        LintConfig {
            expected_annotators: args.expect_annotators,
        },
    );
    let mut out = String::new();
    for f in &findings {
        let _ = writeln!(out, "finding: {f}");
    }
    let _ = writeln!(out, "sentences={}", corpus.len());
    let _ = writeln!(out, "findings={}", findings.len());
    emit(None, &out)?;
    Ok(if findings.is_empty() { 0 } else { 1 })
}
