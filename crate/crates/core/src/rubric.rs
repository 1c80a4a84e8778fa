//! Essay-scoring rubric, per-group score sheets and rater agreement.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use thiserror::Error;

pub const ESSAYS_PER_GROUP: usize = 25;
pub const RATERS: usize = 2;
pub const COLUMNS: usize = ESSAYS_PER_GROUP * RubricDimension::COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RubricCategory {
    Expression,
    Structure,
    Content,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RubricDimension {
    GrammaticalAccuracy,
    VocabularyUse,
    Expressions,
    InternalStructure,
    EssayOrganization,
    ParagraphCoherency,
    Length,
    TopicClarity,
    DetailedExplanation,
    Creativity,
}

impl RubricDimension {
    pub const COUNT: usize = 10;

    /// Rubric order; this is also the within-essay column order.
    pub const ALL: [RubricDimension; Self::COUNT] = [
        RubricDimension::GrammaticalAccuracy,
        RubricDimension::VocabularyUse,
        RubricDimension::Expressions,
        RubricDimension::InternalStructure,
        RubricDimension::EssayOrganization,
        RubricDimension::ParagraphCoherency,
        RubricDimension::Length,
        RubricDimension::TopicClarity,
        RubricDimension::DetailedExplanation,
        RubricDimension::Creativity,
    ];

    pub fn category(self) -> RubricCategory {
        use RubricDimension::*;
        match self {
            GrammaticalAccuracy | VocabularyUse | Expressions => RubricCategory::Expression,
            InternalStructure | EssayOrganization | ParagraphCoherency | Length => RubricCategory::Structure,
            TopicClarity | DetailedExplanation | Creativity => RubricCategory::Content,
        }
    }

    pub fn name(self) -> &'static str {
        use RubricDimension::*;
        match self {
            GrammaticalAccuracy => "grammatical_accuracy",
            VocabularyUse => "vocabulary_use",
            Expressions => "expressions",
            InternalStructure => "internal_structure",
            EssayOrganization => "essay_organization",
            ParagraphCoherency => "paragraph_coherency",
            Length => "length",
            TopicClarity => "topic_clarity",
            DetailedExplanation => "detailed_explanation",
            Creativity => "creativity",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&d| d == self).expect("listed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LearnerGroup {
    /// Foreign beginner.
    FB,
    /// Foreign intermediate.
    FI,
    /// Heritage beginner.
    HB,
    /// Heritage intermediate.
    HI,
}

impl LearnerGroup {
    pub const ALL: [LearnerGroup; 4] = [LearnerGroup::FB, LearnerGroup::FI, LearnerGroup::HB, LearnerGroup::HI];

    pub fn code(self) -> &'static str {
        match self {
            LearnerGroup::FB => "FB",
            LearnerGroup::FI => "FI",
            LearnerGroup::HB => "HB",
            LearnerGroup::HI => "HI",
        }
    }
}

impl fmt::Display for LearnerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for LearnerGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LearnerGroup::ALL
            .into_iter()
            .find(|g| g.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown learner group {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnOrder {
    /// Essay 1 dimensions 1-10, then essay 2, ...
    #[default]
    EssayMajor,
    /// Dimension 1 essays 1-25, then dimension 2, ...
    DimensionMajor,
}

impl FromStr for ColumnOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "essay-major" => Ok(ColumnOrder::EssayMajor),
            "dim-major" => Ok(ColumnOrder::DimensionMajor),
            other => Err(format!("unknown column order {other:?} (expected essay-major or dim-major)")),
        }
    }
}

impl ColumnOrder {
    /// (essay, dimension) for a 0-based column.
    pub fn cell(self, column: usize) -> (usize, usize) {
        match self {
            ColumnOrder::EssayMajor => (column / RubricDimension::COUNT, column % RubricDimension::COUNT),
            ColumnOrder::DimensionMajor => (column % ESSAYS_PER_GROUP, column / ESSAYS_PER_GROUP),
        }
    }
}

/// Inclusive range of accepted scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreRange {
    pub min: i64,
    pub max: i64,
}

impl Default for ScoreRange {
    fn default() -> Self {
        ScoreRange { min: 0, max: 10 }
    }
}

impl ScoreRange {
    pub fn contains(&self, v: i64) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

impl FromStr for ScoreRange {
    type Err = String;

    /// `MIN:MAX`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got {s:?}"))?;
        let min = lo.trim().parse::<i64>().map_err(|e| format!("bad minimum {lo:?}: {e}"))?;
        let max = hi.trim().parse::<i64>().map_err(|e| format!("bad maximum {hi:?}: {e}"))?;
        if min > max {
            return Err(format!("empty range {min}:{max}"));
        }
        Ok(ScoreRange { min, max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreFormat {
    pub order: ColumnOrder,
    pub range: ScoreRange,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} columns, found {found} (column {column} is out of place)", column = if found > expected { expected + 1 } else { found + 1 })]
    ColumnCount { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: {value:?} is not an integer")]
    NotInteger { row: usize, column: usize, value: String },
    #[error("row {row}, column {column}: score {value} outside {min}..={max}")]
    OutOfRange { row: usize, column: usize, value: i64, min: i64, max: i64 },
    #[error("csv: {0}")]
    Csv(String),
}

/// Two raters' scores for 25 essays on 10 dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreSheet {
    pub group: LearnerGroup,
    /// Indexed `[rater][essay * 10 + dimension]`.
    ratings: [Vec<i64>; RATERS],
}

impl ScoreSheet {
    /// `rows[rater]` holds 250 scores in (essay, dimension) order.
    pub fn from_grid(group: LearnerGroup, rows: [Vec<i64>; RATERS]) -> Self {
        assert!(rows.iter().all(|r| r.len() == COLUMNS), "score grid must have {COLUMNS} cells per rater");
        ScoreSheet { group, ratings: rows }
    }

    pub fn rating(&self, essay: usize, dimension: RubricDimension, rater: usize) -> i64 {
        self.ratings[rater][essay * RubricDimension::COUNT + dimension.index()]
    }

    /// All 250 scores of one rater in (essay, dimension) order.
    pub fn rater(&self, rater: usize) -> &[i64] {
        &self.ratings[rater]
    }

    pub fn len(&self) -> usize {
        self.ratings.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reads a per-group score file: two data rows of 250 integer cells,
/// optionally preceded by a header row. A first row is a header when none
/// of its cells is an integer. Row and column numbers in errors are 1-based
/// positions in the file.
pub fn parse_scores(text: &str, group: LearnerGroup, format: ScoreFormat) -> Result<ScoreSheet, ScoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| ScoreError::Csv(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    let mut first_data_row = 1;
    if let Some(first) = records.first() {
        if first.iter().all(|c| c.parse::<i64>().is_err()) {
            records.remove(0);
            first_data_row = 2;
        }
    }
    if records.len() != RATERS {
        return Err(ScoreError::RowCount {
            expected: RATERS,
            found: records.len(),
        });
    }
    let mut rows: [Vec<i64>; RATERS] = [vec![0; COLUMNS], vec![0; COLUMNS]];
    for (rater, rec) in records.iter().enumerate() {
        let row = first_data_row + rater;
        if rec.len() != COLUMNS {
            return Err(ScoreError::ColumnCount {
                row,
                expected: COLUMNS,
                found: rec.len(),
            });
        }
        for (col, cell) in rec.iter().enumerate() {
            let value: i64 = cell.parse().map_err(|_| ScoreError::NotInteger {
                row,
                column: col + 1,
                value: cell.to_string(),
            })?;
            if !format.range.contains(value) {
                return Err(ScoreError::OutOfRange {
                    row,
                    column: col + 1,
                    value,
                    min: format.range.min,
                    max: format.range.max,
                });
            }
            let (essay, dim) = format.order.cell(col);
            rows[rater][essay * RubricDimension::COUNT + dim] = value;
        }
    }
    Ok(ScoreSheet { group, ratings: rows })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KappaError {
    #[error("rating sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no ratings")]
    Empty,
    #[error("group {0} supplied more than once")]
    DuplicateGroup(LearnerGroup),
    #[error("overall agreement needs all four groups; missing {0}")]
    MissingGroup(LearnerGroup),
}

/// Unweighted Cohen's kappa over the labels the two raters actually used.
///
/// Computed from integer counts as
/// `(n·agree − Σ a_k·b_k) / (n² − Σ a_k·b_k)`. When chance agreement is
/// total (both raters used one and the same label) the result is 1.
pub fn cohen_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(KappaError::Empty);
    }
    let n = a.len() as i128;
    let mut agree: i128 = 0;
    let mut marginals: HashMap<&T, (i128, i128)> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        if x == y {
            agree += 1;
        }
        marginals.entry(x).or_default().0 += 1;
        marginals.entry(y).or_default().1 += 1;
    }
    let chance: i128 = marginals.values().map(|(ca, cb)| ca * cb).sum();
    let den = n * n - chance;
    if den == 0 {
        return Ok(1.0);
    }
    Ok((n * agree - chance) as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaReport {
    pub per_group: BTreeMap<LearnerGroup, f64>,
    /// Pooled over all four groups; `None` unless every group is present.
    pub overall: Option<f64>,
}

fn check_unique(sheets: &[ScoreSheet]) -> Result<(), KappaError> {
    for (i, s) in sheets.iter().enumerate() {
        if sheets[..i].iter().any(|o| o.group == s.group) {
            return Err(KappaError::DuplicateGroup(s.group));
        }
    }
    Ok(())
}

fn sheet_kappa<'a>(sheets: impl Iterator<Item = &'a ScoreSheet> + Clone) -> Result<f64, KappaError> {
    let a: Vec<i64> = sheets.clone().flat_map(|s| s.rater(0).iter().copied()).collect();
    let b: Vec<i64> = sheets.flat_map(|s| s.rater(1).iter().copied()).collect();
    cohen_kappa(&a, &b)
}

/// Kappa over the pooled (essay, dimension) pairs of all four groups.
pub fn overall_kappa(sheets: &[ScoreSheet]) -> Result<f64, KappaError> {
    check_unique(sheets)?;
    if let Some(missing) = LearnerGroup::ALL.into_iter().find(|g| !sheets.iter().any(|s| s.group == *g)) {
        return Err(KappaError::MissingGroup(missing));
    }
    sheet_kappa(sheets.iter())
}

/// Per-group kappa for every sheet, plus the pooled figure when all four
/// groups are present.
pub fn kappa_report(sheets: &[ScoreSheet]) -> Result<KappaReport, KappaError> {
    check_unique(sheets)?;
    let mut per_group = BTreeMap::new();
    for sheet in sheets {
        per_group.insert(sheet.group, sheet_kappa(std::iter::once(sheet))?);
    }
    let overall = match overall_kappa(sheets) {
        Ok(k) => Some(k),
        Err(KappaError::MissingGroup(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(KappaReport { per_group, overall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sheet(group: LearnerGroup, f: impl Fn(usize, usize) -> i64) -> ScoreSheet {
        ScoreSheet::from_grid(group, [(0..COLUMNS).map(|c| f(0, c)).collect(), (0..COLUMNS).map(|c| f(1, c)).collect()])
    }

    fn csv_rows(rows: &[Vec<i64>]) -> String {
        rows.iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn rubric_shape() {
        let count = |c| RubricDimension::ALL.iter().filter(|d| d.category() == c).count();
        assert_eq!(count(RubricCategory::Expression), 3);
        assert_eq!(count(RubricCategory::Structure), 4);
        assert_eq!(count(RubricCategory::Content), 3);
        assert_eq!(RubricDimension::Creativity.index(), 9);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(cohen_kappa(&[1, 2, 3, 1], &[1, 2, 3, 1]).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[1, 2, 1, 2], &[1, 2, 2, 2]).unwrap(), 0.5);
        assert_eq!(cohen_kappa(&[1, 2], &[2, 1]).unwrap(), -1.0);
        assert_eq!(cohen_kappa(&[7, 7, 7], &[7, 7, 7]).unwrap(), 1.0);
        assert_eq!(cohen_kappa::<i32>(&[], &[]), Err(KappaError::Empty));
        assert_eq!(cohen_kappa(&[1], &[1, 2]), Err(KappaError::LengthMismatch(1, 2)));
    }

    #[test]
    fn parses_well_formed_sheet() {
        let r0: Vec<i64> = (0..COLUMNS as i64).map(|c| c % 11).collect();
        let r1: Vec<i64> = (0..COLUMNS as i64).map(|c| (c + 1) % 11).collect();
        let sheet = parse_scores(&csv_rows(&[r0.clone(), r1]), LearnerGroup::FB, ScoreFormat::default()).unwrap();
        assert_eq!(sheet.len(), 500);
        // Column 13 (0-based 12) is essay 2, dimension 3.
        assert_eq!(sheet.rating(1, RubricDimension::Expressions, 0), r0[12]);
    }

    #[test]
    fn dimension_major_order() {
        let r0: Vec<i64> = (0..COLUMNS as i64).map(|c| c / 25).collect();
        let text = csv_rows(&[r0.clone(), r0]);
        let format = ScoreFormat { order: ColumnOrder::DimensionMajor, ..Default::default() };
        let sheet = parse_scores(&text, LearnerGroup::HI, format).unwrap();
        assert_eq!(sheet.rating(24, RubricDimension::Creativity, 1), 9);
        assert_eq!(sheet.rating(3, RubricDimension::VocabularyUse, 0), 1);
    }

    #[test]
    fn skips_header_row() {
        let header: Vec<String> = (0..COLUMNS).map(|c| format!("e{}_d{}", c / 10 + 1, c % 10 + 1)).collect();
        let body = csv_rows(&[vec![3; COLUMNS], vec![4; COLUMNS]]);
        let text = format!("{}\n{body}\n", header.join(","));
        let sheet = parse_scores(&text, LearnerGroup::FI, ScoreFormat::default()).unwrap();
        assert_eq!(sheet.rater(1)[0], 4);
    }

    #[test]
    fn shape_and_value_errors() {
        let mut wide = vec![1; COLUMNS + 1];
        let err = parse_scores(&csv_rows(&[wide.clone(), wide.clone()]), LearnerGroup::FB, ScoreFormat::default()).unwrap_err();
        assert_eq!(err, ScoreError::ColumnCount { row: 1, expected: 250, found: 251 });
        assert!(err.to_string().contains("column 251"));

        wide.truncate(COLUMNS);
        let err = parse_scores(&csv_rows(&[wide.clone()]), LearnerGroup::FB, ScoreFormat::default()).unwrap_err();
        assert_eq!(err, ScoreError::RowCount { expected: 2, found: 1 });

        let mut bad = wide.clone();
        bad[7] = 11;
        let err = parse_scores(&csv_rows(&[wide.clone(), bad]), LearnerGroup::FB, ScoreFormat::default()).unwrap_err();
        assert!(matches!(err, ScoreError::OutOfRange { row: 2, column: 8, value: 11, .. }));

        let text = format!("{}\n{}", csv_rows(&[wide.clone()]), csv_rows(&[wide]).replacen('1', "x", 1));
        let err = parse_scores(&text, LearnerGroup::FB, ScoreFormat::default()).unwrap_err();
        assert!(matches!(err, ScoreError::NotInteger { row: 2, column: 1, .. }));
    }

    #[test]
    fn identical_raters_give_unit_kappas() {
        let sheets: Vec<_> = LearnerGroup::ALL.into_iter().map(|g| sheet(g, |_, c| (c % 5) as i64)).collect();
        let report = kappa_report(&sheets).unwrap();
        assert!(report.per_group.values().all(|&k| k == 1.0));
        assert_eq!(report.overall, Some(1.0));
    }

    #[test]
    fn partial_and_duplicate_inputs() {
        let fb = sheet(LearnerGroup::FB, |r, c| ((c + r * (c % 2)) % 4) as i64);
        let report = kappa_report(std::slice::from_ref(&fb)).unwrap();
        assert_eq!(report.per_group.len(), 1);
        assert_eq!(report.overall, None);
        assert_eq!(overall_kappa(std::slice::from_ref(&fb)), Err(KappaError::MissingGroup(LearnerGroup::FI)));
        assert_eq!(kappa_report(&[fb.clone(), fb]), Err(KappaError::DuplicateGroup(LearnerGroup::FB)));
    }

    #[test]
    fn parses_config_strings() {
        assert_eq!("1:5".parse::<ScoreRange>().unwrap(), ScoreRange { min: 1, max: 5 });
        assert!("5:1".parse::<ScoreRange>().is_err());
        assert!("5".parse::<ScoreRange>().is_err());
        assert_eq!("dim-major".parse::<ColumnOrder>().unwrap(), ColumnOrder::DimensionMajor);
        assert_eq!("hb".parse::<LearnerGroup>().unwrap(), LearnerGroup::HB);
    }
}
