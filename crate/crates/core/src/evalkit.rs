//! Relevance, executability and effectiveness measurements over generated
//! PBTs and the shipped ground-truth data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::analyzer::{Analyzer, AnalyzerError, PbtReport, RecordRequest};
use crate::llmclient::PbtSource;
use crate::orchestrator::GeneratedPbt;

/// Most lines a patch may touch for a MED executability level.
pub const PATCH_BUDGET: usize = 5;
pub const EFFECTIVE_HIGH: (u64, u64) = (4, 5);
pub const EFFECTIVE_MED: (u64, u64) = (2, 5);

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{path}: {msg}")]
    File { path: PathBuf, msg: String },
    #[error("inconsistent mapping: {0}")]
    Inconsistent(String),
    #[error("patch for {pbt} does not apply: {msg}")]
    Patch { pbt: String, msg: String },
    #[error("invalid partition scheme: {0}")]
    Scheme(String),
    #[error("scheme does not cover input {parameter}={value}")]
    Coverage { parameter: String, value: String },
    #[error("no scheme dimension matches an input drawn by {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Analyzer(#[from] AnalyzerError),
}

fn file_err(path: &Path, e: impl fmt::Display) -> EvalError {
    EvalError::File { path: path.to_path_buf(), msg: e.to_string() }
}

fn read(path: &Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|e| file_err(path, e))
}

// ------------------------------------------------------------ relevance

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    ExactMatch,
    EquivalentMatch,
    ExtractedOnly,
    GroundtruthOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyRecord {
    #[serde(rename = "ID")]
    pub property_id: String,
    #[serde(rename = "Program")]
    pub program_id: String,
    #[serde(rename = "Ground-truth Property")]
    pub ground_truth: String,
    #[serde(rename = "Extracted Property")]
    pub extracted: String,
    #[serde(rename = "Group")]
    pub group: Group,
    #[serde(rename = "Note", default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MappingTable {
    pub records: Vec<PropertyRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GroupCounts {
    pub exact: u64,
    pub equivalent: u64,
    pub extracted_only: u64,
    pub groundtruth_only: u64,
    pub groundtruth: u64,
    pub extracted: u64,
}

impl MappingTable {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| file_err(path, e))?;
        let records = rdr.deserialize().collect::<Result<Vec<PropertyRecord>, _>>().map_err(|e| file_err(path, e))?;
        Ok(Self { records })
    }

    /// Group counts after checking that every row's columns agree with its
    /// group and that the totals add up.
    pub fn counts(&self) -> Result<GroupCounts, EvalError> {
        let mut c = GroupCounts::default();
        let mut seen = BTreeSet::new();
        for r in &self.records {
            if !seen.insert(r.property_id.as_str()) {
                return Err(EvalError::Inconsistent(format!("duplicate property id {}", r.property_id)));
            }
            let has_gt = !r.ground_truth.trim().is_empty();
            let has_ex = !r.extracted.trim().is_empty();
            let (want_gt, want_ex) = match r.group {
                Group::ExactMatch | Group::EquivalentMatch => (true, true),
                Group::ExtractedOnly => (false, true),
                Group::GroundtruthOnly => (true, false),
            };
            if (has_gt, has_ex) != (want_gt, want_ex) {
                return Err(EvalError::Inconsistent(format!(
                    "{}: group {:?} needs ground truth {} and extracted {}",
                    r.property_id,
                    r.group,
                    if want_gt { "present" } else { "empty" },
                    if want_ex { "present" } else { "empty" },
                )));
            }
            c.groundtruth += u64::from(has_gt);
            c.extracted += u64::from(has_ex);
            match r.group {
                Group::ExactMatch => c.exact += 1,
                Group::EquivalentMatch => c.equivalent += 1,
                Group::ExtractedOnly => c.extracted_only += 1,
                Group::GroundtruthOnly => c.groundtruth_only += 1,
            }
        }
        if c.groundtruth != c.exact + c.equivalent + c.groundtruth_only {
            return Err(EvalError::Inconsistent("|groundtruth| != exact + equivalent + groundtruth_only".into()));
        }
        if c.extracted != c.exact + c.equivalent + c.extracted_only {
            return Err(EvalError::Inconsistent("|extracted| != exact + equivalent + extracted_only".into()));
        }
        Ok(c)
    }
}

/// A ratio that is undefined when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Value(Ratio<u64>),
    Undefined(&'static str),
}

impl Metric {
    fn of(num: u64, den: u64, marker: &'static str) -> Self {
        if den == 0 {
            Metric::Undefined(marker)
        } else {
            Metric::Value(Ratio::new_raw(num, den))
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Metric::Value(r) => r.to_f64(),
            Metric::Undefined(_) => None,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Value(r) => write!(f, "{:.4} ({}/{})", r.to_f64().unwrap_or(f64::NAN), r.numer(), r.denom()),
            Metric::Undefined(m) => f.write_str(m),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Value(r) => {
                let mut m = std::collections::BTreeMap::new();
                m.insert("numerator", serde_json::json!(r.numer()));
                m.insert("denominator", serde_json::json!(r.denom()));
                m.insert("value", serde_json::json!(r.to_f64()));
                m.serialize(s)
            }
            Metric::Undefined(marker) => s.serialize_str(marker),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Relevance {
    pub precision: Metric,
    pub recall: Metric,
    pub counts: GroupCounts,
}

pub fn compute_relevance(mapping: &MappingTable) -> Result<Relevance, EvalError> {
    let c = mapping.counts()?;
    let matched = c.exact + c.equivalent;
    Ok(Relevance {
        precision: Metric::of(matched, c.extracted, "no extraction"),
        recall: Metric::of(matched, c.groundtruth, "no ground truth"),
        counts: c,
    })
}

// ------------------------------------------------------------ levels

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Level {
    Low,
    Med,
    High,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::High => "HIGH",
            Level::Med => "MED",
            Level::Low => "LOW",
        })
    }
}

// ------------------------------------------------------------ executability

/// Lines a patch deletes or inserts.
pub fn patch_size(patch: &diffy::Patch<'_, str>) -> usize {
    patch
        .hunks()
        .iter()
        .flat_map(|h| h.lines())
        .filter(|l| !matches!(l, diffy::Line::Context(_)))
        .count()
}

pub fn apply_patch(pbt: &str, source: &str, patch_text: &str) -> Result<(String, usize), EvalError> {
    let err = |msg: String| EvalError::Patch { pbt: pbt.to_string(), msg };
    let patch = diffy::Patch::from_str(patch_text).map_err(|e| err(e.to_string()))?;
    let patched = diffy::apply(source, &patch).map_err(|e| err(e.to_string()))?;
    Ok((patched, patch_size(&patch)))
}

/// Level from the unmodified outcome and, if a patch was tried, its size and
/// patched outcome.
pub fn executability_level(unmodified: &PbtReport, patched: Option<(usize, &PbtReport)>) -> Level {
    if unmodified.passed() {
        return Level::High;
    }
    match patched {
        Some((touched, r)) if touched <= PATCH_BUDGET && r.passed() => Level::Med,
        _ => Level::Low,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Executability {
    pub level: Level,
    pub unmodified: PbtReport,
    pub patched: Option<(usize, PbtReport)>,
}

pub fn classify_executability(pbt: &GeneratedPbt, patch: Option<&str>, analyzer: &Analyzer) -> Result<Executability, EvalError> {
    let unmodified = pbt.final_report.clone();
    let patched = match patch {
        Some(text) if !unmodified.passed() => {
            let (source, touched) = apply_patch(&pbt.pbt_id, &pbt.source, text)?;
            let src = PbtSource { name: pbt.name.clone(), source, property: None };
            Some((touched, analyzer.run_pbt(&src, &unmodified.subject_id, unmodified.attempt)?))
        }
        _ => None,
    };
    let level = executability_level(&unmodified, patched.as_ref().map(|(n, r)| (*n, r)));
    Ok(Executability { level, unmodified, patched })
}

// ------------------------------------------------------------ effectiveness

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellKind {
    Interval {
        lo: f64,
        hi: f64,
        #[serde(default)]
        lo_open: bool,
        #[serde(default)]
        hi_open: bool,
    },
    Category {
        values: Vec<serde_json::Value>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    #[serde(flatten)]
    pub kind: CellKind,
}

impl Cell {
    fn contains(&self, v: &serde_json::Value) -> bool {
        match &self.kind {
            CellKind::Interval { lo, hi, lo_open, hi_open } => match v.as_f64() {
                Some(x) if !v.is_boolean() => {
                    (if *lo_open { x > *lo } else { x >= *lo }) && (if *hi_open { x < *hi } else { x <= *hi })
                }
                _ => false,
            },
            CellKind::Category { values } => values.iter().any(|c| same_value(c, v)),
        }
    }
}

fn same_value(a: &serde_json::Value, b: &serde_json::Value) -> bool {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) if a.is_number() && b.is_number() => x == y,
        _ => a == b,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub parameter: String,
    /// Closed numeric range the interval cells must cover.
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
    /// Coverage is checked over the integers of `domain`.
    #[serde(default)]
    pub integer: bool,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionScheme {
    pub program_id: String,
    pub dimensions: Vec<Dimension>,
}

impl PartitionScheme {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let s: Self = toml::from_str(&read(path)?).map_err(|e| file_err(path, e.message()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn cells_total(&self) -> usize {
        self.dimensions.iter().map(|d| d.cells.len()).sum()
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |m: String| Err(EvalError::Scheme(m));
        for d in &self.dimensions {
            if d.cells.is_empty() {
                return bad(format!("{}: no cells", d.parameter));
            }
            let mut intervals: Vec<(f64, bool, f64, bool, &str)> = Vec::new();
            let mut cats: Vec<&serde_json::Value> = Vec::new();
            for c in &d.cells {
                match &c.kind {
                    CellKind::Interval { lo, hi, lo_open, hi_open } => {
                        let empty = lo > hi || (lo == hi && (*lo_open || *hi_open));
                        if empty || lo.is_nan() || hi.is_nan() {
                            return bad(format!("{}: cell {} is empty", d.parameter, c.name));
                        }
                        intervals.push((*lo, *lo_open, *hi, *hi_open, &c.name));
                    }
                    CellKind::Category { values } => {
                        for v in values {
                            if cats.iter().any(|w| same_value(w, v)) {
                                return bad(format!("{}: value {v} in two cells", d.parameter));
                            }
                            cats.push(v);
                        }
                    }
                }
            }
            intervals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for w in intervals.windows(2) {
                let (a, b) = (w[0], w[1]);
                let overlap = b.0 < a.2 || (b.0 == a.2 && !a.3 && !b.1);
                if overlap {
                    return bad(format!("{}: cells {} and {} overlap", d.parameter, a.4, b.4));
                }
            }
            if let Some([lo, hi]) = d.domain {
                let covered = |x: f64| d.cells.iter().any(|c| c.contains(&serde_json::json!(x)));
                if d.integer {
                    let mut x = lo.ceil();
                    while x <= hi {
                        if !covered(x) {
                            return bad(format!("{}: {x} is in no cell", d.parameter));
                        }
                        x += 1.0;
                    }
                } else {
                    let first = intervals.first();
                    let last = intervals.last();
                    if first.is_none_or(|f| f.0 != lo || f.1) || last.is_none_or(|l| l.2 != hi || l.3) {
                        return bad(format!("{}: cells do not reach the domain ends", d.parameter));
                    }
                    for w in intervals.windows(2) {
                        if w[0].2 != w[1].0 || (w[0].3 && w[1].1) {
                            return bad(format!("{}: gap between {} and {}", d.parameter, w[0].4, w[1].4));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Effectiveness {
    pub cells_hit: usize,
    pub cells_total: usize,
    pub level: Level,
    /// Hit cell names per measured dimension.
    pub hits: BTreeMap<String, Vec<String>>,
}

pub fn effectiveness_level(hit: usize, total: usize) -> Level {
    let (h, t) = (hit as u64, total as u64);
    if t == 0 {
        Level::Low
    } else if h * EFFECTIVE_HIGH.1 >= t * EFFECTIVE_HIGH.0 {
        Level::High
    } else if h * EFFECTIVE_MED.1 >= t * EFFECTIVE_MED.0 {
        Level::Med
    } else {
        Level::Low
    }
}

/// Buckets recorded input vectors. Dimensions for parameters the PBT never
/// draws do not count towards the total.
pub fn effectiveness_from_inputs(
    pbt: &str,
    scheme: &PartitionScheme,
    inputs: &[serde_json::Map<String, serde_json::Value>],
) -> Result<Effectiveness, EvalError> {
    let mut hits: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut total = 0;
    for d in &scheme.dimensions {
        let drawn: Vec<&serde_json::Value> = inputs.iter().filter_map(|m| m.get(&d.parameter)).collect();
        if drawn.is_empty() {
            continue;
        }
        total += d.cells.len();
        let mut hit = BTreeSet::new();
        for v in drawn {
            let items: Vec<&serde_json::Value> = match v {
                serde_json::Value::Array(xs) => xs.iter().collect(),
                other => vec![other],
            };
            for x in items {
                let i = d.cells.iter().position(|c| c.contains(x)).ok_or_else(|| EvalError::Coverage {
                    parameter: d.parameter.clone(),
                    value: x.to_string(),
                })?;
                hit.insert(i);
            }
        }
        hits.insert(d.parameter.clone(), hit.into_iter().map(|i| d.cells[i].name.clone()).collect());
    }
    if total == 0 {
        return Err(EvalError::NotApplicable(pbt.to_string()));
    }
    let cells_hit = hits.values().map(Vec::len).sum();
    Ok(Effectiveness { cells_hit, cells_total: total, level: effectiveness_level(cells_hit, total), hits })
}

/// Runs `source` for `samples` generated examples with input recording and
/// buckets what was drawn.
pub fn measure_effectiveness(
    source: &PbtSource,
    subject_id: &str,
    scheme: &PartitionScheme,
    samples: u32,
    analyzer: &Analyzer,
) -> Result<Effectiveness, EvalError> {
    let dir = tempfile::tempdir().map_err(|e| file_err(Path::new("<tempdir>"), e))?;
    let path = dir.path().join("inputs.jsonl");
    let mut a = analyzer.clone();
    a.max_examples = Some(samples);
    a.run_pbt_recorded(source, subject_id, 0, Some(&RecordRequest { path: path.clone(), continue_on_failure: true }))?;
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    let inputs = parse_recorded(&path, &text)?;
    effectiveness_from_inputs(&source.name, scheme, &inputs)
}

/// Reads the harness recording: one `{"test", "inputs"}` object per line.
pub fn parse_recorded(path: &Path, text: &str) -> Result<Vec<serde_json::Map<String, serde_json::Value>>, EvalError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).map_err(|e| file_err(path, e))?;
            match v.get("inputs") {
                Some(serde_json::Value::Object(m)) => Ok(m.clone()),
                _ => Err(file_err(path, "record without an inputs object")),
            }
        })
        .collect()
}

// ------------------------------------------------------------ shipped table

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedRow {
    pub executability: Level,
    pub effectiveness: Level,
    pub reason: String,
}

/// One relevant property of the quality table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub property_id: String,
    pub program: String,
    #[serde(default)]
    pub subject: Option<String>,
    /// Paths are relative to the table file.
    #[serde(default)]
    pub pbt: Option<String>,
    #[serde(default)]
    pub patch: Option<String>,
    #[serde(default)]
    pub partitions: Option<String>,
    #[serde(default)]
    pub challenge: String,
    /// Outcome carried over for rows whose subject is not shipped.
    #[serde(default)]
    pub recorded: Option<RecordedRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityTable {
    pub rows: Vec<QualityRow>,
    #[serde(skip)]
    pub base: PathBuf,
}

impl QualityTable {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let mut t: Self = toml::from_str(&read(path)?).map_err(|e| file_err(path, e.message()))?;
        t.base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        for r in &t.rows {
            if r.recorded.is_none() && (r.subject.is_none() || r.pbt.is_none()) {
                return Err(file_err(path, format!("{}: needs subject and pbt, or a recorded outcome", r.property_id)));
            }
        }
        Ok(t)
    }

    fn source(&self, row: &QualityRow) -> Result<PbtSource, EvalError> {
        let rel = row.pbt.as_deref().expect("checked at load");
        let text = read(&self.base.join(rel))?;
        let name = Path::new(rel).file_stem().map_or_else(|| row.property_id.clone(), |s| s.to_string_lossy().into_owned());
        Ok(PbtSource { name, source: text, property: None })
    }

    fn patch(&self, row: &QualityRow) -> Result<Option<String>, EvalError> {
        row.patch.as_deref().map(|p| read(&self.base.join(p))).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowOutcome<T> {
    pub property_id: String,
    pub program: String,
    pub result: T,
    /// False when the row's outcome was taken from the table.
    pub measured: bool,
    pub note: String,
}

pub fn table_executability(table: &QualityTable, analyzer: &Analyzer) -> Result<Vec<RowOutcome<Level>>, EvalError> {
    let mut out = Vec::new();
    for row in &table.rows {
        if let Some(rec) = &row.recorded {
            out.push(RowOutcome {
                property_id: row.property_id.clone(),
                program: row.program.clone(),
                result: rec.executability,
                measured: false,
                note: rec.reason.clone(),
            });
            continue;
        }
        let subject = row.subject.as_deref().expect("checked at load");
        let src = table.source(row)?;
        let report = analyzer.run_pbt(&src, subject, 0)?;
        let pbt = GeneratedPbt {
            pbt_id: row.property_id.clone(),
            name: src.name.clone(),
            status: if report.passed() { crate::orchestrator::PbtStatus::Verified } else { crate::orchestrator::PbtStatus::Unresolved },
            source: src.source,
            property_text: row.property_id.clone(),
            property_flagged: false,
            attempts_used: 0,
            final_report: report,
        };
        let patch = table.patch(row)?;
        let e = classify_executability(&pbt, patch.as_deref(), analyzer)?;
        let note = match &e.patched {
            Some((n, r)) => format!("{} unmodified; {n}-line patch -> {}", e.unmodified.outcome.class, r.outcome.class),
            None => e.unmodified.outcome.class.to_string(),
        };
        out.push(RowOutcome {
            property_id: row.property_id.clone(),
            program: row.program.clone(),
            result: e.level,
            measured: true,
            note,
        });
    }
    Ok(out)
}

/// Measures every row on its patched source when a patch exists.
pub fn table_effectiveness(
    table: &QualityTable,
    samples: u32,
    analyzer: &Analyzer,
) -> Result<Vec<RowOutcome<Effectiveness>>, EvalError> {
    let mut out = Vec::new();
    for row in &table.rows {
        if let Some(rec) = &row.recorded {
            out.push(RowOutcome {
                property_id: row.property_id.clone(),
                program: row.program.clone(),
                result: Effectiveness { cells_hit: 0, cells_total: 0, level: rec.effectiveness, hits: BTreeMap::new() },
                measured: false,
                note: rec.reason.clone(),
            });
            continue;
        }
        let subject = row.subject.as_deref().expect("checked at load");
        let Some(part) = &row.partitions else {
            return Err(file_err(&table.base, format!("{}: no partition scheme", row.property_id)));
        };
        let scheme = PartitionScheme::load(&table.base.join(part))?;
        let mut src = table.source(row)?;
        if let Some(p) = table.patch(row)? {
            src.source = apply_patch(&row.property_id, &src.source, &p)?.0;
        }
        let e = measure_effectiveness(&src, subject, &scheme, samples, analyzer)?;
        out.push(RowOutcome {
            property_id: row.property_id.clone(),
            program: row.program.clone(),
            note: format!("{}/{} cells", e.cells_hit, e.cells_total),
            result: e,
            measured: true,
        });
    }
    Ok(out)
}

pub fn level_counts<'a>(levels: impl IntoIterator<Item = &'a Level>) -> BTreeMap<Level, usize> {
    let mut m = BTreeMap::from([(Level::High, 0), (Level::Med, 0), (Level::Low, 0)]);
    for l in levels {
        *m.entry(*l).or_default() += 1;
    }
    m
}

/// Aggregate export of all three measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relevance: Option<Relevance>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub executability: BTreeMap<String, Level>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub effectiveness: BTreeMap<String, Effectiveness>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, group: Group) -> PropertyRecord {
        let (gt, ex) = match group {
            Group::ExactMatch | Group::EquivalentMatch => ("g", "e"),
            Group::ExtractedOnly => ("", "e"),
            Group::GroundtruthOnly => ("g", ""),
        };
        PropertyRecord {
            property_id: id.into(),
            program_id: "p".into(),
            ground_truth: gt.into(),
            extracted: ex.into(),
            group,
            note: String::new(),
        }
    }

    #[test]
    fn relevance_definitions() {
        let exact = MappingTable { records: vec![rec("a", Group::ExactMatch), rec("b", Group::ExactMatch)] };
        let r = compute_relevance(&exact).unwrap();
        assert_eq!((r.precision.as_f64(), r.recall.as_f64()), (Some(1.0), Some(1.0)));

        let mut more = exact.clone();
        more.records.push(rec("c", Group::ExtractedOnly));
        let r2 = compute_relevance(&more).unwrap();
        assert!(r2.precision.as_f64() < r.precision.as_f64());
        assert_eq!(r2.recall, r.recall);

        let none = MappingTable { records: vec![rec("x", Group::GroundtruthOnly)] };
        let r = compute_relevance(&none).unwrap();
        assert_eq!(r.precision, Metric::Undefined("no extraction"));
        assert_eq!(r.precision.to_string(), "no extraction");
    }

    #[test]
    fn inconsistent_rows_rejected() {
        let mut bad = rec("a", Group::ExactMatch);
        bad.extracted.clear();
        let err = compute_relevance(&MappingTable { records: vec![bad] }).unwrap_err();
        assert!(err.to_string().contains("extracted present"), "{err}");
        let dup = MappingTable { records: vec![rec("a", Group::ExactMatch), rec("a", Group::ExtractedOnly)] };
        assert!(compute_relevance(&dup).is_err());
    }

    #[test]
    fn metric_display() {
        let m = Metric::of(18, 25, "no extraction");
        assert_eq!(m.to_string(), "0.7200 (18/25)");
    }

    fn scheme(toml_text: &str) -> Result<PartitionScheme, EvalError> {
        let s: PartitionScheme = toml::from_str(toml_text).unwrap();
        s.validate().map(|_| s)
    }

    const TEMP: &str = r#"
program_id = "tcs"
[[dimensions]]
parameter = "initial_temp"
domain = [20, 24]
integer = true
cells = [
  { name = "20", lo = 20, hi = 20 },
  { name = "21", lo = 21, hi = 21 },
  { name = "22", lo = 22, hi = 22 },
  { name = "23", lo = 23, hi = 23 },
  { name = "24", lo = 24, hi = 24 },
]
"#;

    #[test]
    fn scheme_validation() {
        assert!(scheme(TEMP).is_ok());
        let gap = TEMP.replace("{ name = \"22\", lo = 22, hi = 22 },", "");
        assert!(scheme(&gap).unwrap_err().to_string().contains("22 is in no cell"));
        let overlap = r#"
program_id = "x"
[[dimensions]]
parameter = "v"
cells = [{ name = "a", lo = 0, hi = 1 }, { name = "b", lo = 1, hi = 2 }]
"#;
        assert!(scheme(overlap).unwrap_err().to_string().contains("overlap"));
        let real = r#"
program_id = "x"
[[dimensions]]
parameter = "v"
domain = [0, 2]
cells = [{ name = "a", lo = 0, hi = 1, hi_open = true }, { name = "b", lo = 1, hi = 2 }]
[[dimensions]]
parameter = "flag"
cells = [{ name = "on", values = [true] }, { name = "off", values = [false] }]
"#;
        let s = scheme(real).unwrap();
        assert_eq!(s.cells_total(), 4);
    }

    fn inputs(key: &str, vals: &[serde_json::Value]) -> Vec<serde_json::Map<String, serde_json::Value>> {
        vals.iter().map(|v| serde_json::Map::from_iter([(key.to_string(), v.clone())])).collect()
    }

    #[test]
    fn bucketing_and_levels() {
        let s = scheme(TEMP).unwrap();
        let all: Vec<_> = (20..=24).map(|x| serde_json::json!(x)).collect();
        let e = effectiveness_from_inputs("t", &s, &inputs("initial_temp", &all)).unwrap();
        assert_eq!((e.cells_hit, e.cells_total, e.level), (5, 5, Level::High));
        let one = effectiveness_from_inputs("t", &s, &inputs("initial_temp", &[serde_json::json!(22)])).unwrap();
        assert_eq!((one.cells_hit, one.level), (1, Level::Low));
        let out = effectiveness_from_inputs("t", &s, &inputs("initial_temp", &[serde_json::json!(30)]));
        assert!(matches!(out, Err(EvalError::Coverage { .. })));
        let other = effectiveness_from_inputs("t", &s, &inputs("speed", &[serde_json::json!(1)]));
        assert!(matches!(other, Err(EvalError::NotApplicable(_))));
        assert_eq!(effectiveness_level(2, 5), Level::Med);
        assert_eq!(effectiveness_level(4, 5), Level::High);
        assert_eq!(effectiveness_level(1, 3), Level::Low);
    }

    #[test]
    fn patch_budget() {
        let old = "a\nb\nc\nd\n";
        let new = "a\nB\nc\nd\ne\n";
        let text = diffy::create_patch(old, new).to_string();
        let (patched, n) = apply_patch("p", old, &text).unwrap();
        assert_eq!((patched.as_str(), n), (new, 3));
        assert!(apply_patch("p", "zzz\n", &text).is_err());
    }
}
