//! Selection rates and pairwise McNemar tests over user-study responses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Vlm,
    Rule,
    Random,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Vlm, Method::Rule, Method::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Vlm => "VLM",
            Method::Rule => "RULE",
            Method::Random => "RANDOM",
        }
    }

    fn display(self) -> &'static str {
        match self {
            Method::Vlm => "VLM",
            Method::Rule => "Rule",
            Method::Random => "Random",
        }
    }
}

impl core::str::FromStr for Method {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "VLM" => Ok(Method::Vlm),
            "RULE" | "RULE-BASED" | "RULE_BASED" => Ok(Method::Rule),
            "RANDOM" => Ok(Method::Random),
            _ => Err(EvalError::UnknownMethod(s.to_string())),
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("duplicate response for participant {participant}, object {object}, method {method}")]
    Duplicate {
        participant: String,
        object: String,
        method: Method,
    },
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("method {0} has no responses")]
    MissingMethod(Method),
    #[error("no responses")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Response {
    pub participant: String,
    pub object: String,
    pub method: Method,
    pub selected: bool,
}

/// Binary judgments, unique per (participant, object, method).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Response>", into = "Vec<Response>")]
pub struct ResponseTable {
    records: Vec<Response>,
    /// (participant, object) -> method -> selected
    index: BTreeMap<(String, String), BTreeMap<Method, bool>>,
}

impl ResponseTable {
    pub fn new(records: Vec<Response>) -> Result<Self, EvalError> {
        let mut index: BTreeMap<(String, String), BTreeMap<Method, bool>> = BTreeMap::new();
        for r in &records {
            let entry = index.entry((r.participant.clone(), r.object.clone())).or_default();
            if entry.insert(r.method, r.selected).is_some() {
                return Err(EvalError::Duplicate {
                    participant: r.participant.clone(),
                    object: r.object.clone(),
                    method: r.method,
                });
            }
        }
        Ok(Self { records, index })
    }

    pub fn records(&self) -> &[Response] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Objects in first-appearance order.
    pub fn objects(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.records
            .iter()
            .filter(|r| seen.insert(r.object.as_str()))
            .map(|r| r.object.clone())
            .collect()
    }

    pub fn has_method(&self, m: Method) -> bool {
        self.records.iter().any(|r| r.method == m)
    }

    /// Participants who answered anything about `object`.
    pub fn participants_for(&self, object: &str) -> usize {
        self.index.keys().filter(|(_, o)| o == object).count()
    }
}

impl TryFrom<Vec<Response>> for ResponseTable {
    type Error = EvalError;
    fn try_from(v: Vec<Response>) -> Result<Self, Self::Error> {
        ResponseTable::new(v)
    }
}

impl From<ResponseTable> for Vec<Response> {
    fn from(t: ResponseTable) -> Self {
        t.records
    }
}

/// Rounds half away from zero to one decimal, as percentages are printed.
pub fn round1(x: f64) -> f64 {
    libm::round(x * 10.0) / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub object: String,
    pub method: Method,
    pub count: usize,
    pub participants: usize,
    /// Percent; absent when nobody answered for the object.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMean {
    pub method: Method,
    /// Mean of the defined per-object rates, percent.
    pub mean: Option<f64>,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRates {
    pub cells: Vec<RateCell>,
    pub means: Vec<MethodMean>,
}

impl SelectionRates {
    pub fn cell(&self, object: &str, method: Method) -> Option<&RateCell> {
        self.cells.iter().find(|c| c.object == object && c.method == method)
    }

    pub fn mean(&self, method: Method) -> Option<f64> {
        self.means.iter().find(|m| m.method == method).and_then(|m| m.mean)
    }
}

/// Per (object, method): how many participants selected the method, over
/// everyone who answered for the object.
pub fn selection_rates(table: &ResponseTable) -> SelectionRates {
    let objects = table.objects();
    let mut cells = Vec::new();
    for method in Method::ALL {
        for object in &objects {
            let count = table
                .records
                .iter()
                .filter(|r| r.selected && r.method == method && &r.object == object)
                .count();
            let participants = table.participants_for(object);
            let rate = (participants > 0).then(|| 100.0 * count as f64 / participants as f64);
            cells.push(RateCell {
                object: object.clone(),
                method,
                count,
                participants,
                rate,
            });
        }
    }
    let means = Method::ALL
        .iter()
        .map(|&method| {
            let rates: Vec<f64> = cells.iter().filter(|c| c.method == method).filter_map(|c| c.rate).collect();
            let total = cells.iter().filter(|c| c.method == method).map(|c| c.count).sum();
            let mean = (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64);
            MethodMean { method, mean, total }
        })
        .collect();
    SelectionRates { cells, means }
}

/// Discordant pairs pooled over every (participant, object) that has a
/// response for both methods: `b` counts `a` alone selected, `c` counts `b`
/// alone selected.
pub fn discordant_counts(table: &ResponseTable, a: Method, b: Method) -> Result<(u64, u64), EvalError> {
    for m in [a, b] {
        if !table.has_method(m) {
            return Err(EvalError::MissingMethod(m));
        }
    }
    let (mut nb, mut nc) = (0, 0);
    for methods in table.index.values() {
        if let (Some(&x), Some(&y)) = (methods.get(&a), methods.get(&b)) {
            match (x, y) {
                (true, false) => nb += 1,
                (false, true) => nc += 1,
                _ => {}
            }
        }
    }
    Ok((nb, nc))
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub fn chi2_sf_1df(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    libm::erfc(libm::sqrt(x / 2.0)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    pub b: u64,
    pub c: u64,
    pub chi2_uncorrected: f64,
    pub chi2_corrected: f64,
    pub p_uncorrected: f64,
    pub p_corrected: f64,
}

/// McNemar statistics with and without continuity correction. With no
/// discordant pairs both statistics are 0 and both p-values 1.
pub fn mcnemar(b: u64, c: u64) -> McNemarResult {
    let n = (b + c) as f64;
    let (u, k) = if b + c == 0 {
        (0.0, 0.0)
    } else {
        let d = b.abs_diff(c) as f64;
        let dc = (d - 1.0).max(0.0);
        (d * d / n, dc * dc / n)
    };
    McNemarResult {
        b,
        c,
        chi2_uncorrected: u,
        chi2_corrected: k,
        p_uncorrected: chi2_sf_1df(u),
        p_corrected: chi2_sf_1df(k),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BonferroniResult {
    pub threshold: f64,
    pub rejected: Vec<bool>,
}

/// Rejects each hypothesis iff `p < alpha / m`.
pub fn bonferroni(p_values: &[f64], alpha: f64, m: usize) -> BonferroniResult {
    let threshold = alpha / m.max(1) as f64;
    BonferroniResult {
        threshold,
        rejected: p_values.iter().map(|&p| p < threshold).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: Method,
    pub b: Method,
    pub result: McNemarResult,
    pub rejected_uncorrected: bool,
    pub rejected_corrected: bool,
}

impl Comparison {
    pub fn conclusion(&self) -> String {
        if !self.rejected_uncorrected {
            return String::from("n.s.");
        }
        let (hi, lo) = if self.result.b >= self.result.c {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        };
        alloc::format!("{} >> {}", hi.display(), lo.display())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rates: SelectionRates,
    pub alpha: f64,
    pub threshold: f64,
    pub comparisons: Vec<Comparison>,
}

pub const COMPARISONS: [(Method, Method); 3] = [
    (Method::Vlm, Method::Rule),
    (Method::Vlm, Method::Random),
    (Method::Rule, Method::Random),
];

/// Rates plus every pairwise comparison whose methods both have data,
/// Bonferroni-adjusted over the comparisons actually run.
pub fn evaluate(table: &ResponseTable, alpha: f64) -> Result<EvalReport, EvalError> {
    if table.is_empty() {
        return Err(EvalError::Empty);
    }
    let rates = selection_rates(table);
    let mut results = Vec::new();
    for (a, b) in COMPARISONS {
        if table.has_method(a) && table.has_method(b) {
            let (nb, nc) = discordant_counts(table, a, b)?;
            results.push((a, b, mcnemar(nb, nc)));
        }
    }
    let m = results.len();
    let unc: Vec<f64> = results.iter().map(|r| r.2.p_uncorrected).collect();
    let cor: Vec<f64> = results.iter().map(|r| r.2.p_corrected).collect();
    let bu = bonferroni(&unc, alpha, m);
    let bc = bonferroni(&cor, alpha, m);
    let comparisons = results
        .into_iter()
        .enumerate()
        .map(|(n, (a, b, result))| Comparison {
            a,
            b,
            result,
            rejected_uncorrected: bu.rejected[n],
            rejected_corrected: bc.rejected[n],
        })
        .collect();
    Ok(EvalReport {
        rates,
        alpha,
        threshold: bu.threshold,
        comparisons,
    })
}

/// p-value for people: tiny values are clamped rather than printed exactly.
pub fn format_p(p: f64) -> String {
    if p < 1e-12 {
        String::from("<1e-12")
    } else if p < 0.001 {
        alloc::format!("{p:.2e}")
    } else {
        alloc::format!("{p:.4}")
    }
}

fn format_rate(rate: Option<f64>) -> String {
    match rate {
        Some(r) => alloc::format!("{:.1}%", round1(r)),
        None => String::from("n/a"),
    }
}

/// Plain-text tables: rates per object and method, then the McNemar tests.
pub fn format_report(report: &EvalReport) -> String {
    let mut out = String::new();
    let objects: Vec<&str> = {
        let mut seen = BTreeSet::new();
        report
            .rates
            .cells
            .iter()
            .filter(|c| seen.insert(c.object.as_str()))
            .map(|c| c.object.as_str())
            .collect()
    };
    let _ = write!(out, "{:<8}", "Method");
    for o in &objects {
        let _ = write!(out, " | {o:>14}");
    }
    let _ = writeln!(out, " | {:>7}", "Mean");
    for method in Method::ALL {
        let _ = write!(out, "{:<8}", method.display());
        for o in &objects {
            let cell = report.rates.cell(o, method);
            let text = match cell {
                Some(c) => alloc::format!("{} ({})", format_rate(c.rate), c.count),
                None => String::from("n/a"),
            };
            let _ = write!(out, " | {text:>14}");
        }
        let _ = writeln!(out, " | {:>7}", format_rate(report.rates.mean(method)));
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "McNemar tests, Bonferroni threshold {:.4} (alpha {} / {})",
        report.threshold,
        report.alpha,
        report.comparisons.len()
    );
    let _ = writeln!(
        out,
        "{:<18} | {:>4} | {:>4} | {:>8} | {:>8} | {:>8} | {:>8} | Conclusion",
        "Comparison", "b", "c", "chi2", "p", "chi2_cc", "p_cc"
    );
    for c in &report.comparisons {
        let r = &c.result;
        let _ = writeln!(
            out,
            "{:<18} | {:>4} | {:>4} | {:>8.2} | {:>8} | {:>8.2} | {:>8} | {}",
            alloc::format!("{} vs {}", c.a.display(), c.b.display()),
            r.b,
            r.c,
            r.chi2_uncorrected,
            format_p(r.p_uncorrected),
            r.chi2_corrected,
            format_p(r.p_corrected),
            c.conclusion()
        );
    }
    out
}
