//! Problem ingestion: a CSV decision matrix plus a TOML problem config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rankaudit::methods::{Decider, Stage, TieBreakPolicy, Topsis, Transformer, WeightedSum};
use rankaudit::{DecisionMatrix, ModelError, Objective, Pipeline};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors caused by the files a user supplied. All map to exit code 1.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file}:{line}:{column}: {message}")]
    Parse {
        file: String,
        line: u64,
        column: u64,
        message: String,
    },
    #[error("criterion {0:?} has no objective in the config")]
    MissingObjective(String),
    #[error("criterion {0:?} has no weight in the config")]
    MissingWeight(String),
    #[error("unknown pipeline stage {name:?} (expected one of {expected})")]
    UnknownStage { name: String, expected: String },
    #[error("config refers to criterion {0:?}, which the matrix does not have")]
    UnknownCriterion(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    WeightedSum,
    Topsis,
}

impl MethodName {
    fn decider(self) -> Box<dyn Decider<f64>> {
        match self {
            MethodName::WeightedSum => Box::new(WeightedSum),
            MethodName::Topsis => Box::new(Topsis),
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodName::WeightedSum => "weighted_sum",
            MethodName::Topsis => "topsis",
        })
    }
}

impl FromStr for MethodName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted_sum" => Ok(MethodName::WeightedSum),
            "topsis" => Ok(MethodName::Topsis),
            other => Err(format!(
                "unknown method {other:?} (expected weighted_sum|topsis)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TieBreakConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<MethodName>,
    #[serde(default = "default_force_untie")]
    pub force_untie: bool,
}

fn default_force_untie() -> bool {
    true
}

impl Default for TieBreakConfig {
    fn default() -> Self {
        Self {
            fallback: None,
            force_untie: true,
        }
    }
}

/// Declarative description of the method under audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub objectives: BTreeMap<String, Objective>,
    pub weights: BTreeMap<String, f64>,
    pub pipeline: Vec<Stage<f64>>,
    pub method: MethodName,
    pub tiebreak: TieBreakConfig,
}

impl ProblemConfig {
    /// The configured pipeline ending in `method`.
    pub fn pipeline(&self) -> Pipeline<f64> {
        self.pipeline_with(self.method)
    }

    /// Tie policy for pairwise sub-problems. A fallback method runs behind
    /// the same transformer stages as the primary one.
    pub fn tie_policy(&self) -> TieBreakPolicy<f64> {
        TieBreakPolicy {
            fallback: self
                .tiebreak
                .fallback
                .map(|m| Box::new(self.pipeline_with(m)) as Box<dyn Decider<f64>>),
            force_untie: self.tiebreak.force_untie,
        }
    }

    fn pipeline_with(&self, method: MethodName) -> Pipeline<f64> {
        let steps = self
            .pipeline
            .iter()
            .cloned()
            .map(|s| Box::new(s) as Box<dyn Transformer<f64>>)
            .collect();
        Pipeline::new(steps, method.decider())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    objectives: BTreeMap<String, Objective>,
    #[serde(default)]
    weights: BTreeMap<String, f64>,
    #[serde(default)]
    pipeline: Vec<toml::Table>,
    method: MethodName,
    #[serde(default)]
    tiebreak: TieBreakConfig,
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn line_col(text: &str, offset: usize) -> (u64, u64) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line as u64, column as u64)
}

fn toml_error(file: &Path, text: &str, err: &toml::de::Error) -> InputError {
    let (line, column) = err.span().map_or((1, 1), |span| line_col(text, span.start));
    InputError::Parse {
        file: file.display().to_string(),
        line,
        column,
        message: err.message().trim().to_owned(),
    }
}

fn parse_stage(file: &Path, text: &str, table: toml::Table) -> Result<Stage<f64>, InputError> {
    let name = match table.get("stage") {
        Some(toml::Value::String(s)) => s.clone(),
        _ => {
            return Err(InputError::Parse {
                file: file.display().to_string(),
                line: 1,
                column: 1,
                message: "pipeline entry without a `stage` name".into(),
            })
        }
    };
    if !Stage::<f64>::NAMES.contains(&name.as_str()) {
        return Err(InputError::UnknownStage {
            name,
            expected: Stage::<f64>::NAMES.join(", "),
        });
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| toml_error(file, text, &e))
}

/// Parses a TOML problem config.
pub fn parse_config(file: &Path, text: &str) -> Result<ProblemConfig, InputError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| toml_error(file, text, &e))?;
    let pipeline = raw
        .pipeline
        .into_iter()
        .map(|t| parse_stage(file, text, t))
        .collect::<Result<_, _>>()?;
    Ok(ProblemConfig {
        objectives: raw.objectives,
        weights: raw.weights,
        pipeline,
        method: raw.method,
        tiebreak: raw.tiebreak,
    })
}

/// Contents of a matrix CSV before objectives and weights are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub alternatives: Vec<String>,
    pub criteria: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Parses a CSV matrix: header `alternative,<criteria...>`.
pub fn parse_matrix_csv(file: &Path, text: &str) -> Result<RawMatrix, InputError> {
    let parse_err = |line: u64, column: u64, message: String| InputError::Parse {
        file: file.display().to_string(),
        line,
        column,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => {
            let line = e.position().map_or(1, |p| p.line());
            return Err(parse_err(line, 1, e.to_string()));
        }
        None => return Err(parse_err(1, 1, "empty matrix file".into())),
    };
    if header.get(0) != Some("alternative") {
        return Err(parse_err(
            1,
            1,
            "first header cell must be \"alternative\"".into(),
        ));
    }
    let criteria: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();

    let mut alternatives = Vec::new();
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != criteria.len() + 1 {
            return Err(parse_err(
                line,
                1,
                format!(
                    "expected {} fields, found {}",
                    criteria.len() + 1,
                    record.len()
                ),
            ));
        }
        alternatives.push(record[0].to_owned());
        let row = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, cell)| {
                cell.parse::<f64>()
                    .map_err(|_| parse_err(line, k as u64 + 1, format!("not a number: {cell:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(RawMatrix {
        alternatives,
        criteria,
        rows,
    })
}

/// Assembles a matrix from parsed CSV contents and a config.
pub fn build_problem(
    raw: RawMatrix,
    config: &ProblemConfig,
) -> Result<DecisionMatrix<f64>, InputError> {
    let RawMatrix {
        alternatives,
        criteria,
        rows,
    } = raw;
    let mut objectives = Vec::with_capacity(criteria.len());
    let mut weights = Vec::with_capacity(criteria.len());
    for c in &criteria {
        objectives.push(
            *config
                .objectives
                .get(c)
                .ok_or_else(|| InputError::MissingObjective(c.clone()))?,
        );
        weights.push(
            *config
                .weights
                .get(c)
                .ok_or_else(|| InputError::MissingWeight(c.clone()))?,
        );
    }
    let stage_criteria = config.pipeline.iter().flat_map(|s| match s {
        Stage::FilterGt { thresholds } => thresholds.keys().collect(),
        _ => Vec::new(),
    });
    if let Some(unknown) = config
        .objectives
        .keys()
        .chain(config.weights.keys())
        .chain(stage_criteria)
        .find(|k| !criteria.contains(k))
    {
        return Err(InputError::UnknownCriterion(unknown.clone()));
    }
    Ok(DecisionMatrix::new(
        alternatives,
        criteria,
        rows,
        objectives,
        weights,
    )?)
}

/// Reads and validates a matrix/config pair. Criteria keep the CSV order.
pub fn load_problem(
    matrix_path: &Path,
    config_path: &Path,
) -> Result<(DecisionMatrix<f64>, ProblemConfig), InputError> {
    let config_text = read(config_path)?;
    let matrix_text = read(matrix_path)?;
    let config = parse_config(config_path, &config_text)?;
    let raw = parse_matrix_csv(matrix_path, &matrix_text)?;
    let dm = build_problem(raw, &config)?;
    Ok((dm, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    const M1_CSV: &str = "alternative,c1,c2\nA,10,10\nB,8,9\nC,5,4\n";
    const M1_TOML: &str = r#"
method = "weighted_sum"

[objectives]
c1 = "max"
c2 = "max"

[weights]
c1 = 0.6
c2 = 0.4
"#;

    fn load(csv: &str, toml: &str) -> Result<(DecisionMatrix<f64>, ProblemConfig), InputError> {
        let config = parse_config(Path::new("p.toml"), toml)?;
        let raw = parse_matrix_csv(Path::new("m.csv"), csv)?;
        Ok((build_problem(raw, &config)?, config))
    }

    #[test]
    fn m1_round_trip() {
        let (dm, config) = load(M1_CSV, M1_TOML).unwrap();
        let expected = DecisionMatrix::new(
            ["A", "B", "C"],
            ["c1", "c2"],
            vec![vec![10.0, 10.0], vec![8.0, 9.0], vec![5.0, 4.0]],
            vec![Objective::Maximize; 2],
            vec![0.6, 0.4],
        )
        .unwrap();
        assert_eq!(dm, expected);
        assert_eq!(config.method, MethodName::WeightedSum);
        assert!(config.tiebreak.force_untie);
    }

    #[test]
    fn non_numeric_cell_reports_location() {
        let err = load("alternative,c1,c2\nA,10,10\nB,8,x9\n", M1_TOML).unwrap_err();
        match err {
            InputError::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_weight_and_objective() {
        let no_weight = M1_TOML.replace("c2 = 0.4", "");
        assert!(matches!(
            load(M1_CSV, &no_weight).unwrap_err(),
            InputError::MissingWeight(c) if c == "c2"
        ));
        let no_obj = M1_TOML.replace("c1 = \"max\"", "");
        assert!(matches!(
            load(M1_CSV, &no_obj).unwrap_err(),
            InputError::MissingObjective(c) if c == "c1"
        ));
    }

    #[test]
    fn unknown_stage_is_rejected() {
        let toml = format!("{M1_TOML}\n[[pipeline]]\nstage = \"minmax\"\n");
        assert!(matches!(
            load(M1_CSV, &toml).unwrap_err(),
            InputError::UnknownStage { name, .. } if name == "minmax"
        ));
    }

    #[test]
    fn pipeline_stages_parse_in_order() {
        let toml = format!(
            "pipeline = [{{ stage = \"filter_gt\", thresholds = {{ c1 = 6.0 }} }}, {{ stage = \"sum_scaler\" }}]\n{M1_TOML}"
        );
        let (_, config) = load(M1_CSV, &toml).unwrap();
        assert_eq!(config.pipeline.len(), 2);
        assert_eq!(config.pipeline[1], Stage::SumScaler);
        assert_eq!(
            config.pipeline().name(),
            "Pipeline[filter_gt, sum_scaler, weighted_sum]"
        );
    }

    #[test]
    fn bad_objective_is_a_parse_error_with_line() {
        let toml = M1_TOML.replace("c2 = \"max\"", "c2 = \"most\"");
        match load(M1_CSV, &toml).unwrap_err() {
            InputError::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn threshold_on_unknown_criterion() {
        let toml = format!(
            "pipeline = [{{ stage = \"filter_gt\", thresholds = {{ c9 = 1.0 }} }}]\n{M1_TOML}"
        );
        assert!(matches!(
            load(M1_CSV, &toml).unwrap_err(),
            InputError::UnknownCriterion(c) if c == "c9"
        ));
    }

    #[test]
    fn ragged_row() {
        assert!(matches!(
            load("alternative,c1,c2\nA,1\n", M1_TOML).unwrap_err(),
            InputError::Parse { line: 2, .. }
        ));
    }
}
