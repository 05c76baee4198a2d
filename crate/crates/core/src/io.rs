//! File formats for domains.
//!
//! A point cloud is a JSON object
//! `{"generator": "euclidean", "dimension": 2, "signature": [1, -1]?, "points": [[x, y], ...]}`.
//! A value table is a CSV matrix, either full square or lower triangle with the
//! diagonal, with a JSON sidecar `{"values": "sigma" | "rho"}` stored next to it
//! under the same stem (`d.csv` pairs with `d.json`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::{
    make_world_function, DomainInput, GeneratorKind, GeneratorSpec, ValueKind, WorldFunction,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointCloud {
    pub generator: GeneratorKind,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            kind: self.generator,
            dimension: self.dimension,
            signature: self.signature.clone(),
            metric: self.metric.clone(),
        }
    }

    pub fn world_function(&self) -> Result<WorldFunction> {
        if self.generator == GeneratorKind::Matrix {
            return Err(Error::Input(
                "a point cloud needs a coordinate generator, not matrix".into(),
            ));
        }
        make_world_function(self.spec(), DomainInput::Coordinates(&self.points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSidecar {
    pub values: ValueKind,
}

pub fn parse_point_cloud(text: &str) -> Result<PointCloud> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("point cloud: {e}")))
}

pub fn parse_sidecar(text: &str) -> Result<TableSidecar> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("sidecar: {e}")))
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Input(format!("csv: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::Input(format!(
                        "csv row {r}, column {c}: {field:?} is not a number"
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads one point per CSV row; all rows must have the same length.
pub fn parse_coordinates_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows = parse_csv_rows(text)?;
    if let Some(first) = rows.first() {
        if let Some((r, row)) = rows
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != first.len())
        {
            return Err(Error::Input(format!(
                "csv row {r} has {} coordinates, expected {}",
                row.len(),
                first.len()
            )));
        }
    }
    Ok(rows)
}

/// Reads a square or lower-triangular CSV matrix and returns the full square table.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows = parse_csv_rows(text)?;
    let n = rows.len();
    if rows.iter().all(|r| r.len() == n) {
        return Ok(rows);
    }
    if rows.iter().enumerate().all(|(i, r)| r.len() == i + 1) {
        let mut full = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                full[i][j] = v;
                full[j][i] = v;
            }
        }
        return Ok(full);
    }
    Err(Error::Input(format!(
        "csv with {n} rows is neither a square matrix nor a lower triangle with diagonal"
    )))
}

pub fn sidecar_path(table: &Path) -> PathBuf {
    table.with_extension("json")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Value kind for a table: from the sidecar, the explicit override, or both when they agree.
pub fn resolve_value_kind(
    sidecar: Option<TableSidecar>,
    explicit: Option<ValueKind>,
) -> Result<ValueKind> {
    match (sidecar.map(|s| s.values), explicit) {
        (Some(a), Some(b)) if a != b => Err(Error::Input(format!(
            "sidecar declares {a:?} values but {b:?} was requested"
        ))),
        (Some(k), _) | (None, Some(k)) => Ok(k),
        (None, None) => Err(Error::Input(
            "table values must be declared as sigma or rho (sidecar or override)".into(),
        )),
    }
}

/// Loads a domain from a `.json` point cloud or a `.csv` table with its sidecar.
pub fn load_domain(path: &Path, values: Option<ValueKind>) -> Result<WorldFunction> {
    let text = read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_point_cloud(&text)?.world_function(),
        Some("csv") => {
            let side = sidecar_path(path);
            let sidecar = if side.exists() {
                Some(parse_sidecar(&read(&side)?)?)
            } else {
                None
            };
            let kind = resolve_value_kind(sidecar, values)?;
            let table = parse_matrix_csv(&text)?;
            make_world_function(
                GeneratorSpec::matrix(),
                DomainInput::Table {
                    values: &table,
                    kind,
                },
            )
        }
        _ => Err(Error::Input(format!(
            "{}: expected a .json point cloud or a .csv table",
            path.display()
        ))),
    }
}

/// Renders a table as CSV with full round-trip precision.
pub fn write_matrix_csv(table: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in table {
        let fields: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Shortest decimal form that parses back to the same double.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::PointId;

    #[test]
    fn lower_triangle_mirrors() {
        let t = parse_matrix_csv("0\n1, 0\n4,9,0\n").unwrap();
        assert_eq!(
            t,
            vec![
                vec![0.0, 1.0, 4.0],
                vec![1.0, 0.0, 9.0],
                vec![4.0, 9.0, 0.0]
            ]
        );
        assert_eq!(parse_matrix_csv("0,1,4\n1,0,9\n4,9,0").unwrap(), t);
    }

    #[test]
    fn malformed_csv() {
        assert!(parse_matrix_csv("0,1\n1,0,2\n").is_err());
        assert!(parse_matrix_csv("0,x\nx,0\n").is_err());
    }

    #[test]
    fn coordinate_rows() {
        assert_eq!(
            parse_coordinates_csv("0,1\n2,3\n").unwrap(),
            vec![vec![0.0, 1.0], vec![2.0, 3.0]]
        );
        assert!(parse_coordinates_csv("0,1\n2\n").is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = vec![vec![0.0, 0.1 + 0.2], vec![0.1 + 0.2, 0.0]];
        assert_eq!(parse_matrix_csv(&write_matrix_csv(&t)).unwrap(), t);
    }

    #[test]
    fn values_must_be_declared() {
        assert!(resolve_value_kind(None, None).is_err());
        let rho = TableSidecar {
            values: ValueKind::Rho,
        };
        assert!(resolve_value_kind(Some(rho), Some(ValueKind::Sigma)).is_err());
        assert_eq!(resolve_value_kind(Some(rho), None).unwrap(), ValueKind::Rho);
    }

    #[test]
    fn point_cloud_json() {
        let pc = parse_point_cloud(
            r#"{"generator":"pseudo_euclidean","dimension":2,"signature":[1,-1],"points":[[0,0],[1,2]]}"#,
        )
        .unwrap();
        let wf = pc.world_function().unwrap();
        assert_eq!(wf.sigma(PointId(0), PointId(1)).unwrap(), -1.5);
        assert!(parse_point_cloud(r#"{"generator":"euclidean","points":[]}"#).is_err());
    }

    #[test]
    fn load_table_with_sidecar() {
        let dir = std::env::temp_dir().join(format!("tgeo-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let csv = dir.join("d.csv");
        fs::write(&csv, "0\n2,0\n").unwrap();
        fs::write(dir.join("d.json"), r#"{"values":"rho"}"#).unwrap();
        let wf = load_domain(&csv, None).unwrap();
        assert_eq!(wf.sigma(PointId(0), PointId(1)).unwrap(), 2.0);
        fs::remove_dir_all(&dir).unwrap();
    }
}
