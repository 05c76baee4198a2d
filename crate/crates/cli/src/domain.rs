//! Loading the world function named by the domain flags.

use std::fs;
use std::path::Path;

use tgeometry::io::{load_domain, parse_coordinates_csv, parse_point_cloud};
use tgeometry::{
    make_world_function, DomainInput, GeneratorKind, GeneratorSpec, ValueKind, WorldFunction,
};

use crate::{DomainArgs, Failure};

fn coordinates(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let points = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_point_cloud(&text)?.points,
        Some("csv") => parse_coordinates_csv(&text)?,
        _ => {
            return Err(Failure::Input(format!(
                "{}: expected .json or .csv coordinates",
                path.display()
            )))
        }
    };
    Ok(points)
}

pub fn load(args: &DomainArgs) -> Result<WorldFunction, Failure> {
    let values = args
        .values
        .as_deref()
        .map(str::parse::<ValueKind>)
        .transpose()?;
    let kind = args
        .generator
        .as_deref()
        .map(str::parse::<GeneratorKind>)
        .transpose()?;
    match kind {
        None | Some(GeneratorKind::Matrix) => {
            if args.dim.is_some() || args.signature.is_some() {
                return Err(Failure::Input(
                    "--dim and --signature need a coordinate --generator".into(),
                ));
            }
            Ok(load_domain(&args.input, values)?)
        }
        Some(kind) => {
            if values.is_some() {
                return Err(Failure::Input(
                    "--values applies to value tables only".into(),
                ));
            }
            let points = coordinates(&args.input)?;
            let dimension = args
                .dim
                .or(args.signature.as_ref().map(Vec::len))
                .or(points.first().map(Vec::len))
                .unwrap_or(0);
            let spec = GeneratorSpec {
                kind,
                dimension,
                signature: args.signature.clone(),
                metric: None,
            };
            Ok(make_world_function(
                spec,
                DomainInput::Coordinates(&points),
            )?)
        }
    }
}
