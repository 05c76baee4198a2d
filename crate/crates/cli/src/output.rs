//! Rendering reports as JSON or CSV.
//!
//! CSV columns, one table per command (header row always present):
//!
//! ```text
//! classify     order,points,f_n,length_class
//! tube         point,residual,member,class
//! section      point
//! degeneracy   verdict,interior,on_segment,outside,on_segment_non_basis
//! embed-check  verdict,failing_condition,max_residual,witness,dimension
//! sphere-demo  a_x,a_y,a_z,b_x,b_y,b_z,c_x,c_y,c_z,l_min,closed_form,abs_error
//! ```
//!
//! Point lists inside a field are space separated. Floats use the shortest
//! representation that parses back to the same double.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tgeometry::io::format_f64;

use crate::Failure;

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn num(v: f64) -> String {
    format_f64(v)
}

pub fn ids(points: &[usize]) -> String {
    points
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
