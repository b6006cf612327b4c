use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array1;

use super::experiment::Assignment;
use crate::error::{Error, Result};
use crate::graph::WeightVector;

/// A trained weight vector with the inference it was trained for.
///
/// Text format:
///
/// ```text
/// dim 60
/// assignment linear
/// lambda 10
/// w1 <60 values>
/// w2 <value>
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub w: WeightVector,
    pub assignment: Assignment,
    pub lambda: Option<f64>,
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim {}", self.w.attr_dim()).unwrap();
        let a = match self.assignment {
            Assignment::Linear => "linear",
            Assignment::Quadratic => "quadratic",
        };
        writeln!(s, "assignment {a}").unwrap();
        if let Some(l) = self.lambda {
            writeln!(s, "lambda {l}").unwrap();
        }
        let w1: Vec<String> = self.w.w1.iter().map(f64::to_string).collect();
        writeln!(s, "w1 {}", w1.join(" ")).unwrap();
        writeln!(s, "w2 {}", self.w.w2).unwrap();
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
        let num = |line: usize, s: &str| s.parse::<f64>().map_err(|e| err(line, format!("bad number {s:?}: {e}")));
        let (mut dim, mut assignment, mut lambda, mut w1, mut w2) = (None, None, None, None, None);
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let mut tok = raw.split_whitespace();
            let key = tok.next().unwrap_or_default();
            let rest: Vec<&str> = tok.collect();
            let single = || match rest[..] {
                [v] => Ok(v),
                _ => Err(err(line, format!("`{key}` takes one value"))),
            };
            match key {
                "dim" => dim = Some(single()?.parse::<usize>().map_err(|e| err(line, e.to_string()))?),
                "assignment" => {
                    assignment = Some(match single()? {
                        "linear" => Assignment::Linear,
                        "quadratic" => Assignment::Quadratic,
                        other => return Err(err(line, format!("unknown assignment {other:?}"))),
                    })
                }
                "lambda" => lambda = Some(num(line, single()?)?),
                "w1" => w1 = Some((line, rest.iter().map(|v| num(line, v)).collect::<Result<Vec<_>>>()?)),
                "w2" => w2 = Some(num(line, single()?)?),
                other => return Err(err(line, format!("unknown key {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| err(0, "missing `dim` header".into()))?;
        let (w1_line, w1) = w1.ok_or_else(|| err(0, "missing `w1`".into()))?;
        if w1.len() != dim {
            return Err(err(w1_line, format!("expected {dim} weights, got {}", w1.len())));
        }
        let w = WeightVector::new(Array1::from(w1), w2.ok_or_else(|| err(0, "missing `w2`".into()))?)?;
        Ok(Self { w, assignment: assignment.ok_or_else(|| err(0, "missing `assignment`".into()))?, lambda })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
