use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Point;

/// A set of landmarks in one image or frame.
///
/// On disk: a `width W` line followed by one point per line, either
/// `id x y` (labelled) or `x y` (unlabelled). Blank lines and lines starting
/// with `#` are ignored. A file is either fully labelled or unlabelled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub points: Vec<Point>,
    pub labels: Option<Vec<u64>>,
    pub width: f64,
}

impl SceneFile {
    pub fn new(points: Vec<Point>, labels: Option<Vec<u64>>, width: f64) -> Result<Self> {
        let s = Self { points, labels, width };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidArgument(format!("scene width {} must be positive", self.width)));
        }
        if self.points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.points.len() {
                return Err(Error::dims("scene labels", self.points.len(), labels.len()));
            }
            let mut seen = HashSet::new();
            if let Some(dup) = labels.iter().find(|l| !seen.insert(**l)) {
                return Err(Error::InvalidArgument(format!("duplicate landmark id {dup}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point carrying landmark `id`.
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|&l| l == id)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "width {}", self.width).unwrap();
        for (k, p) in self.points.iter().enumerate() {
            match &self.labels {
                Some(l) => writeln!(s, "{} {} {}", l[k], p[0], p[1]).unwrap(),
                None => writeln!(s, "{} {}", p[0], p[1]).unwrap(),
            }
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
        let mut width = None;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut labelled = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens[0] == "width" {
                if width.is_some() {
                    return Err(err(line_no, "duplicate width line".into()));
                }
                let [_, w] = tokens[..] else {
                    return Err(err(line_no, "expected `width W`".into()));
                };
                let w: f64 = w.parse().map_err(|e| err(line_no, format!("bad width {w:?}: {e}")))?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(err(line_no, format!("width {w} must be positive")));
                }
                width = Some(w);
                continue;
            }
            let has_id = match tokens.len() {
                2 => false,
                3 => true,
                n => return Err(err(line_no, format!("expected `id x y` or `x y`, got {n} fields"))),
            };
            if *labelled.get_or_insert(has_id) != has_id {
                return Err(err(line_no, "mixes labelled and unlabelled points".into()));
            }
            let coords = &tokens[tokens.len() - 2..];
            let mut p = [0.0; 2];
            for (slot, tok) in p.iter_mut().zip(coords) {
                let v: f64 = tok.parse().map_err(|e| err(line_no, format!("bad coordinate {tok:?}: {e}")))?;
                if !v.is_finite() {
                    return Err(err(line_no, format!("non-finite coordinate {tok}")));
                }
                *slot = v;
            }
            if has_id {
                let id: u64 =
                    tokens[0].parse().map_err(|e| err(line_no, format!("bad landmark id {:?}: {e}", tokens[0])))?;
                if labels.contains(&id) {
                    return Err(err(line_no, format!("duplicate landmark id {id}")));
                }
                labels.push(id);
            }
            points.push(p);
        }
        let width = width.ok_or_else(|| err(0, "missing `width` line".into()))?;
        Self::new(points, labelled.unwrap_or(false).then_some(labels), width)
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<SceneFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SceneFile::parse(&text, path)
}

pub fn save_scene(scene: &SceneFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scene.to_text()).map_err(|e| Error::io(path, e))
}
