//! LIBSVM text format: `label idx:val idx:val ...` with 1-based indices.
//!
//! Labels `+1` and `1` are positive; `-1` and `0` are negative.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gadget_core::{Dataset, Label, LabeledInstance, SparseVector};

use crate::error::{Error, Result};

/// Parses one line. `line_no` (1-based) is carried into errors. The vector's
/// dimension is its largest index, or `dim_hint` when that is larger.
pub fn parse_libsvm_line(line: &str, dim_hint: Option<usize>, line_no: usize) -> Result<LabeledInstance> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let mut tokens = line.split_whitespace();
    let label = tokens.next().ok_or_else(|| err("empty line".into()))?;
    let y = match label {
        "+1" | "1" | "+1.0" | "1.0" => Label::Positive,
        "-1" | "0" | "-1.0" | "0.0" => Label::Negative,
        other => return Err(err(format!("unknown label `{other}`"))),
    };

    let mut entries = Vec::new();
    let mut last = 0u32;
    for tok in tokens {
        let (idx, val) = tok.split_once(':').ok_or_else(|| err(format!("malformed token `{tok}`")))?;
        let idx: u32 = idx.parse().map_err(|_| err(format!("bad index in `{tok}`")))?;
        let val: f64 = val.parse().map_err(|_| err(format!("bad value in `{tok}`")))?;
        if idx == 0 {
            return Err(err(format!("index 0 in `{tok}`; indices are 1-based")));
        }
        if idx <= last {
            return Err(err(format!("index {idx} does not increase")));
        }
        if !val.is_finite() {
            return Err(err(format!("non-finite value in `{tok}`")));
        }
        last = idx;
        // explicit zeros carry no information and are dropped
        if val != 0.0 {
            entries.push((idx, val));
        }
    }
    let dim = (last as usize).max(dim_hint.unwrap_or(0));
    let x = SparseVector::new(entries, dim).map_err(|e| err(e.to_string()))?;
    Ok(LabeledInstance::new(x, y))
}

/// Loads a whole file. Blank lines and `#` comment lines are skipped. The
/// dataset dimension is the largest index seen, or `dim` when given.
pub fn load_dataset(path: impl AsRef<Path>, dim: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, path, dim).map_err(|e| match e {
        Error::EmptyDataset { .. } => e,
        other => Error::in_file(path)(other),
    })
}

pub fn parse_dataset(text: &str, path: &Path, dim: Option<usize>) -> Result<Dataset> {
    let mut instances = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        instances.push(parse_libsvm_line(trimmed, None, k + 1)?);
    }
    if instances.is_empty() {
        return Err(Error::EmptyDataset { path: path.to_path_buf() });
    }
    let name = path.file_stem().map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Dataset::new(name, instances, dim)?)
}

/// Formats an instance so that [`parse_libsvm_line`] reads it back unchanged.
pub fn format_instance(inst: &LabeledInstance) -> String {
    let mut out = String::from(match inst.y {
        Label::Positive => "+1",
        Label::Negative => "-1",
    });
    for &(i, v) in inst.x.entries() {
        write!(out, " {i}:{v:?}").expect("writing to a String cannot fail");
    }
    out
}

pub fn write_dataset(path: impl AsRef<Path>, instances: &[LabeledInstance]) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for inst in instances {
        text.push_str(&format_instance(inst));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
