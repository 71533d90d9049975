//! CSV ingestion: `value,group` rows into a grouped sample.

use crate::CliError;
use otperm::stats::GroupedSample;
use std::collections::HashMap;
use std::path::Path;

/// Read a `value,group` CSV. Group labels may be any non-empty token and are
/// numbered 1..K in order of first appearance; the returned vector maps the
/// group index back to its label.
pub fn read_grouped_csv(path: &Path) -> Result<(GroupedSample, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();

    let header =
        lines.next().ok_or_else(|| CliError::data(format!("{}: file is empty", path.display())))?.1;
    let cols: Vec<&str> = header.trim_start_matches('\u{feff}').split(',').map(str::trim).collect();
    if cols != ["value", "group"] {
        return Err(CliError::data(format!(
            "{}: line 1: header must be `value,group`, got `{header}`",
            path.display()
        )));
    }

    let mut labels: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CliError::data(format!(
                "{}: line {line_no}: expected `value,group`, got {} field(s)",
                path.display(),
                fields.len()
            )));
        }
        let value: f64 = fields[0].parse().map_err(|_| {
            CliError::data(format!(
                "{}: line {line_no}: `{}` is not a number",
                path.display(),
                fields[0]
            ))
        })?;
        if !value.is_finite() {
            return Err(CliError::data(format!(
                "{}: line {line_no}: value must be finite, got `{}`",
                path.display(),
                fields[0]
            )));
        }
        if fields[1].is_empty() {
            return Err(CliError::data(format!(
                "{}: line {line_no}: group label is empty",
                path.display()
            )));
        }
        let g = *index_of.entry(fields[1].to_string()).or_insert_with(|| {
            labels.push(fields[1].to_string());
            groups.push(Vec::new());
            labels.len() - 1
        });
        groups[g].push(value);
    }

    if groups.is_empty() {
        return Err(CliError::data(format!("{}: no data rows", path.display())));
    }
    if groups.len() < 2 {
        return Err(CliError::data(format!(
            "{}: need at least 2 groups, found only `{}`",
            path.display(),
            labels[0]
        )));
    }
    // Statistics need at least two observations per group; a thinner group
    // is a data problem, reported by name.
    for (g, label) in labels.iter().enumerate() {
        if groups[g].len() < 2 {
            return Err(CliError::data(format!(
                "{}: group `{label}` has {} observation(s); need at least 2",
                path.display(),
                groups[g].len()
            )));
        }
    }

    let sample = GroupedSample::from_groups(&groups)?;
    Ok((sample, labels))
}
