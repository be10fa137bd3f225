//! Reading measured interferograms from `alpha,power` CSV files.

use std::f64::consts::TAU;
use std::io::Read;
use std::path::Path;

use cinterf::{DelaySchedule, MeasurementVector};

use crate::error::{CliError, CliResult};

fn ingest_error(line: u64, message: impl Into<String>) -> CliError {
    CliError::Ingest { line, message: message.into() }
}

/// Loads `path` and subtracts `baseline` from every power sample.
pub fn ingest_interferogram(path: &Path, baseline: f64, wrap: bool) -> CliResult<(DelaySchedule, MeasurementVector)> {
    let file = std::fs::File::open(path)?;
    ingest_reader(file, baseline, wrap)
}

/// [`ingest_interferogram`] over any byte source. Line numbers in errors
/// refer to the original text, comment lines included.
pub fn ingest_reader<R: Read>(
    mut source: R,
    baseline: f64,
    wrap: bool,
) -> CliResult<(DelaySchedule, MeasurementVector)> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    // The csv reader sees only non-comment lines; `origin` maps its 1-based
    // line numbers back to the file's.
    let mut kept = String::with_capacity(text.len());
    let mut origin = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        kept.push_str(line);
        kept.push('\n');
        origin.push(i as u64 + 1);
    }
    let total_lines = text.lines().count() as u64;
    let file_line = |csv_line: u64| origin.get(csv_line.saturating_sub(1) as usize).copied().unwrap_or(total_lines + 1);

    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(kept.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(ingest_error(1, "empty file: expected header `alpha,power`")),
        Some(r) => r.map_err(|e| csv_error(&e, &file_line))?,
    };
    let header_line = file_line(line_of(&header));
    if header.len() != 2 || &header[0] != "alpha" || &header[1] != "power" {
        return Err(ingest_error(header_line, "missing header: expected `alpha,power`"));
    }

    let mut alphas = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(&e, &file_line))?;
        let line = file_line(line_of(&record));
        if record.len() != 2 {
            return Err(ingest_error(line, format!("expected 2 fields, found {}", record.len())));
        }
        let alpha = number(&record[0], "alpha", line)?;
        let power = number(&record[1], "power", line)?;
        let alpha = if (0.0..=TAU).contains(&alpha) {
            alpha
        } else if wrap {
            alpha.rem_euclid(TAU)
        } else {
            return Err(ingest_error(line, format!("alpha = {alpha} lies outside [0, 2π]; pass --wrap to reduce it")));
        };
        alphas.push(alpha);
        values.push(power - baseline);
    }
    if alphas.is_empty() {
        return Err(ingest_error(header_line + 1, "no samples after header"));
    }
    let schedule = DelaySchedule::from_alphas(alphas)?;
    Ok((schedule, MeasurementVector::new(values, 0.0)?))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn number(field: &str, column: &str, line: u64) -> CliResult<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ingest_error(line, format!("{column} '{field}' is not a finite number"))),
    }
}

fn csv_error(err: &csv::Error, file_line: &impl Fn(u64) -> u64) -> CliError {
    let line = file_line(err.position().map_or(0, |p| p.line()));
    match err.kind() {
        csv::ErrorKind::Io(e) => CliError::Io(std::io::Error::new(e.kind(), e.to_string())),
        _ => ingest_error(line, err.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str, wrap: bool) -> CliResult<(DelaySchedule, MeasurementVector)> {
        ingest_reader(text.as_bytes(), 1.0, wrap)
    }

    fn error_line(result: CliResult<(DelaySchedule, MeasurementVector)>) -> u64 {
        match result {
            Err(CliError::Ingest { line, .. }) => line,
            other => panic!("expected ingestion error, got {other:?}"),
        }
    }

    #[test]
    fn baseline_is_subtracted() {
        let text = format!("alpha,power\n0,2.0\n{},0.0\n", std::f64::consts::PI);
        let (s, y) = ingest(&text, false).unwrap();
        assert_eq!(y.values(), &[1.0, -1.0]);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn out_of_range_alpha_reports_line() {
        assert_eq!(error_line(ingest("alpha,power\n7.0,1.0\n", false)), 2);
        let (s, _) = ingest("alpha,power\n7.0,1.0\n", true).unwrap();
        assert!((s.alphas()[0] - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn comments_count_towards_line_numbers() {
        assert_eq!(error_line(ingest("# measured\nalpha,power\n0,1\n# gap\nx,1\n", false)), 5);
    }

    #[test]
    fn malformed_files() {
        assert_eq!(error_line(ingest("", false)), 1);
        assert_eq!(error_line(ingest("0,1\n", false)), 1);
        assert_eq!(error_line(ingest("alpha,power\n", false)), 2);
        assert_eq!(error_line(ingest("alpha,power\n0,1\n1,nan\n", false)), 3);
        assert_eq!(error_line(ingest("alpha,power\n0,1,2\n", false)), 2);
    }

    #[test]
    fn even_grid_is_recognized() {
        let text: String = std::iter::once("alpha,power\n".to_string())
            .chain((0..8).map(|j| format!("{:.16e},1\n", TAU * j as f64 / 8.0)))
            .collect();
        let (s, _) = ingest(&text, false).unwrap();
        assert_eq!(s.kind(), cinterf::ScheduleKind::EvenGrid);
    }
}
