use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

/// CSV with a header row, or a JSON array with one object per row. Floats
/// use the shortest representation that parses back to the same value.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
            }
            w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows).map_err(|e| CliError::Usage(format!("json: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

pub fn write(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: f64,
        name: String,
    }

    #[test]
    fn csv_round_trips_floats() {
        let v = 0.1 + 0.2;
        let bytes = render(&[Row { x: v, name: "5,11,4".into() }], Format::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,name"));
        let line = lines.next().unwrap();
        let (num, rest) = line.split_once(',').unwrap();
        assert_eq!(num.parse::<f64>().unwrap(), v);
        assert_eq!(rest, "\"5,11,4\"");
    }

    #[test]
    fn json_is_array_of_objects() {
        let bytes = render(&[Row { x: 1e-300, name: "a".into() }], Format::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(parsed[0]["x"].as_f64(), Some(1e-300));
        assert_eq!(parsed[0]["name"], "a");
    }
}
