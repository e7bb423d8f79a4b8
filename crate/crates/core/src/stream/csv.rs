//! CSV ingestion: one instance per row, label column declared (never
//! sniffed), rows streamed lazily so files larger than memory are fine.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::numeric::Vector;
use crate::stream::{LabeledInstance, StreamError};

/// Declared layout of a CSV source. Every row must have exactly
/// `num_features + 1` columns: the label at `label_column` (0-based) and the
/// features, in file order, everywhere else.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub label_column: usize,
    pub num_features: usize,
    pub num_classes: usize,
    #[serde(default)]
    pub has_header: bool,
    /// When set, labels are matched against these strings and mapped to
    /// their position; otherwise labels parse as integers (an integral
    /// float like "2.0" is accepted).
    #[serde(default)]
    pub label_values: Option<Vec<String>>,
    /// Optional per-feature (min, max); each feature is affinely mapped so
    /// min → −1 and max → 1, matching the synthetic input range. Values
    /// outside the declared range extrapolate rather than clamp.
    #[serde(default)]
    pub min_max: Option<Vec<(f64, f64)>>,
}

impl CsvSchema {
    pub fn new(label_column: usize, num_features: usize, num_classes: usize) -> Self {
        CsvSchema {
            label_column,
            num_features,
            num_classes,
            has_header: false,
            label_values: None,
            min_max: None,
        }
    }

    /// Violations of the schema invariants; empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.num_features == 0 {
            v.push("csv schema needs num_features >= 1".to_string());
        }
        if self.num_classes < 2 {
            v.push(format!("csv schema needs num_classes >= 2, got {}", self.num_classes));
        }
        if self.label_column > self.num_features {
            v.push(format!(
                "label_column {} out of range for {} columns",
                self.label_column,
                self.num_features + 1
            ));
        }
        if let Some(values) = &self.label_values {
            if values.len() != self.num_classes {
                v.push(format!(
                    "label_values has {} entries but num_classes is {}",
                    values.len(),
                    self.num_classes
                ));
            }
        }
        if let Some(ranges) = &self.min_max {
            if ranges.len() != self.num_features {
                v.push(format!(
                    "min_max has {} entries but num_features is {}",
                    ranges.len(),
                    self.num_features
                ));
            }
            for (i, &(lo, hi)) in ranges.iter().enumerate() {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    v.push(format!("min_max[{}] must have min < max, got ({}, {})", i, lo, hi));
                }
            }
        }
        v
    }

    fn parse_label(&self, field: &str, path: &str, row: u64) -> Result<usize, StreamError> {
        let field = field.trim();
        let malformed = |message: String| StreamError::MalformedRow {
            path: path.to_string(),
            row,
            message,
        };
        let label = if let Some(values) = &self.label_values {
            values
                .iter()
                .position(|v| v == field)
                .ok_or_else(|| malformed(format!("label {:?} not in declared label set", field)))?
        } else {
            parse_integer_label(field)
                .ok_or_else(|| malformed(format!("cannot parse label {:?} as a class index", field)))?
        };
        if label >= self.num_classes {
            return Err(malformed(format!(
                "label {} out of range for {} classes",
                label, self.num_classes
            )));
        }
        Ok(label)
    }
}

/// Accepts "3" and "3.0" but not "3.5" or negatives.
fn parse_integer_label(field: &str) -> Option<usize> {
    if let Ok(v) = field.parse::<u64>() {
        return Some(v as usize);
    }
    if let Ok(f) = field.parse::<f64>() {
        if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= u32::MAX as f64 {
            return Some(f as usize);
        }
    }
    None
}

/// Lazy row iterator over a CSV source.
pub struct CsvStream<R: Read> {
    reader: csv::Reader<R>,
    schema: CsvSchema,
    path: String,
    row: u64,
    record: csv::StringRecord,
}

/// Opens `path` and streams it under `schema`. Rows are read one at a time;
/// resident memory stays bounded regardless of file size.
pub fn read_csv_stream<P: AsRef<Path>>(
    path: P,
    schema: &CsvSchema,
) -> Result<CsvStream<File>, StreamError> {
    let path_str = path.as_ref().display().to_string();
    let problems = schema.violations();
    if !problems.is_empty() {
        return Err(StreamError::InvalidSpec(problems.join("; ")));
    }
    let file = File::open(path.as_ref())
        .map_err(|source| StreamError::Io { path: path_str.clone(), source })?;
    Ok(CsvStream::from_reader(file, schema.clone(), path_str))
}

impl<R: Read> CsvStream<R> {
    /// Streams from any reader; `path` is only used in error messages.
    pub fn from_reader(reader: R, schema: CsvSchema, path: String) -> CsvStream<R> {
        let reader = csv::ReaderBuilder::new()
            .has_headers(schema.has_header)
            .flexible(true)
            .from_reader(reader);
        CsvStream { reader, schema, path, row: 0, record: csv::StringRecord::new() }
    }

    fn parse_record(&self) -> Result<LabeledInstance, StreamError> {
        let malformed = |message: String| StreamError::MalformedRow {
            path: self.path.clone(),
            row: self.row,
            message,
        };
        let want = self.schema.num_features + 1;
        if self.record.len() != want {
            return Err(malformed(format!(
                "expected {} columns, found {}",
                want,
                self.record.len()
            )));
        }
        let label = self.schema.parse_label(
            &self.record[self.schema.label_column],
            &self.path,
            self.row,
        )?;
        let mut features = Vec::with_capacity(self.schema.num_features);
        for (col, field) in self.record.iter().enumerate() {
            if col == self.schema.label_column {
                continue;
            }
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| malformed(format!("column {}: cannot parse {:?} as a number", col, field)))?;
            if !value.is_finite() {
                return Err(malformed(format!("column {}: non-finite feature {}", col, value)));
            }
            features.push(value);
        }
        if let Some(ranges) = &self.schema.min_max {
            for (x, &(lo, hi)) in features.iter_mut().zip(ranges) {
                *x = -1.0 + 2.0 * (*x - lo) / (hi - lo);
            }
        }
        Ok(LabeledInstance { features: Vector::from_vec(features), label })
    }
}

impl<R: Read> Iterator for CsvStream<R> {
    type Item = Result<LabeledInstance, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.reader.read_record(&mut self.record) {
            Ok(false) => None,
            Ok(true) => {
                self.row += 1;
                Some(self.parse_record())
            }
            Err(source) => {
                self.row += 1;
                Some(Err(StreamError::MalformedRow {
                    path: self.path.clone(),
                    row: self.row,
                    message: source.to_string(),
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;
    use std::io::Write;
    use std::rc::Rc;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    fn schema_2f() -> CsvSchema {
        CsvSchema::new(2, 2, 2)
    }

    #[test]
    fn well_formed_rows_stream_in_order() {
        let f = write_temp("0.5,-1.25,0\n0.125,2.0,1\n-3.5,0.0,0\n");
        let out: Vec<_> = read_csv_stream(f.path(), &schema_2f())
            .unwrap()
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].features.as_slice(), &[0.5, -1.25]);
        assert_eq!(out[0].label, 0);
        assert_eq!(out[1].label, 1);
        assert_eq!(out[2].features.as_slice(), &[-3.5, 0.0]);
    }

    #[test]
    fn short_row_errors_with_row_number() {
        let f = write_temp("0.5,1.0,0\n0.25,1\n0.5,1.0,1\n");
        let results: Vec<_> = read_csv_stream(f.path(), &schema_2f()).unwrap().collect();
        assert!(results[0].is_ok());
        let err = results[1].as_ref().unwrap_err().to_string();
        assert!(err.contains("row 2"), "{}", err);
        assert!(err.contains("columns"), "{}", err);
        assert!(results[2].is_ok(), "later rows still parse");
    }

    #[test]
    fn header_is_skipped_when_declared() {
        let f = write_temp("a,b,label\n1.0,2.0,1\n");
        let schema = CsvSchema { has_header: true, ..schema_2f() };
        let out: Vec<_> =
            read_csv_stream(f.path(), &schema).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].label, 1);
    }

    #[test]
    fn label_column_can_sit_anywhere() {
        let f = write_temp("1,0.5,00.25\n");
        let schema = CsvSchema::new(0, 2, 2);
        let out: Vec<_> =
            read_csv_stream(f.path(), &schema).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(out[0].label, 1);
        assert_eq!(out[0].features.as_slice(), &[0.5, 0.25]);
    }

    #[test]
    fn string_labels_map_through_declared_set() {
        let f = write_temp("0.1,0.2,ham\n0.3,0.4,spam\n");
        let schema = CsvSchema {
            label_values: Some(vec!["ham".to_string(), "spam".to_string()]),
            ..schema_2f()
        };
        let out: Vec<_> =
            read_csv_stream(f.path(), &schema).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(out[0].label, 0);
        assert_eq!(out[1].label, 1);
    }

    #[test]
    fn integral_float_labels_parse() {
        let f = write_temp("0.1,0.2,1.0\n0.1,0.2,0.000\n");
        let out: Vec<_> =
            read_csv_stream(f.path(), &schema_2f()).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(out[0].label, 1);
        assert_eq!(out[1].label, 0);
    }

    #[test]
    fn bad_labels_are_rejected() {
        for row in ["0.1,0.2,1.5\n", "0.1,0.2,-1\n", "0.1,0.2,9\n", "0.1,0.2,dog\n"] {
            let f = write_temp(row);
            let results: Vec<_> = read_csv_stream(f.path(), &schema_2f()).unwrap().collect();
            assert!(results[0].is_err(), "{:?} should not parse", row);
        }
    }

    #[test]
    fn min_max_scaling_hits_the_endpoints() {
        let f = write_temp("0.0,10.0,0\n4.0,20.0,1\n2.0,15.0,0\n");
        let schema = CsvSchema {
            min_max: Some(vec![(0.0, 4.0), (10.0, 20.0)]),
            ..schema_2f()
        };
        let out: Vec<_> =
            read_csv_stream(f.path(), &schema).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(out[0].features.as_slice(), &[-1.0, -1.0]);
        assert_eq!(out[1].features.as_slice(), &[1.0, 1.0]);
        assert_eq!(out[2].features.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn schema_validation_is_total() {
        let bad = CsvSchema {
            label_column: 9,
            num_features: 2,
            num_classes: 1,
            has_header: false,
            label_values: Some(vec!["a".to_string()]),
            min_max: Some(vec![(1.0, 1.0)]),
        };
        let v = bad.violations();
        assert!(v.len() >= 4, "want every violation listed, got {:?}", v);
        assert!(CsvSchema::new(2, 2, 2).violations().is_empty());
    }

    /// Read wrapper that counts how many bytes the CSV reader actually
    /// pulled, to show streaming is lazy.
    struct CountingReader<R> {
        inner: R,
        count: Rc<Cell<usize>>,
    }

    impl<R: Read> Read for CountingReader<R> {
        fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
            let n = self.inner.read(buf)?;
            self.count.set(self.count.get() + n);
            Ok(n)
        }
    }

    #[test]
    fn reading_is_lazy_and_memory_bounded() {
        // ~4.8 MB of rows; taking 10 instances must consume only the
        // reader's first buffered chunks, not the whole input.
        let row = "0.123456789,0.987654321,1\n";
        let big: String = row.repeat(200_000);
        let total = big.len();
        let count = Rc::new(Cell::new(0));
        let reader = CountingReader { inner: big.as_bytes(), count: Rc::clone(&count) };
        let mut stream = CsvStream::from_reader(reader, schema_2f(), "synthetic".to_string());
        for _ in 0..10 {
            stream.next().unwrap().unwrap();
        }
        assert!(
            count.get() < total / 10,
            "consumed {} of {} bytes after 10 rows",
            count.get(),
            total
        );
    }
}
