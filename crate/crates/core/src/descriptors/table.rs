use std::io::{Read, Write};

use num_traits::ToPrimitive;

use super::{DescriptorError, FeatureVector};

/// Feature matrix with one row per graph id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn from_features(names: Vec<String>, ids: Vec<String>, fvs: &[FeatureVector]) -> Self {
        let rows = fvs.iter().map(|f| f.values.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()).collect();
        FeatureTable { names, ids, rows }
    }
}

/// Writes `id,<name_1>,...,<name_K>` followed by one row per graph. Integral values
/// are written without a fractional part.
pub fn write_feature_csv<W: Write>(out: W, table: &FeatureTable) -> Result<(), DescriptorError> {
    let err = |e: csv::Error| DescriptorError::Table(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend(table.names.iter().cloned());
    w.write_record(&header).map_err(err)?;
    for (id, row) in table.ids.iter().zip(&table.rows) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(|x| format!("{x}")));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| DescriptorError::Table(e.to_string()))
}

pub fn read_feature_csv<R: Read>(input: R) -> Result<FeatureTable, DescriptorError> {
    let err = |e: csv::Error| DescriptorError::Table(e.to_string());
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(err)?.clone();
    if header.get(0) != Some("id") {
        return Err(DescriptorError::Table("first column must be id".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(err)?;
        ids.push(rec.get(0).unwrap_or_default().to_string());
        let row = rec
            .iter()
            .skip(1)
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| DescriptorError::Table(format!("row {}: bad number {s:?}", line + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if row.len() != names.len() {
            return Err(DescriptorError::Length { expected: names.len(), found: row.len() });
        }
        rows.push(row);
    }
    Ok(FeatureTable { names, ids, rows })
}
