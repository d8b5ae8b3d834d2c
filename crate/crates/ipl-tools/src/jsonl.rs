//! JSONL corpus files: one `TheoremRecord` per line, UTF-8, field order
//! fixed by the struct. Export is byte-deterministic for a given record
//! sequence.

use anyhow::{Context, Result};
use ipl_core::dataset::TheoremRecord;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub fn records_to_string(records: &[TheoremRecord]) -> Result<String> {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn export_jsonl(records: &[TheoremRecord], path: &Path) -> Result<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a corpus back; malformed lines are reported with their 1-based line
/// number.
pub fn import_jsonl(path: &Path) -> Result<Vec<TheoremRecord>> {
    let file =
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("{}:{}", path.display(), index + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TheoremRecord = serde_json::from_str(&line).with_context(|| {
            format!("{}:{}: malformed record", path.display(), index + 1)
        })?;
        records.push(record);
    }
    Ok(records)
}
