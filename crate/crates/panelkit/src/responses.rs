//! CSV ingest of survey responses (`participant,object,method,selected`).

use std::io::Read;

use panelkit_core::evalstats::{Method, Response, ResponseTable};
use serde::Deserialize;

use crate::error::ServiceError;

#[derive(Debug, Deserialize)]
struct Row {
    participant: String,
    object: String,
    method: String,
    selected: String,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

pub fn read_responses(reader: impl Read) -> Result<ResponseTable, ServiceError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut records = Vec::new();
    for (n, row) in rdr.deserialize::<Row>().enumerate() {
        let line = n + 2;
        let row = row.map_err(|e| ServiceError::validation("responses", format!("line {line}: {e}")))?;
        let method: Method = row
            .method
            .parse()
            .map_err(|_| ServiceError::validation("responses", format!("line {line}: unknown method {:?}", row.method)))?;
        let selected = parse_bool(&row.selected).ok_or_else(|| {
            ServiceError::validation("responses", format!("line {line}: selected must be 0/1, got {:?}", row.selected))
        })?;
        records.push(Response {
            participant: row.participant,
            object: row.object,
            method,
            selected,
        });
    }
    Ok(ResponseTable::new(records)?)
}

pub fn write_responses(table: &ResponseTable) -> String {
    let mut out = String::from("participant,object,method,selected\n");
    for r in table.records() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.participant,
            r.object,
            r.method.as_str(),
            u8::from(r.selected)
        ));
    }
    out
}
