use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An input problem; the message goes to standard error and the exit code is 2.
#[derive(Debug)]
pub struct Fail(pub String);

impl From<annulus_core::Error> for Fail {
    fn from(e: annulus_core::Error) -> Self {
        Fail(e.to_string())
    }
}

pub fn error_line(command: &str, msg: &str) -> String {
    json!({ "tool": "annet", "version": VERSION, "command": command, "error": msg }).to_string()
}

pub fn read_input(path: &Path) -> Result<(String, String), Fail> {
    let bytes = fs::read(path).map_err(|e| Fail(format!("cannot read {}: {e}", path.display())))?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| Fail(format!("{} is not UTF-8", path.display())))?;
    Ok((text, hash))
}

pub struct Report {
    pub command: &'static str,
    pub input_sha256: String,
    /// where the report goes; standard output when `None`
    pub target: Option<PathBuf>,
}

impl Report {
    fn header(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!("annet"));
        m.insert("version".into(), json!(VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("input_sha256".into(), json!(self.input_sha256));
        m
    }

    fn emit(&self, text: String) -> Result<(), Fail> {
        match &self.target {
            Some(p) => fs::write(p, text).map_err(|e| Fail(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// A single JSON document.
    pub fn document(&self, result: Value) -> Result<(), Fail> {
        let mut m = self.header();
        m.insert("result".into(), result);
        self.emit(format!("{}\n", serde_json::to_string_pretty(&Value::Object(m)).expect("json")))
    }

    /// JSON lines: a header, one line per record, a summary. Returns whether
    /// every record with a `pass` field passed.
    pub fn lines(&self, meta: Value, records: &[Value]) -> Result<bool, Fail> {
        let mut head = self.header();
        if let Value::Object(extra) = meta {
            head.extend(extra);
        }
        let mut out = vec![Value::Object(head).to_string()];
        let (mut checked, mut passed) = (0usize, 0usize);
        for r in records {
            if let Some(p) = r.get("pass").and_then(Value::as_bool) {
                checked += 1;
                passed += p as usize;
            }
            out.push(r.to_string());
        }
        let ok = checked == passed;
        out.push(
            json!({ "summary": { "records": records.len(), "checked": checked, "passed": passed, "pass": ok } })
                .to_string(),
        );
        self.emit(out.join("\n") + "\n")?;
        Ok(ok)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail(format!("cannot write {}: {e}", path.display())))
}
