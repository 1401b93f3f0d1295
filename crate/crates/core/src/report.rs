//! Verification reports and deterministic output documents.
//!
//! JSON documents are rendered from [`serde_json::Value`], whose maps keep
//! keys sorted, so identical inputs give identical bytes.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "hcube";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not settled within the configured budget; not a failure.
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub claims: Vec<Claim>,
    pub data: Value,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), claims: Vec::new(), data: Value::Null }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> &mut Claim {
        self.push(name, if passed { Status::Pass } else { Status::Fail }, detail)
    }

    pub fn push(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) -> &mut Claim {
        self.claims.push(Claim { name: name.into(), status, detail: detail.into(), witness: None });
        self.claims.last_mut().expect("just pushed")
    }

    /// True unless some claim failed.
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    /// Appends the claims of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.claims {
            c.name = format!("{prefix}{}", c.name);
            self.claims.push(c);
        }
    }
}

impl Claim {
    pub fn with_witness(&mut self, w: impl Serialize) -> &mut Self {
        self.witness = Some(serde_json::to_value(w).expect("witness serialises"));
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `{"header": {...}, "body": ...}` with the body's SHA-256 in the header.
/// The hash covers the compact rendering of the body.
pub fn json_document(command: &str, config: &impl Serialize, body: &impl Serialize) -> String {
    let body = serde_json::to_value(body).expect("body serialises");
    let config = serde_json::to_value(config).expect("config serialises");
    let hash = sha256_hex(serde_json::to_string(&body).expect("value renders").as_bytes());
    let doc = json!({
        "header": {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": command,
            "config": config,
            "content_sha256": hash,
        },
        "body": body,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("value renders");
    out.push('\n');
    out
}

/// Tab-separated table. Metadata goes on leading `#` lines; the column header
/// follows, then the rows in the given order. The hash covers the header
/// line and rows.
pub fn tsv_document(command: &str, config: &impl Serialize, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut table = columns.join("\t");
    table.push('\n');
    for r in rows {
        table.push_str(&r.join("\t"));
        table.push('\n');
    }
    let config = serde_json::to_value(config).expect("config serialises");
    format!(
        "# tool: {TOOL_NAME} {TOOL_VERSION}\n# command: {command}\n# config: {config}\n# content_sha256: {}\n{table}",
        sha256_hex(table.as_bytes())
    )
}

/// Strips `#` metadata lines from a TSV document.
pub fn tsv_body(doc: &str) -> impl Iterator<Item = &str> {
    doc.lines().filter(|l| !l.starts_with('#'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses() {
        let mut r = Report::new("t");
        r.check("a", true, "");
        r.push("b", Status::Unverified, "budget");
        assert!(r.passed());
        r.check("c", false, "boom").with_witness(vec![1, 2]);
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.claim("c").unwrap().witness, Some(json!([1, 2])));
    }

    #[test]
    fn json_is_deterministic_and_hashed() {
        let a = json_document("x", &json!({"b": 1, "a": 2}), &json!({"z": [1], "y": "p/q"}));
        let b = json_document("x", &json!({"a": 2, "b": 1}), &json!({"y": "p/q", "z": [1]}));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        let body = serde_json::to_string(&v["body"]).unwrap();
        assert_eq!(v["header"]["content_sha256"], sha256_hex(body.as_bytes()));
        assert_eq!(v["header"]["version"], TOOL_VERSION);
    }

    #[test]
    fn tsv_layout() {
        let doc = tsv_document("sizes", &json!({"k": 6}), &["a", "b"], &[vec!["1".into(), "2".into()]]);
        let body: Vec<&str> = tsv_body(&doc).collect();
        assert_eq!(body, vec!["a\tb", "1\t2"]);
        assert!(doc.contains(&sha256_hex(b"a\tb\n1\t2\n")));
    }
}
