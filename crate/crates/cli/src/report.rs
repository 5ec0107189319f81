//! Line-oriented reports with a JSON twin. Every claim carries the nature
//! of the arithmetic behind it, and the whole report ends with a digest of
//! its own bytes so byte-level determinism is checkable at a glance.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// How a claim was established: by exact word/integer arithmetic, by
/// certified ball arithmetic, or not at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Symbolic,
    Certified,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Symbolic => "symbolic",
            Status::Certified => "certified",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub name: String,
    pub value: String,
    pub status: Status,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.into(), claims: Vec::new() }
    }

    pub fn push(&mut self, name: &str, value: impl Into<String>, status: Status) {
        self.claims.push(Claim { name: name.into(), value: value.into(), status, ok: true });
    }

    pub fn fail(&mut self, name: &str, value: impl Into<String>, status: Status) {
        self.claims.push(Claim { name: name.into(), value: value.into(), status, ok: false });
    }

    pub fn pass(&self) -> bool {
        self.claims.iter().all(|c| c.ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    fn body(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for c in &self.claims {
            let mark = if c.ok { "" } else { "FAIL " };
            out.push_str(&format!("{}: {}{} [{}]\n", c.name, mark, c.value, c.status));
        }
        out.push_str(&format!("result: {}\n", if self.pass() { "PASS" } else { "FAIL" }));
        out
    }

    pub fn render_text(&self) -> String {
        let body = self.body();
        let digest = Sha256::digest(body.as_bytes());
        format!("{body}digest: sha256:{digest:x}\n")
    }

    /// Same content as the text form; the digest still covers the text
    /// rendering, so the two forms vouch for each other.
    pub fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            command: &'a str,
            claims: &'a [Claim],
            result: &'a str,
            digest: String,
        }
        let digest = Sha256::digest(self.body().as_bytes());
        let out = Out {
            command: &self.command,
            claims: &self.claims,
            result: if self.pass() { "PASS" } else { "FAIL" },
            digest: format!("sha256:{digest:x}"),
        };
        let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
        text.push('\n');
        text
    }
}
