use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Everything needed to rerun a command: the exact argument list, the knobs that
/// steer it and digests of what it read.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// The argument list as given, secrets redacted.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub arithmetic: Option<String>,
    pub threads: usize,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

impl InputDigest {
    pub fn of(path: &Path, data: &[u8]) -> Self {
        Self {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(data)),
            bytes: data.len() as u64,
        }
    }
}

const SECRET_FLAGS: [&str; 1] = ["--key-hex"];

pub fn redact(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut hide_next = false;
    for arg in args {
        if hide_next {
            out.push("<redacted>".to_string());
            hide_next = false;
            continue;
        }
        match SECRET_FLAGS.iter().find(|f| arg.starts_with(*f)) {
            Some(f) if arg.len() > f.len() && arg.as_bytes()[f.len()] == b'=' => {
                out.push(format!("{f}=<redacted>"));
            }
            Some(f) if arg == *f => {
                out.push(arg);
                hide_next = true;
            }
            _ => out.push(arg),
        }
    }
    out
}

/// Run-time facts collected while a command executes.
#[derive(Debug, Default)]
pub struct Recorder {
    pub seed: Option<u64>,
    pub arithmetic: Option<String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn finish(
        self,
        command: &str,
        args: Vec<String>,
        threads: usize,
        wall: Duration,
    ) -> RunManifest {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            args,
            seed: self.seed,
            arithmetic: self.arithmetic,
            threads,
            inputs: self.inputs,
            outputs: self.outputs,
            wall_time_seconds: wall.as_secs_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_is_redacted() {
        let args = ["anslab", "keyed", "derive", "--key-hex", "00ff", "--R", "4"].map(String::from);
        let out = redact(args);
        assert_eq!(out[4], "<redacted>");
        assert_eq!(out[5], "--R");
        let out = redact(["--key-hex=00ff".to_string()]);
        assert_eq!(out, vec!["--key-hex=<redacted>"]);
    }

    #[test]
    fn digest_is_sha256() {
        let d = InputDigest::of(Path::new("x"), b"abc");
        assert_eq!(
            d.sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
