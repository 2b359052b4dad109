//! Process interface to an external CHC solver.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverVerdict {
    /// `sat`, with whatever the solver printed after it (the model).
    Solved(String),
    /// `unsat`, with the rest of the output.
    Refuted(String),
    Unknown,
    Timeout,
    ToolError(String),
}

impl SolverVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SolverVerdict::Solved(_) => "sat",
            SolverVerdict::Refuted(_) => "unsat",
            SolverVerdict::Unknown => "unknown",
            SolverVerdict::Timeout => "timeout",
            SolverVerdict::ToolError(_) => "tool-error",
        }
    }
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

const POLL: Duration = Duration::from_millis(5);

/// Write `script` to a temporary file, run `command <file>` and classify the
/// first token of its stdout.
pub fn solve_external(script: &str, command: &str, timeout: Duration) -> SolverVerdict {
    let mut file = match tempfile::Builder::new().prefix("ctlhorn-").suffix(".smt2").tempfile() {
        Ok(f) => f,
        Err(e) => return SolverVerdict::ToolError(format!("temp file: {e}")),
    };
    if let Err(e) = file.write_all(script.as_bytes()).and_then(|_| file.flush()) {
        return SolverVerdict::ToolError(format!("temp file: {e}"));
    }
    let mut child = match Command::new(command)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return SolverVerdict::ToolError(format!("spawn failed: {e}")),
    };
    let drain = |mut r: Box<dyn Read + Send>| {
        thread::spawn(move || {
            let mut s = String::new();
            let _ = r.read_to_string(&mut s);
            s
        })
    };
    let out = drain(Box::new(child.stdout.take().unwrap()));
    let err = drain(Box::new(child.stderr.take().unwrap()));
    let start = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(st)) => break st,
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return SolverVerdict::Timeout;
            }
            Ok(None) => thread::sleep(POLL),
            Err(e) => return SolverVerdict::ToolError(format!("wait failed: {e}")),
        }
    };
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    classify(&stdout, &stderr, status.code())
}

fn classify(stdout: &str, stderr: &str, code: Option<i32>) -> SolverVerdict {
    let trimmed = stdout.trim_start();
    let (first, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
    match first {
        "sat" => SolverVerdict::Solved(rest.trim().to_string()),
        "unsat" => SolverVerdict::Refuted(rest.trim().to_string()),
        "unknown" => SolverVerdict::Unknown,
        _ => {
            let detail = stderr.lines().chain(stdout.lines()).find(|l| !l.trim().is_empty());
            SolverVerdict::ToolError(format!(
                "unparseable reply (exit {}): {}",
                code.map_or("signal".to_string(), |c| c.to_string()),
                detail.unwrap_or("<no output>")
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_token_decides() {
        assert_eq!(classify("sat\n(model)\n", "", Some(0)), SolverVerdict::Solved("(model)".into()));
        assert!(matches!(classify("unsat\n(error \"no model\")", "", Some(1)), SolverVerdict::Refuted(_)));
        assert_eq!(classify("unknown\n", "", Some(0)), SolverVerdict::Unknown);
        assert!(matches!(classify("saturday", "", Some(0)), SolverVerdict::ToolError(_)));
        assert!(matches!(classify("", "boom", Some(2)), SolverVerdict::ToolError(m) if m.contains("boom")));
    }

    #[test]
    fn missing_executable() {
        let v = solve_external("(check-sat)", "/nonexistent/solver-binary", DEFAULT_TIMEOUT);
        assert!(matches!(v, SolverVerdict::ToolError(m) if m.starts_with("spawn failed")));
    }

    #[cfg(unix)]
    #[test]
    fn timeout_kills_the_process() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("slow.sh");
        std::fs::write(&path, "#!/bin/sh\nsleep 5\necho sat\n").unwrap();
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        let start = Instant::now();
        let v = solve_external("", path.to_str().unwrap(), Duration::from_millis(200));
        assert_eq!(v, SolverVerdict::Timeout);
        assert!(start.elapsed() < Duration::from_secs(4));
    }
}
