//! A mechanism backed by an external command.
//!
//! Each request spawns the command once, writes one `ProfileFile` JSON line
//! to its stdin, closes stdin, and reads one allocation JSON line from its
//! stdout. Anything else is a protocol error.

use std::io::Write;
use std::process::{Command, Stdio};

use cakecut::{Allocation, Error, Mechanism, PiecewiseConstant, ProfileFile, Result};

#[derive(Clone, Debug)]
pub struct External {
    program: String,
    args: Vec<String>,
}

impl External {
    /// `command` is split on whitespace into a program and its arguments.
    pub fn parse(command: &str) -> Option<Self> {
        let mut words = command.split_whitespace().map(str::to_string);
        let program = words.next()?;
        Some(External {
            program,
            args: words.collect(),
        })
    }

    fn request(&self, line: &str) -> std::result::Result<String, String> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| format!("cannot start {}: {e}", self.program))?;
        {
            let mut stdin = child.stdin.take().expect("piped stdin");
            // a command that exits without reading is judged by its output
            let _ = stdin
                .write_all(line.as_bytes())
                .and_then(|_| stdin.write_all(b"\n"));
        }
        let output = child.wait_with_output().map_err(|e| e.to_string())?;
        if !output.status.success() {
            return Err(format!("{} exited with {}", self.program, output.status));
        }
        let stdout =
            String::from_utf8(output.stdout).map_err(|_| "output is not UTF-8".to_string())?;
        stdout
            .lines()
            .find(|l| !l.trim().is_empty())
            .map(str::to_string)
            .ok_or_else(|| format!("{} printed no allocation", self.program))
    }
}

impl Mechanism for External {
    fn allocate(&self, profile: &[PiecewiseConstant]) -> Result<Allocation> {
        let request = serde_json::to_string(&ProfileFile::new(profile.to_vec()))
            .expect("profiles always serialize");
        let reply = self.request(&request).map_err(Error::Mechanism)?;
        let allocation: Allocation = serde_json::from_str(&reply)
            .map_err(|e| Error::Mechanism(format!("bad allocation from {}: {e}", self.program)))?;
        if allocation.agents() != profile.len() {
            return Err(Error::Mechanism(format!(
                "{} returned {} shares for {} agents",
                self.program,
                allocation.agents(),
                profile.len()
            )));
        }
        Ok(allocation)
    }
}
