// SPDX-License-Identifier: Apache-2.0

//! One interactive solver process fed over standard input.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::{SolverConfig, SolverStatus};
use crate::{Error, Result};

pub(crate) struct Session {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    /// Everything sent so far.
    pub(crate) script: String,
}

impl Session {
    pub(crate) fn start(config: &SolverConfig) -> Result<Session> {
        let mut child = Command::new(&config.program)
            .args(config.effective_args())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| Error::SolverMissing {
                path: config.program.clone(),
                source,
            })?;
        let stdout = child.stdout.take().expect("piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Session {
            stdin: child.stdin.take(),
            child,
            lines: rx,
            script: String::new(),
        })
    }

    pub(crate) fn send(&mut self, text: &str) -> Result<()> {
        self.script.push_str(text);
        let stdin = self.stdin.as_mut().expect("open until drop");
        stdin
            .write_all(text.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::Protocol(format!("solver stopped reading input: {e}")))
    }

    /// Next non-empty line, `None` when the deadline passes.
    fn next_line(&mut self, deadline: Instant) -> Result<Option<String>> {
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) if line.trim().is_empty() => continue,
                Ok(line) => return Ok(Some(line)),
                Err(RecvTimeoutError::Timeout) => return Ok(None),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(Error::Protocol("solver exited without answering".into()))
                }
            }
        }
    }

    pub(crate) fn check_sat(&mut self, timeout: Duration) -> Result<SolverStatus> {
        self.send("(check-sat)\n")?;
        let deadline = Instant::now() + timeout;
        let Some(line) = self.next_line(deadline)? else {
            return Ok(SolverStatus::Timeout);
        };
        match line.trim() {
            "sat" => Ok(SolverStatus::Sat),
            "unsat" => Ok(SolverStatus::Unsat),
            "unknown" => Ok(SolverStatus::Unknown),
            "timeout" => Ok(SolverStatus::Timeout),
            other => Err(Error::Protocol(format!("unexpected answer to check-sat: {other}"))),
        }
    }

    pub(crate) fn get_model(&mut self, timeout: Duration) -> Result<String> {
        self.send("(get-model)\n")?;
        let deadline = Instant::now() + timeout;
        let mut text = String::new();
        let mut depth: i64 = 0;
        let mut opened = false;
        while !(opened && depth == 0) {
            let line = self
                .next_line(deadline)?
                .ok_or_else(|| Error::Protocol("timed out reading the model".into()))?;
            if !opened && line.trim_start().starts_with("(error") {
                return Err(Error::Protocol(line));
            }
            for c in line.chars() {
                match c {
                    '(' => {
                        depth += 1;
                        opened = true;
                    }
                    ')' => depth -= 1,
                    _ => {}
                }
            }
            text.push_str(&line);
            text.push('\n');
        }
        Ok(text)
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if let Some(mut stdin) = self.stdin.take() {
            let _ = stdin.write_all(b"(exit)\n");
        }
        // exit politely when idle, otherwise kill
        let deadline = Instant::now() + Duration::from_millis(200);
        loop {
            match self.child.try_wait() {
                Ok(Some(_)) => return,
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(2)),
                _ => break,
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
