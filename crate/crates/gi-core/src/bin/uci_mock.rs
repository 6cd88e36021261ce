//! Deterministic mock UCI engine for protocol tests.
//!
//! Reads a script file: one reply block per `go` command, blocks separated
//! by blank lines, lines emitted verbatim. Optional directives:
//!
//! * `#reject-option NAME` — chatter `info string unknown option NAME`
//!   when that option is set;
//! * `#no-uciok` — swallow the `uci` handshake (timeout testing);
//! * `#log FILE` — append each received `position`/`go` command to FILE.
//!
//! Usage: `uci-mock <script>`.

use std::fs::OpenOptions;
use std::io::{self, BufRead, Write};

struct Script {
    go_blocks: Vec<Vec<String>>,
    reject_options: Vec<String>,
    no_uciok: bool,
    log_path: Option<String>,
}

fn parse_script(text: &str) -> Script {
    let mut script = Script {
        go_blocks: Vec::new(),
        reject_options: Vec::new(),
        no_uciok: false,
        log_path: None,
    };
    let mut current: Vec<String> = Vec::new();
    for line in text.lines() {
        if let Some(name) = line.strip_prefix("#reject-option ") {
            script.reject_options.push(name.trim().to_string());
        } else if line.trim() == "#no-uciok" {
            script.no_uciok = true;
        } else if let Some(path) = line.strip_prefix("#log ") {
            script.log_path = Some(path.trim().to_string());
        } else if line.trim().is_empty() {
            if !current.is_empty() {
                script.go_blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line.to_string());
        }
    }
    if !current.is_empty() {
        script.go_blocks.push(current);
    }
    script
}

fn main() {
    let path = std::env::args().nth(1).expect("usage: uci-mock <script>");
    let text = std::fs::read_to_string(&path).expect("script file");
    let script = parse_script(&text);

    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut go_index = 0usize;

    let log = |line: &str| {
        if let Some(p) = &script.log_path {
            if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(p) {
                let _ = writeln!(f, "{line}");
            }
        }
    };

    for line in stdin.lock().lines() {
        let line = match line {
            Ok(l) => l,
            Err(_) => break,
        };
        let cmd = line.trim();
        if cmd == "uci" {
            if script.no_uciok {
                continue;
            }
            writeln!(out, "id name uci-mock").unwrap();
            writeln!(out, "id author fixture").unwrap();
            writeln!(out, "uciok").unwrap();
            out.flush().unwrap();
        } else if cmd == "isready" {
            writeln!(out, "readyok").unwrap();
            out.flush().unwrap();
        } else if let Some(rest) = cmd.strip_prefix("setoption name ") {
            let name = rest.split(" value").next().unwrap_or(rest).trim();
            if script.reject_options.iter().any(|r| r == name) {
                writeln!(out, "info string unknown option {name}").unwrap();
                out.flush().unwrap();
            }
        } else if cmd.starts_with("position") {
            log(cmd);
        } else if cmd.starts_with("go") {
            log(cmd);
            if let Some(block) = script.go_blocks.get(go_index) {
                for reply in block {
                    writeln!(out, "{reply}").unwrap();
                }
                out.flush().unwrap();
            }
            go_index += 1;
        } else if cmd == "quit" {
            break;
        }
    }
}
