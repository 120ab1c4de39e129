use std::io::{self, BufRead, Write};

use nlui_core::{parse_expr, CommandResult, Session};

pub const USAGE: &str = "\
commands:
  <sentence>       run a command, or a query ending in `?`
  :state           list every fact
  :lexicon         list the lexicon
  :trace on|off    show reduction traces
  :term <expr>     run a calculus term directly
  :help            show this message
  :quit            leave";

#[derive(Clone, Copy, Debug, Default)]
pub struct ReplOptions {
    pub trace: bool,
    /// Print a prompt before each line.
    pub prompt: bool,
}

/// The lines printed for one result.
pub fn render(result: &CommandResult, trace: bool) -> Vec<String> {
    let mut lines = Vec::new();
    if trace {
        if let Some(term) = &result.term {
            lines.push(format!("term: {term}"));
        }
        if let Some(t) = &result.trace {
            lines.extend(t.lines());
        }
    }
    lines.push(result.summary());
    lines
}

enum Meta<'a> {
    State,
    Lexicon,
    Trace(bool),
    Term(&'a str),
    Help,
    Quit,
}

fn parse_meta(line: &str) -> Result<Meta<'_>, String> {
    let (name, rest) = match line.split_once(char::is_whitespace) {
        Some((n, r)) => (n, r.trim()),
        None => (line, ""),
    };
    match (name, rest) {
        (":state", "") => Ok(Meta::State),
        (":lexicon", "") => Ok(Meta::Lexicon),
        (":trace", "on") => Ok(Meta::Trace(true)),
        (":trace", "off") => Ok(Meta::Trace(false)),
        (":term", e) if !e.is_empty() => Ok(Meta::Term(e)),
        (":help", "") => Ok(Meta::Help),
        (":quit", "") => Ok(Meta::Quit),
        _ => Err(format!("bad command `{line}`")),
    }
}

/// Reads lines until `:quit` or end of input. Returns the exit code.
pub fn repl(session: &mut Session, input: impl BufRead, mut out: impl Write, options: ReplOptions) -> io::Result<i32> {
    let mut trace = options.trace;
    let mut lines = input.lines();
    loop {
        if options.prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !line.starts_with(':') {
            let result = session.run_command(line);
            for l in render(&result, trace) {
                writeln!(out, "{l}")?;
            }
            continue;
        }
        match parse_meta(line) {
            Ok(Meta::Quit) => return Ok(0),
            Ok(Meta::State) => match session.state_view() {
                Ok(facts) => {
                    for f in facts {
                        writeln!(out, "{f}")?;
                    }
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            Ok(Meta::Lexicon) => write!(out, "{}", session.lexicon().to_text())?,
            Ok(Meta::Trace(on)) => {
                trace = on;
                writeln!(out, "trace {}", if on { "on" } else { "off" })?;
            }
            Ok(Meta::Term(src)) => match parse_expr(src, session.descriptor()) {
                Ok(e) => {
                    let result = session.run_term(e);
                    for l in render(&result, trace) {
                        writeln!(out, "{l}")?;
                    }
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            Ok(Meta::Help) => writeln!(out, "{USAGE}")?,
            Err(msg) => writeln!(out, "{msg}\n{USAGE}")?,
        }
    }
    Ok(0)
}
