use std::io::{self, IsTerminal};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nlui_cli::repl::{repl, ReplOptions};
use nlui_cli::{load_session, parse_sentence, service, AppSource};

#[derive(Parser)]
#[command(name = "nlui", version, about = "Natural-language commands for action-based applications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive loop over standard input.
    Repl {
        #[command(flatten)]
        app: AppArgs,
        /// Print the parsed term and reduction trace of each command.
        #[arg(long)]
        trace: bool,
    },
    /// HTTP service for the web UI.
    Serve {
        #[command(flatten)]
        app: AppArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Print the term a sentence parses to, without running it.
    Parse {
        sentence: String,
        #[command(flatten)]
        app: AppArgs,
        /// Goal category; by default `a`, falling back to `s`.
        #[arg(long, value_enum)]
        goal: Option<Goal>,
        /// Also print the witness derivation.
        #[arg(long)]
        derivation: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Goal {
    A,
    S,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinApp {
    Toyblocks,
}

#[derive(Args)]
struct AppArgs {
    /// Built-in application.
    #[arg(long, value_enum, conflicts_with_all = ["model", "lexicon"])]
    app: Option<BuiltinApp>,
    /// Model application file.
    #[arg(long, requires = "lexicon")]
    model: Option<PathBuf>,
    /// Lexicon file for the model.
    #[arg(long, requires = "model")]
    lexicon: Option<PathBuf>,
}

impl AppArgs {
    fn source(&self) -> AppSource {
        match (&self.app, &self.model, &self.lexicon) {
            (None, Some(model), Some(lexicon)) => AppSource::Files { model: model.clone(), lexicon: lexicon.clone() },
            _ => AppSource::ToyBlocks,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Repl { app, trace } => {
            let mut session = load_session(&app.source())?;
            let stdin = io::stdin();
            let options = ReplOptions { trace, prompt: stdin.is_terminal() };
            let code = repl(&mut session, stdin.lock(), io::stdout().lock(), options)?;
            Ok(ExitCode::from(code as u8))
        }
        Command::Serve { app, port, host } => {
            let session = load_session(&app.source())?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(session, SocketAddr::new(host, port)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Parse { sentence, app, goal, derivation } => {
            let session = load_session(&app.source())?;
            let goal = goal.map(|g| match g {
                Goal::A => "a",
                Goal::S => "s",
            });
            match parse_sentence(session.lexicon(), &sentence, goal)? {
                Ok(parsed) => {
                    println!("{}", parsed.term);
                    if derivation {
                        print!("{}", parsed.derivation);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", e.variant());
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
