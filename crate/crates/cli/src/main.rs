mod args;
mod commands;
mod manifest;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::{Done, Failure, Outcome, EXIT_OTHER};
use manifest::Recorder;

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze(_) => "analyze",
        Command::Tune(_) => "tune",
        Command::Optimize(_) => "optimize",
        Command::Enumerate(_) => "enumerate",
        Command::Encode(_) => "encode",
        Command::Decode(_) => "decode",
        Command::Keyed(args::KeyedCommand::Derive { .. }) => "keyed derive",
        Command::Keyed(args::KeyedCommand::Encode { .. }) => "keyed encode",
        Command::Keyed(args::KeyedCommand::Decode { .. }) => "keyed decode",
        Command::Bench(_) => "bench",
    }
}

fn run(cli: &Cli, rec: &mut Recorder) -> Outcome<Done> {
    let parallel = rayon::current_num_threads() > 1;
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a, rec),
        Command::Tune(a) => commands::tune(a, rec),
        Command::Optimize(a) => commands::optimize(a, rec),
        Command::Enumerate(a) => commands::enumerate(a, rec, parallel),
        Command::Encode(a) => commands::encode_file(a, rec),
        Command::Decode(a) => commands::decode_file(a, rec),
        Command::Keyed(c) => commands::keyed(c, rec),
        Command::Bench(a) => commands::bench(a, rec, parallel),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_OTHER as u8);
        }
    }
    let start = Instant::now();
    let mut rec = Recorder::default();
    let result = run(&cli, &mut rec);
    let manifest_path = cli.manifest.clone().or_else(|| match &result {
        Ok(Done {
            primary: Some(p), ..
        }) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".manifest.json");
            Some(s.into())
        }
        _ => None,
    });
    match result {
        Ok(done) => {
            print!("{}", done.stdout);
            if let Some(path) = manifest_path {
                let m = rec.finish(
                    command_name(&cli.command),
                    manifest::redact(argv),
                    rayon::current_num_threads(),
                    start.elapsed(),
                );
                let text = serde_json::to_string_pretty(&m).expect("plain JSON values") + "\n";
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(EXIT_OTHER as u8);
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
