mod args;
mod commands;
mod config;
mod validate;

use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, ValueEnum};

use args::{Cli, Command};
use config::Config;
use rnms::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn on_command_line(matches: &ArgMatches, id: &str) -> bool {
    matches.value_source(id) == Some(ValueSource::CommandLine)
}

macro_rules! merge {
    ($args:expr, $section:expr, $matches:expr; $($field:ident),* $(,)?) => {
        $(
            if !on_command_line($matches, stringify!($field)) {
                if let Some(v) = $section.$field.clone() {
                    $args.$field = v.into();
                }
            }
        )*
    };
}

fn merge_enum<T: ValueEnum>(target: &mut T, value: &Option<String>, matches: &ArgMatches, id: &str) -> Result<(), Error> {
    if on_command_line(matches, id) {
        return Ok(());
    }
    if let Some(v) = value {
        *target = T::from_str(v, true).map_err(|e| Error::Parse(format!("config {id}: {e}")))?;
    }
    Ok(())
}

fn merge_seed(seed: &mut u64, section: Option<u64>, top: Option<u64>, matches: &ArgMatches) {
    if !on_command_line(matches, "seed") {
        if let Some(s) = section.or(top) {
            *seed = s;
        }
    }
}

fn apply_config(command: &mut Command, cfg: &Config, matches: &ArgMatches) -> Result<(), Error> {
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand present");
    match command {
        Command::Generate(a) => {
            let s = cfg.generate.clone().unwrap_or_default();
            merge!(a, s, sub; m, n, letters, probs);
            merge_seed(&mut a.seed, s.seed, cfg.seed, sub);
            merge_enum(&mut a.format, &s.format, sub, "format")?;
        }
        Command::Entropy(a) => {
            let s = cfg.entropy.clone().unwrap_or_default();
            merge!(a, s, sub; m, n_max, tol);
            merge_enum(&mut a.method, &s.method, sub, "method")?;
        }
        Command::Complexity(a) => {
            let s = cfg.complexity.clone().unwrap_or_default();
            merge!(a, s, sub; m, ell_min, ell_max);
            merge_enum(&mut a.method, &s.method, sub, "method")?;
        }
        Command::Frequencies(a) => {
            let s = cfg.frequencies.clone().unwrap_or_default();
            merge!(a, s, sub; m, ell, empirical, probs);
            merge_seed(&mut a.seed, s.seed, cfg.seed, sub);
        }
        Command::Diffract(a) => {
            let s = cfg.diffract.clone().unwrap_or_default();
            merge!(a, s, sub; m, n, kmax, grid, star_cutoff, samples, misprint_mode, probs, analytic_n);
            merge_seed(&mut a.seed, s.seed, cfg.seed, sub);
            merge_enum(&mut a.format, &s.format, sub, "format")?;
        }
        Command::Validate(_) => {}
    }
    Ok(())
}

fn run(matches: &ArgMatches) -> Result<u8, Error> {
    let cli = Cli::from_arg_matches(matches).map_err(|e| Error::Parse(e.to_string()))?;
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if cli.dump_config {
        print!("{}", cfg.dump());
        return Ok(0);
    }
    let Some(mut command) = cli.command else {
        return Err(Error::Parameter("no subcommand given; see --help".into()));
    };
    apply_config(&mut command, &cfg, matches)?;
    match command {
        Command::Generate(a) => commands::generate(&a),
        Command::Entropy(a) => commands::entropy(&a),
        Command::Complexity(a) => commands::complexity(&a),
        Command::Frequencies(a) => commands::frequencies(&a),
        Command::Diffract(a) => commands::diffract(&a),
        Command::Validate(a) => Ok(validate::run(&a)),
    }
}

fn main() -> ExitCode {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
