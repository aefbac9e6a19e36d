//! Command-line front end: experiment runner, convergence studies,
//! moving-vs-fixed comparisons, and the acceptance self test.

use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches, Command};

use lgmm_cli::commands::{self, CliError};
use lgmm_cli::config::{self, ConfigError, ExperimentConfig};

fn experiment_args(cmd: Command) -> Command {
    cmd.arg(
        Arg::new("preset")
            .long("preset")
            .value_name("NAME")
            .help("experiment preset: example1, example2, custom"),
    )
    .arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("file of `key = value` lines, applied before --set overrides"),
    )
    .arg(
        Arg::new("set")
            .long("set")
            .value_name("KEY=VALUE")
            .action(ArgAction::Append)
            .help("override one configuration key (repeatable)"),
    )
    .arg(
        Arg::new("output")
            .long("output")
            .value_name("DIR")
            .help("output directory (overrides the configured one)"),
    )
}

fn cli() -> Command {
    Command::new("lgmm")
        .about(
            "Mass-conserving characteristics solver for 1D convection-diffusion \
             problems on moving meshes",
        )
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(experiment_args(
            Command::new("run").about("Run one experiment and write CSV output"),
        ))
        .subcommand(
            experiment_args(
                Command::new("convergence").about("Run a dyadic refinement study"),
            )
            .arg(
                Arg::new("levels")
                    .long("levels")
                    .value_name("N1,N2,...")
                    .default_value("128,256,512,1024")
                    .help("comma-separated element counts, each double the previous"),
            ),
        )
        .subcommand(experiment_args(Command::new("compare").about(
            "Run the moving-mesh and fixed-mesh variants and compare their final states",
        )))
        .subcommand(experiment_args(
            Command::new("print-config").about("Print the resolved configuration and exit"),
        ))
        .subcommand(
            Command::new("selftest")
                .about("Run the acceptance checks and print one line per criterion")
                .arg(
                    Arg::new("seed")
                        .long("seed")
                        .value_name("U64")
                        .default_value("20260817")
                        .help("seed for the randomized checks"),
                )
                .arg(
                    Arg::new("only")
                        .long("only")
                        .value_name("INDEX")
                        .action(ArgAction::Append)
                        .help("run only this criterion (repeatable)"),
                ),
        )
}

fn config_from(matches: &ArgMatches) -> Result<ExperimentConfig, CliError> {
    let preset = matches.get_one::<String>("preset").map(|s| s.as_str());
    let file = matches.get_one::<String>("config").map(Path::new);
    let sets: Vec<String> = matches
        .get_many::<String>("set")
        .map(|v| v.cloned().collect())
        .unwrap_or_default();
    let mut cfg = config::resolve(preset, file, &sets)?;
    if let Some(dir) = matches.get_one::<String>("output") {
        cfg.output_dir = PathBuf::from(dir);
    }
    Ok(cfg)
}

fn parse_levels(arg: &str) -> Result<Vec<usize>, CliError> {
    arg.split(',')
        .map(|tok| {
            tok.trim().parse::<usize>().map_err(|_| {
                ConfigError::new(format!("invalid element count '{}' in --levels", tok.trim()))
                    .into()
            })
        })
        .collect()
}

fn selftest_from(matches: &ArgMatches) -> Result<(), CliError> {
    let seed: u64 = matches
        .get_one::<String>("seed")
        .expect("--seed has a default")
        .parse()
        .map_err(|_| ConfigError::new("--seed must be an unsigned integer"))?;
    let only: Vec<usize> = matches
        .get_many::<String>("only")
        .map(|v| {
            v.map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| ConfigError::new(format!("invalid criterion index '{tok}'")))
            })
            .collect::<Result<Vec<usize>, ConfigError>>()
        })
        .transpose()?
        .unwrap_or_default();
    commands::cmd_selftest(seed, &only)
}

fn run() -> i32 {
    let matches = cli().get_matches();
    let result = match matches.subcommand() {
        Some(("run", m)) => config_from(m).and_then(|cfg| commands::cmd_run(&cfg)),
        Some(("convergence", m)) => config_from(m).and_then(|cfg| {
            let levels = parse_levels(m.get_one::<String>("levels").expect("has a default"))?;
            commands::cmd_convergence(&cfg, &levels)
        }),
        Some(("compare", m)) => config_from(m).and_then(|cfg| commands::cmd_compare(&cfg)),
        Some(("print-config", m)) => config_from(m).and_then(|cfg| commands::cmd_print_config(&cfg)),
        Some(("selftest", m)) => selftest_from(m),
        _ => unreachable!("a subcommand is required"),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run());
}
