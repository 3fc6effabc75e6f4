//! Command-line front end for pinchlab.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on usage errors.

pub mod commands;
pub mod config;

pub use config::{parse_args, RunConfig, Subcommand, UsageError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parse `argv` (without the program name), run, and return the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let cfg = match parse_args(argv) {
        Ok(cfg) => cfg,
        Err(e) if e.informational => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("{}", e.message.trim_end());
            return EXIT_USAGE;
        }
    };
    match commands::execute(&cfg, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}
