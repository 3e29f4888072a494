use std::io::Write;

fn main() {
    let outcome = bvfix_cli::run(std::env::args_os(), std::env::var(bvfix_cli::SEED_ENV).ok());
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
