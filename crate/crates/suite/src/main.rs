//! The dephaser command line, rebuilt here so the acceptance gate can spawn it.

fn main() -> std::process::ExitCode {
    dephaser_cli::run()
}
