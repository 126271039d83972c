fn main() -> std::process::ExitCode {
    dephaser_cli::run()
}
