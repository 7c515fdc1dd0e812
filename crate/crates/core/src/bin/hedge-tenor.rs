fn main() -> std::process::ExitCode {
    hedge_tenor::cli::main()
}
