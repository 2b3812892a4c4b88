fn main() -> std::process::ExitCode {
    twista::cli::main()
}
