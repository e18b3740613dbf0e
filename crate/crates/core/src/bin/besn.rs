fn main() -> std::process::ExitCode {
    besn::cli::main()
}
