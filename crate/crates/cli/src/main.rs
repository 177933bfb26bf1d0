fn main() {
    std::process::exit(hfa_cli::main_with_args(std::env::args_os().collect()));
}
