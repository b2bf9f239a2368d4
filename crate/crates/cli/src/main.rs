fn main() {
    std::process::exit(purify_cli::main_with_args(std::env::args_os()));
}
