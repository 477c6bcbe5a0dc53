fn main() {
    std::process::exit(grec::cli::main_with_args(std::env::args_os()));
}
