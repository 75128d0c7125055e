fn main() {
    std::process::exit(hardy_forge::cli::main_with_args(std::env::args_os()));
}
