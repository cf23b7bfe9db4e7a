fn main() {
    std::process::exit(capflow::cli::main_with_args(std::env::args_os()));
}
