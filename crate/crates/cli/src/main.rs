fn main() {
    std::process::exit(ergopet::cli::main_with_args(std::env::args_os()));
}
