fn main() {
    std::process::exit(protes::cli::main_with_args(std::env::args_os()));
}
