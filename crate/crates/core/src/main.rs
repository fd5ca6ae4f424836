fn main() {
    std::process::exit(quasisep::cli::main_with_args(std::env::args_os()));
}
