fn main() {
    std::process::exit(privlim::cli::main_with_args(std::env::args_os()));
}
