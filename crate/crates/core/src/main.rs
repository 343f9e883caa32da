fn main() {
    std::process::exit(quadroots::cli::main_from_args(std::env::args_os()));
}
