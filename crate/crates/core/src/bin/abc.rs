fn main() {
    std::process::exit(abc_torus::cli::run_args(std::env::args_os()));
}
