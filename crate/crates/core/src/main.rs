fn main() {
    std::process::exit(autotune::cli::run(std::env::args_os()));
}
