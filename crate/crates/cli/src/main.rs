fn main() {
    std::process::exit(seedcheck_cli::cli::run(std::env::args_os()));
}
