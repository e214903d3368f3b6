fn main() {
    std::process::exit(chronofrac::cli::run(std::env::args_os()));
}
