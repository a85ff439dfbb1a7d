fn main() {
    std::process::exit(lobachevsky::cli::run(std::env::args_os()));
}
