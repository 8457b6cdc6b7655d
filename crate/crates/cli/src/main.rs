fn main() {
    std::process::exit(eulerint_cli::run(std::env::args().collect()));
}
