fn main() {
    std::process::exit(kerrsim::cli::run(std::env::args_os()));
}
