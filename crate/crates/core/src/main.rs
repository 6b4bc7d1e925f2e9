fn main() {
    std::process::exit(pulseforge::cli::run(std::env::args().collect()));
}
