fn main() {
    std::process::exit(gaugekit::cli::run());
}
