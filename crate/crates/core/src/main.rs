fn main() {
    std::process::exit(nhadm::cli::run());
}
