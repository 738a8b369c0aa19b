fn main() {
    std::process::exit(polyiso::cli::run());
}
