fn main() {
    std::process::exit(camloc::cli::run());
}
