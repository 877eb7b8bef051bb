fn main() {
    std::process::exit(kqd::cli::run());
}
