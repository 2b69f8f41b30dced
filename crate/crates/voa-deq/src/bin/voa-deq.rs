fn main() {
    std::process::exit(voa_deq::cli::run());
}
