fn main() {
    std::process::exit(bpqm::cli::run(std::env::args_os()));
}
