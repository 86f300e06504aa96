fn main() {
    std::process::exit(hyperentm::cli::run(std::env::args_os()));
}
