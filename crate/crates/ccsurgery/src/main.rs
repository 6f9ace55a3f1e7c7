fn main() {
    std::process::exit(ccsurgery::cli::run(std::env::args_os()));
}
