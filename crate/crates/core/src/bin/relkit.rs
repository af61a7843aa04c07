fn main() {
    std::process::exit(relkit::cli::run(std::env::args_os()));
}
