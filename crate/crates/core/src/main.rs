fn main() {
    std::process::exit(concentration::cli::run(std::env::args_os()));
}
