fn main() {
    std::process::exit(cineparse::cli::run(std::env::args_os()));
}
