fn main() {
    std::process::exit(ptbubble::cli::run(std::env::args_os()));
}
