fn main() {
    std::process::exit(wmono::cli::run(std::env::args_os()));
}
