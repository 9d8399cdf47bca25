fn main() {
    std::process::exit(conefix::cli::execute(std::env::args_os()));
}
