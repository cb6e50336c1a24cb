fn main() {
    std::process::exit(welfare::cli::run(std::env::args_os()));
}
