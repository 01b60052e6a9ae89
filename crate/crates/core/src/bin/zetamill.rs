fn main() {
    std::process::exit(zetamill::cli::run(std::env::args_os()));
}
