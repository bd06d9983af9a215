fn main() {
    std::process::exit(pairgan_lab::cli::run(std::env::args_os()));
}
