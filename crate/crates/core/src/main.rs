fn main() {
    std::process::exit(sparse_irls::cli::run_from(std::env::args_os()));
}
