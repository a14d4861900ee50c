fn main() {
    std::process::exit(submatrix_cli::dispatch(std::env::args_os()));
}
