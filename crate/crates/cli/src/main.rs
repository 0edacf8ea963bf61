fn main() {
    std::process::exit(diversify_cli::cli_dispatch(std::env::args_os()));
}
