fn main() {
    std::process::exit(juntalab::cli::dispatch(std::env::args_os()));
}
