fn main() {
    std::process::exit(fbm_local::cli::run(std::env::args_os()));
}
