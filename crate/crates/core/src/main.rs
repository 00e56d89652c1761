fn main() {
    std::process::exit(mubforge::cli::run(std::env::args_os()));
}
