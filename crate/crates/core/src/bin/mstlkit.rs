fn main() {
    std::process::exit(mstlkit::cli::run(std::env::args_os()));
}
