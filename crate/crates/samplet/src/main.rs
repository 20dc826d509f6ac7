fn main() {
    std::process::exit(samplet::cli::run(std::env::args_os()));
}
