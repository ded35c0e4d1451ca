fn main() {
    std::process::exit(optscale::cli::run(std::env::args_os()));
}
