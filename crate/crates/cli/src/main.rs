fn main() {
    std::process::exit(stablear_cli::run(std::env::args_os()));
}
