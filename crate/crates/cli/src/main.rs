fn main() {
    std::process::exit(viewhedge_cli::run(std::env::args_os()));
}
