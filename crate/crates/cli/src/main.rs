fn main() {
    std::process::exit(qroute_cli::run(std::env::args_os()));
}
