fn main() {
    std::process::exit(sepdet::run_cli(std::env::args_os()));
}
