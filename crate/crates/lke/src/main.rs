fn main() {
    std::process::exit(lke::run_cli(std::env::args_os()));
}
