fn main() {
    std::process::exit(qis_cli::run(std::env::args_os()));
}
