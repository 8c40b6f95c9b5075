fn main() {
    std::process::exit(newsseg_cli::run(std::env::args_os()));
}
