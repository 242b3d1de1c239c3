fn main() {
    std::process::exit(rfeig_cli::run(std::env::args_os()));
}
