fn main() {
    std::process::exit(drac::cli::run(std::env::args_os()));
}
