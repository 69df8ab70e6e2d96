fn main() {
    std::process::exit(kgbench::cli::run(std::env::args_os()));
}
