fn main() {
    std::process::exit(dsosc::cli::run(std::env::args_os()));
}
