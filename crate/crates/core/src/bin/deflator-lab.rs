fn main() {
    std::process::exit(deflator_lab::cli::run(std::env::args_os()));
}
