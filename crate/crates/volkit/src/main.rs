fn main() { std::process::exit(volkit::cli::run(std::env::args_os())) }
