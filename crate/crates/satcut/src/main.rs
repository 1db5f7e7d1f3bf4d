fn main() { std::process::exit(satcut::cli::main(std::env::args_os())) }
