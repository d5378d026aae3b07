fn main() {
    std::process::exit(aram::cli::main_with(std::env::args_os()));
}
