fn main() {
    std::process::exit(cachevid::cli::main_with(std::env::args_os()));
}
