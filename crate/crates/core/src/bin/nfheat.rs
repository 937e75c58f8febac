fn main() {
    std::process::exit(nfheat::cli::main_with(std::env::args_os()));
}
