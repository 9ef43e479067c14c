fn main() {
    std::process::exit(invasion_core::cli::main_with(std::env::args_os()));
}
