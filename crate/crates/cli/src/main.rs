fn main() {
    std::process::exit(roommates_cli::commands::main_with_args(std::env::args_os()));
}
