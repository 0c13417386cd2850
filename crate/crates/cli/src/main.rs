fn main() {
    std::process::exit(spaceforms_cli::main_with_args(std::env::args_os()));
}
