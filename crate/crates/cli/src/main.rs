fn main() {
    std::process::exit(gkw_cli::main_with_args(std::env::args_os()));
}
