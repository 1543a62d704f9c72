fn main() {
    std::process::exit(mimetic::cli::main_with_args(std::env::args_os()));
}
