fn main() {
    std::process::exit(zml_core::cli::main_with_args(std::env::args_os()));
}
