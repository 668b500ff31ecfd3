fn main() {
    std::process::exit(unitary_qsl::cli::main_with_args(std::env::args_os()));
}
