fn main() {
    std::process::exit(oscillift::cli::main_with_args(std::env::args_os()));
}
