fn main() {
    std::process::exit(sqrtop::cli::main_with_args(std::env::args_os()));
}
