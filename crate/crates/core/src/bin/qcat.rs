fn main() {
    std::process::exit(qcat::cli::main_with(std::env::args_os()));
}
