fn main() {
    std::process::exit(bxshadow::cli::run(std::env::args_os()));
}
