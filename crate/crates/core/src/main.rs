fn main() {
    std::process::exit(dmcompat::cli::run(std::env::args_os()));
}
