fn main() {
    std::process::exit(lamtree::cli::run(std::env::args_os()));
}
