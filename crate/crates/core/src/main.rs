fn main() {
    std::process::exit(cyclestab::cli::main_exit());
}
