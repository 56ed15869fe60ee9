fn main() {
    std::process::exit(knotforge::cli::main_entry());
}
