fn main() {
    std::process::exit(genw::cli::main());
}
