fn main() {
    std::process::exit(snippetnet::cli::main());
}
