fn main() {
    std::process::exit(finsent::cli::main());
}
