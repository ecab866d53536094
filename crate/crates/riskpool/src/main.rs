fn main() {
    std::process::exit(riskpool::cli::main());
}
