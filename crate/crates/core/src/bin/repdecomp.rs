fn main() {
    std::process::exit(repdecomp::cli::main());
}
