fn main() {
    std::process::exit(waringlab::cli::main_with_std());
}
