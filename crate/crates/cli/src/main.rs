fn main() {
    std::process::exit(satrans_cli::main_with_std());
}
