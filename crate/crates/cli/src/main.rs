fn main() {
    std::process::exit(rxnmine_cli::main_with(std::env::args_os()));
}
