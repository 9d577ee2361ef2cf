fn main() {
    std::process::exit(igusa_zeta::cli::main_entry());
}
