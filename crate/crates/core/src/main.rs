fn main() {
    std::process::exit(nlcs::cli::main_from_env());
}
