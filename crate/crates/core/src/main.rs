fn main() {
    std::process::exit(freejacobi::cli::main_with_args(std::env::args_os()));
}
