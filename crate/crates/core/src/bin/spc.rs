fn main() {
    std::process::exit(photon_coupler::cli::main_with_args(std::env::args_os()));
}
