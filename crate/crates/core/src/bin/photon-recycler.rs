fn main() {
    std::process::exit(photon_recycler::cli::run_from_args(std::env::args_os()));
}
