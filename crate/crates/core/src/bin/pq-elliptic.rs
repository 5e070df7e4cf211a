fn main() {
    std::process::exit(pq_elliptic::cli::run_command(std::env::args_os()));
}
