fn main() {
    std::process::exit(qlidar_cli::run(std::env::args_os()));
}
