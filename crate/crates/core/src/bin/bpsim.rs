fn main() {
    std::process::exit(backup_placement::cli::run_cli(std::env::args_os()));
}
