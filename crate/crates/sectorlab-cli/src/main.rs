fn main() {
    std::process::exit(sectorlab_cli::run(std::env::args_os()));
}
