fn main() {
    env_logger::init();
    std::process::exit(cyclohom_cli::main_with(std::env::args_os()));
}
