fn main() {
    std::process::exit(kinematic_dw::cli::run(std::env::args_os()));
}
