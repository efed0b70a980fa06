fn main() {
    std::process::exit(jacobi_lab::run(std::env::args_os()));
}
