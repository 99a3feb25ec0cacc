fn main() {
    std::process::exit(fermat_dde_cli::main_with_args(std::env::args_os()));
}
