fn main() {
    std::process::exit(dfcrystal::cli::run(std::env::args_os()));
}
