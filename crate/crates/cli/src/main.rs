fn main() {
    std::process::exit(matorbit::run(std::env::args_os()));
}
