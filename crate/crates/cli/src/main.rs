fn main() {
    let code = pinchlab_cli::run(std::env::args().skip(1), &mut std::io::stdout().lock());
    std::process::exit(code);
}
