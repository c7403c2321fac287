use std::io;

fn main() {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let code = ftmeta::cli::run(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut io::stderr(),
    );
    std::process::exit(code);
}
