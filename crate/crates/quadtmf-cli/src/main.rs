use std::io::Write;

fn main() {
    let outcome = quadtmf_cli::run(std::env::args().skip(1));
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    let _ = out.write_all(outcome.stdout.as_bytes());
    let _ = err.write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
