use clap::Parser;

fn main() {
    let cli = matfield_bench::Cli::parse();
    if let Err(err) = matfield_bench::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
