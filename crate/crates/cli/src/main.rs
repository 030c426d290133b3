use clap::Parser;

fn main() {
    let cli = mls_cli::Cli::parse();
    let code = mls_cli::execute(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
