use clap::Parser;

fn main() {
    let cli = qsteer_cli::Cli::parse();
    let code = qsteer_cli::execute(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
