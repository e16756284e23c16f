use clap::Parser;
use torusops_cli::{execute, Cli};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let manifest = execute(cli)?;
    println!("{}", serde_json::to_string_pretty(&manifest["summary"])?);
    Ok(())
}
