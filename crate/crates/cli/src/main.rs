use clap::Parser;

fn main() -> anyhow::Result<()> {
    gridbelief_cli::run(gridbelief_cli::Cli::parse())
}
