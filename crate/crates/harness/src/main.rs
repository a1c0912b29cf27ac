fn main() -> anyhow::Result<()> {
    nmgo::cli::main()
}
