"""Main entrypoint for the project."""

import logging

import typer

from tordeg.src.pipeline import load_config, run_pipeline

GOLDEN_CONFIG = "fixture:pipeline_cubic.json"


def main() -> None:
    """Run the bundled cubic curve pipeline and print its summary."""
    # Configure logging
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    report = run_pipeline(load_config(GOLDEN_CONFIG))
    summary = report.output_dir / "summary.txt"
    typer.echo(summary.read_text(encoding="utf-8"), nl=False)


if __name__ == "__main__":
    main()
