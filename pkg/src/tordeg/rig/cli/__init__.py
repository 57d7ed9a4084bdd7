"""Command line subcommands discovered by pyrig."""
