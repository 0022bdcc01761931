#!/usr/bin/env python3
"""Main entry point for the importance engine."""

from src.cli import cli

if __name__ == "__main__":
    cli()
