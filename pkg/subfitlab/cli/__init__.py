"""Command line package."""
