"""Command-line surface."""

from .runner import EXIT_INPUT, EXIT_OK, EXIT_SOLVER, EXIT_VALIDATION, build_parser, main, run

__all__ = ['EXIT_INPUT', 'EXIT_OK', 'EXIT_SOLVER', 'EXIT_VALIDATION', 'build_parser', 'main', 'run']
