#!/usr/bin/env python3
"""
TMA Capacity command-line entry point.

    python main.py capacity scenarios/jeju_rwy07.json scenarios/jeju_rwy25.json
    python main.py sweep scenarios/jeju_rwy07.json --format csv --out sweep07.csv

See `python main.py --help` for every subcommand.
"""

import sys
from pathlib import Path

from dotenv import load_dotenv


load_dotenv()

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.runner import main


if __name__ == "__main__":
    main()
