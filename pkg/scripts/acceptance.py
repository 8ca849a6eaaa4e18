#!/usr/bin/env python3
"""Run the acceptance suite and print one pass/fail line per criterion."""
import subprocess
import sys
from pathlib import Path

TESTS = Path(__file__).resolve().parent.parent / "tests"

if __name__ == "__main__":
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", "-q", str(TESTS / "test_acceptance.py")]))
