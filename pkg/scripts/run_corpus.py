#!/usr/bin/env python3
"""Run the built-in example corpus and print a per-case report.

Usage: python scripts/run_corpus.py [--path cases.json] [--timings]
"""

import sys

from latspi.cli import main

if __name__ == "__main__":
    sys.exit(main(["corpus", *sys.argv[1:]]))
