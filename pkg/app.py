#!/usr/bin/env python3
"""Entry script: `python app.py assemble --delta 1/4 --K 2 -o out.json`."""

import sys

from recforge.cli import main

if __name__ == "__main__":
    sys.exit(main())
