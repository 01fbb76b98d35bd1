"""Module entry point so ``python -m docharvest`` matches the CLI."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
