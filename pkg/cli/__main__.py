"""Run the NormalTV CLI: python -m cli <command> [options]."""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
