"""
BO-ZK solitary-wave laboratory
Batch entry point: python main.py --config run.json [--force] [--jobs N] [--out DIR]
"""

import sys

from bozk.cli import main


if __name__ == "__main__":
    sys.exit(main())
