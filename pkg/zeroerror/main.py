#!/usr/bin/env python3
"""
Main entry point for the zero-error graph entropy toolkit
"""

import sys


def main():
    """Run one CLI subcommand and exit with its status"""
    try:
        from zeroerror.cli import run

        sys.exit(run(sys.argv[1:]))

    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        sys.exit(130)
    except ImportError as e:
        print(f"Import error: {e}", file=sys.stderr)
        print("Please install required dependencies:", file=sys.stderr)
        print("  pip install -r requirements.txt", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
