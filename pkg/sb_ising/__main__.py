"""Aufruf als ``python -m sb_ising``."""
from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
