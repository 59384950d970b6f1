"""
Batch front-end: python -m cli --config exp.json [--seed N] [--out path] [--workers n]
"""

VERSION = "0.1.0"
