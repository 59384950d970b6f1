"""
Shared plumbing: exceptions, validation, estimates, random streams and CSV export.
"""

__all__ = [
    "csv_export",
    "estimates",
    "exceptions",
    "streams",
    "validators",
]
