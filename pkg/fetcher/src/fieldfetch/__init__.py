"""Field-database client: fetch invariants, emit validated field files."""

from .client import FetchError, FetchJob, fetch_field

__all__ = ["FetchError", "FetchJob", "fetch_field"]
