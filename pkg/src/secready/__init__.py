"""secready: ISO 27001 readiness assessment toolkit.

Six-domain assessment taxonomy, recursive 0-4 aggregation with priority gaps,
per-user session tracking with an append-only event log, reports, an HTTP
API and a CLI.
"""

__version__ = "0.1.0"
