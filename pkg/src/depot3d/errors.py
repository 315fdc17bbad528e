"""Shared exception base for all repository components."""

from __future__ import annotations


class RepositoryError(Exception):
    """Error with a stable machine-readable code.

    The ``code`` is part of the API surface (CLI output, HTTP error bodies);
    the message is free text for humans.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
