"""Errors shared across the structured-document loaders."""

from __future__ import annotations


class FormatError(Exception):
    """A structured configuration document is malformed.

    `path` locates the problem inside the document (JSON-pointer style).
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
