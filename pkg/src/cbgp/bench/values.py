"""Runtime value classes used by the benchmark problems.

``DateTime`` and ``TimeDelta`` values are plain :mod:`datetime` objects.
Paths are purely textual so evaluation never touches the filesystem.
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass


@dataclass(frozen=True)
class PathValue:
    text: str

    def __post_init__(self):
        object.__setattr__(self, "text", posixpath.normpath(self.text or "."))

    def to_str(self) -> str:
        return self.text

    def abspath(self) -> "PathValue":
        # the working directory is taken to be the root
        return PathValue(posixpath.join("/", self.text))

    def split(self) -> list:
        head, tail = posixpath.split(self.text)
        return [head, tail]

    def basename(self) -> str:
        return posixpath.basename(self.text)

    def dirname(self) -> "PathValue":
        return PathValue(posixpath.dirname(self.text))

    def isabs(self) -> bool:
        return posixpath.isabs(self.text)

    def join(self, other: "PathValue") -> "PathValue":
        return PathValue(posixpath.join(self.text, other.text))

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"Path({self.text!r})"
