"""
Lexicographic labels of dual-tree branches
File: src/twoscale/dual/labels.py

A label (u1, ..., un) stands for the infinite sequence (u1, ..., un, inf, ...).
Labels compare lexicographically on that infinite form, so the root () is the
largest label and a proper prefix beats all of its extensions.
"""
import functools
from dataclasses import dataclass
from typing import Tuple


@functools.total_ordering
@dataclass(frozen=True)
class Label:
    """Finite prefix of a branch label"""

    entries: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        entries = tuple(int(u) for u in self.entries)
        if any(u < 1 for u in entries):
            raise ValueError(f"label entries must be >= 1, got {entries}")
        object.__setattr__(self, "entries", entries)

    @property
    def key(self) -> Tuple[float, ...]:
        return tuple(float(u) for u in self.entries) + (float("inf"),)

    def __lt__(self, other: "Label") -> bool:
        if not isinstance(other, Label):
            return NotImplemented
        return self.key < other.key

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def is_root(self) -> bool:
        return not self.entries

    def child(self, m: int) -> "Label":
        """Label of the m-th child branch (in backward order)"""
        return Label(self.entries + (m,))

    def parent(self) -> "Label":
        if self.is_root:
            raise ValueError("the root label has no parent")
        return Label(self.entries[:-1])

    def is_prefix_of(self, other: "Label") -> bool:
        n = len(self.entries)
        return other.entries[:n] == self.entries

    def common_prefix(self, other: "Label") -> "Label":
        out = []
        for a, b in zip(self.entries, other.entries):
            if a != b:
                break
            out.append(a)
        return Label(tuple(out))

    def __str__(self) -> str:
        return ".".join(str(u) for u in self.entries) if self.entries else "-"

    @classmethod
    def parse(cls, text: str) -> "Label":
        text = text.strip()
        if text in ("", "-"):
            return cls()
        return cls(tuple(int(u) for u in text.split(".")))


ROOT = Label()
