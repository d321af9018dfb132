"""Built-in corpus of isolated hypersurface singularities (ADE plus a 4-quadric)."""

from __future__ import annotations

from dataclasses import dataclass

from .polyring import Poly

__all__ = ["CorpusEntry", "CORPUS", "get_entry", "three_variable_entries"]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    n: int
    phi_text: str
    weights: tuple[int, ...]
    expected_milnor: int

    @property
    def phi(self) -> Poly:
        return Poly.parse(self.phi_text, self.n)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "phi": self.phi_text,
            "weights": list(self.weights),
            "expected_milnor": self.expected_milnor,
        }


# Weights make each phi quasi-homogeneous.
CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry("A1", 3, "x1^2 + x2^2 + x3^2", (1, 1, 1), 1),
    CorpusEntry("A2", 3, "x1^3 + x2^2 + x3^2", (2, 3, 3), 2),
    CorpusEntry("A3", 3, "x1^4 + x2^2 + x3^2", (1, 2, 2), 3),
    CorpusEntry("A4", 3, "x1^5 + x2^2 + x3^2", (2, 5, 5), 4),
    CorpusEntry("D4", 3, "x1*x2^2 + x1^3 + x3^2", (2, 2, 3), 4),
    CorpusEntry("D5", 3, "x1*x2^2 + x1^4 + x3^2", (2, 3, 4), 5),
    CorpusEntry("E6", 3, "x1^3 + x2^4 + x3^2", (4, 3, 6), 6),
    CorpusEntry("E7", 3, "x1^3 + x1*x2^3 + x3^2", (6, 4, 9), 7),
    CorpusEntry("E8", 3, "x1^3 + x2^5 + x3^2", (10, 6, 15), 8),
    CorpusEntry("quadric4", 4, "x1^2 + x2^2 + x3^2 + x4^2", (1, 1, 1, 1), 1),
)


def get_entry(name: str) -> CorpusEntry:
    for e in CORPUS:
        if e.name.lower() == name.lower():
            return e
    raise KeyError(f"unknown corpus entry {name!r}")


def three_variable_entries() -> list[CorpusEntry]:
    return [e for e in CORPUS if e.n == 3]
