"""Sparse integer matrices and Matrix Market coordinate I/O."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, TextIO

from gctop.errors import InvalidArgumentError


@dataclass(frozen=True)
class SparseIntMatrix:
    nrows: int
    ncols: int
    entries: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.nrows < 0 or self.ncols < 0:
            raise InvalidArgumentError("matrix dimensions must be non-negative")
        seen = set()
        for r, c, v in self.entries:
            if not (0 <= r < self.nrows and 0 <= c < self.ncols):
                raise InvalidArgumentError(f"entry ({r}, {c}) out of range")
            if v == 0:
                raise InvalidArgumentError(f"explicit zero at ({r}, {c})")
            if (r, c) in seen:
                raise InvalidArgumentError(f"duplicate entry at ({r}, {c})")
            seen.add((r, c))

    @classmethod
    def from_triples(cls, nrows: int, ncols: int, triples: Iterable[tuple[int, int, int]]) -> "SparseIntMatrix":
        """Sum duplicate coordinates, drop zeros, sort by (row, col)."""
        acc: dict[tuple[int, int], int] = {}
        for r, c, v in triples:
            acc[r, c] = acc.get((r, c), 0) + int(v)
        return cls(nrows, ncols, tuple((r, c, v) for (r, c), v in sorted(acc.items()) if v))

    @classmethod
    def from_dense(cls, rows: list[list[int]], ncols: int | None = None) -> "SparseIntMatrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls.from_triples(
            len(rows), ncols, ((r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row))
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix.from_triples(self.ncols, self.nrows, ((c, r, v) for r, c, v in self.entries))

    def rows(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [dict() for _ in range(self.nrows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.ncols != other.nrows:
            raise InvalidArgumentError(f"shape mismatch {self.shape} @ {other.shape}")
        right = other.rows()
        triples = []
        for r, k, v in self.entries:
            for c, w in right[k].items():
                triples.append((r, c, v * w))
        return SparseIntMatrix.from_triples(self.nrows, other.ncols, triples)

    def is_zero(self) -> bool:
        return not self.entries


def write_matrix_market(m: SparseIntMatrix, fh: TextIO) -> None:
    fh.write("%%MatrixMarket matrix coordinate integer general\n")
    fh.write(f"{m.nrows} {m.ncols} {m.nnz}\n")
    for r, c, v in m.entries:
        fh.write(f"{r + 1} {c + 1} {v}\n")


def read_matrix_market(fh: TextIO) -> SparseIntMatrix:
    header = fh.readline()
    parts = header.split()
    if len(parts) < 5 or parts[0] != "%%MatrixMarket" or parts[1].lower() != "matrix":
        raise InvalidArgumentError(f"not a Matrix Market header: {header!r}")
    if parts[2].lower() != "coordinate" or parts[3].lower() != "integer":
        raise InvalidArgumentError("only coordinate integer matrices are supported")
    symmetry = parts[4].lower()
    if symmetry not in ("general", "symmetric", "skew-symmetric"):
        raise InvalidArgumentError(f"unsupported symmetry {symmetry!r}")
    line = fh.readline()
    while line.startswith("%") or not line.strip():
        line = fh.readline()
        if not line:
            raise InvalidArgumentError("missing size line")
    nrows, ncols, nnz = (int(x) for x in line.split())
    triples = []
    seen = 0
    for line in fh:
        if not line.strip() or line.startswith("%"):
            continue
        seen += 1
        r, c, v = line.split()
        r, c, v = int(r) - 1, int(c) - 1, int(v)
        triples.append((r, c, v))
        if r != c and symmetry == "symmetric":
            triples.append((c, r, v))
        elif r != c and symmetry == "skew-symmetric":
            triples.append((c, r, -v))
    if seen != nnz:
        raise InvalidArgumentError(f"expected {nnz} entries, found {seen}")
    return SparseIntMatrix.from_triples(nrows, ncols, triples)


def dumps_matrix_market(m: SparseIntMatrix) -> str:
    buf = io.StringIO()
    write_matrix_market(m, buf)
    return buf.getvalue()


def loads_matrix_market(text: str) -> SparseIntMatrix:
    return read_matrix_market(io.StringIO(text))
