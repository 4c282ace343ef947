"""Exact sparse linear algebra over the integers and prime fields."""

from gctop.linalg.kernels import BACKEND
from gctop.linalg.rank import (
    CHECK_PRIME,
    EXACT,
    MODULAR_AGREED,
    PRIMARY_PRIME,
    RankConfig,
    certified_rank,
    rank_exact,
    rank_mod_p,
)
from gctop.linalg.sparse import (
    SparseIntMatrix,
    dumps_matrix_market,
    loads_matrix_market,
    read_matrix_market,
    write_matrix_market,
)

__all__ = [
    "BACKEND",
    "CHECK_PRIME",
    "EXACT",
    "MODULAR_AGREED",
    "PRIMARY_PRIME",
    "RankConfig",
    "SparseIntMatrix",
    "certified_rank",
    "dumps_matrix_market",
    "loads_matrix_market",
    "rank_exact",
    "rank_mod_p",
    "read_matrix_market",
    "write_matrix_market",
]
