"""Closed-form evaluators: free Lie algebra dimensions, growth, Euler characteristics."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from gctop.errors import InvalidArgumentError, PreconditionError

# Real root of t**3 - t - 1.
BETA = 1.324717957244746

MIN_GROWTH_GENUS = 30


@dataclass(frozen=True)
class GradedDims:
    """Dimension of the genus-g piece of FreeLie(s3, s5, s7, ...), for g = 1..max_genus."""

    dims: dict[int, int]
    max_genus: int

    def __getitem__(self, genus: int) -> int:
        return self.dims[genus]

    def rows(self) -> list[dict[str, int]]:
        return [{"genus": g, "dim": self.dims[g]} for g in range(1, self.max_genus + 1)]


def mobius(n: int) -> int:
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    return -result if n > 1 else result


def _generator_series(max_genus: int) -> list[int]:
    """Coefficients of f(t) = t^3 + t^5 + t^7 + ..."""
    return [1 if k >= 3 and k % 2 == 1 else 0 for k in range(max_genus + 1)]


def witt_dims(max_genus: int) -> GradedDims:
    """Graded dimensions by Moebius inversion of -log(1 - f(t)).

    With c_N = N * [t^N](-log(1 - f)) = [t^N] t f'(t) / (1 - f(t)), an integer
    series, the dimension is (1/N) * sum_{d | N} mu(N/d) c_d.
    """
    if max_genus < 3:
        raise PreconditionError("max_genus must be at least 3")
    f = _generator_series(max_genus)
    inv = [0] * (max_genus + 1)  # 1 / (1 - f)
    inv[0] = 1
    for m in range(1, max_genus + 1):
        inv[m] = sum(f[j] * inv[m - j] for j in range(1, m + 1) if f[j])
    tfp = [k * f[k] for k in range(max_genus + 1)]
    c = [sum(tfp[j] * inv[m - j] for j in range(m + 1) if tfp[j]) for m in range(max_genus + 1)]
    dims = {}
    for n in range(1, max_genus + 1):
        total = sum(mobius(n // d) * c[d] for d in range(1, n + 1) if n % d == 0)
        q, r = divmod(total, n)
        if r:
            raise ArithmeticError(f"non-integral dimension at genus {n}")
        dims[n] = q
    return GradedDims(dims, max_genus)


@dataclass(frozen=True)
class GrowthEstimate:
    genus: int
    root: float  # dim ** (1 / genus) at the top genus
    normalized_root: float  # (genus * dim) ** (1 / genus); removes the 1/genus factor
    roots: list[float]
    ratios: list[float]  # dim[g] / dim[g - 1] where both are nonzero

    def to_json_dict(self) -> dict:
        return {
            "genus": self.genus,
            "root": self.root,
            "normalized_root": self.normalized_root,
            "beta": BETA,
            "roots": self.roots,
            "ratios": self.ratios,
        }


def growth_ratio(dims: GradedDims) -> GrowthEstimate:
    """g-th roots and consecutive ratios of the graded dimensions."""
    top = dims.max_genus
    if top < MIN_GROWTH_GENUS:
        raise PreconditionError(f"need dimensions up to genus {MIN_GROWTH_GENUS}, have {top}")
    if dims[top] <= 0:
        raise PreconditionError(f"dimension at genus {top} is zero; no growth to estimate")
    roots = [dims[g] ** (1 / g) if dims[g] > 0 else 0.0 for g in range(1, top + 1)]
    ratios = [dims[g] / dims[g - 1] for g in range(2, top + 1) if dims[g] and dims[g - 1]]
    return GrowthEstimate(
        genus=top,
        root=dims[top] ** (1 / top),
        normalized_root=(top * dims[top]) ** (1 / top),
        roots=roots,
        ratios=ratios,
    )


_BERNOULLI: list[Fraction] = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli(m: int) -> Fraction:
    """B_m from sum_{j=0}^{m} C(m+1, j) B_j = 0 (so B_1 = -1/2)."""
    if m < 0:
        raise InvalidArgumentError("Bernoulli index must be non-negative")
    with _BERNOULLI_LOCK:
        while len(_BERNOULLI) <= m:
            k = len(_BERNOULLI)
            total = sum(math.comb(k + 1, j) * _BERNOULLI[j] for j in range(k))
            _BERNOULLI.append(-total / (k + 1))
        return _BERNOULLI[m]


def zeta_negative_odd(g: int) -> Fraction:
    """zeta(1 - 2g) = -B_{2g} / (2g)."""
    return -bernoulli(2 * g) / (2 * g)


def chi_orb_mod_g1(g: int) -> Fraction:
    """Orbifold Euler characteristic of the mapping class group of genus g with one puncture."""
    if g < 1:
        raise PreconditionError("genus must be at least 1")
    return zeta_negative_odd(g)


def cv2_local_system_dim(a: int, b: int, k: int) -> int:
    """Dimension of compactly supported degree-k cohomology of CV_2 with coefficients V_{a,b}."""
    if a < b or b < 0:
        raise InvalidArgumentError(f"need a >= b >= 0, got a={a}, b={b}")
    if k != 3 or (a - b) % 2:
        return 0
    if a % 2:
        return (a - b) // 6 + 1
    return (a - b) // 6


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
