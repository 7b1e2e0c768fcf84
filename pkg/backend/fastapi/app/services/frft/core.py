"""Discrete fractional Fourier operators and separable 2D transforms.

The discrete operator for an angle alpha is built from the eigenvectors of the
nearly tridiagonal matrix S that commutes with the unitary DFT:

    S = circulant(0, 1, 0, ..., 0, 1) + diag(2 cos(2 pi n / N))

S is split into its even and odd parts with the orthogonal involution P, each
part is diagonalised separately, and eigenvectors are ordered by descending
eigenvalue inside each part. Even vectors take the Hermite orders 0, 2, 4, ...
and odd vectors 1, 3, 5, ...; for even N the order N-1 is skipped and N used
instead, matching the multiplicities of the DFT eigenvalues. The operator is

    U(alpha) = E diag(exp(-i k alpha)) E^T

which is unitary, exactly additive in alpha and reduces to the DFT at pi/2.
"""
from __future__ import annotations
import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import eigh

from ...errors import DimensionMismatchError, InvalidDataError, InvalidDimensionError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SPECIAL_ANGLE_TOL = 1e-12
ANGLE_QUANTUM = 1e-12
BACKEND = "eig-commuting-s:even-odd"

ComplexImage = NDArray[np.complex128]


# -------- angles --------

class AngleClass(str, enum.Enum):
    IDENTITY = "identity"
    REVERSAL = "reversal"
    GENERIC = "generic"


def classify(radians: float) -> AngleClass:
    r = radians % TWO_PI
    if min(r, TWO_PI - r) < SPECIAL_ANGLE_TOL:
        return AngleClass.IDENTITY
    if abs(r - math.pi) < SPECIAL_ANGLE_TOL:
        return AngleClass.REVERSAL
    return AngleClass.GENERIC


@dataclass(frozen=True)
class Angle:
    radians: float
    kind: AngleClass = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.radians):
            raise InvalidDataError(f"angle must be finite, got {self.radians!r}")
        object.__setattr__(self, "radians", float(self.radians))
        object.__setattr__(self, "kind", classify(self.radians))

    @classmethod
    def from_degrees(cls, degrees: float) -> "Angle":
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)

    @property
    def is_generic(self) -> bool:
        return self.kind is AngleClass.GENERIC

    def __neg__(self) -> "Angle":
        return Angle(-self.radians)

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.radians + other.radians)


def as_angle(value: "Angle | float") -> Angle:
    return value if isinstance(value, Angle) else Angle(float(value))


def _quantize(radians: float) -> int:
    # remainder() is odd-symmetric, so -alpha quantizes to exactly -key(alpha)
    return int(round(math.remainder(radians, TWO_PI) / ANGLE_QUANTUM))


# -------- images --------

def ensure_complex_image(image: ArrayLike) -> ComplexImage:
    data = np.asarray(image)
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
        raise InvalidDimensionError(f"expected a non-empty 2D array, got shape {data.shape}")
    if not np.issubdtype(data.dtype, np.number):
        raise InvalidDataError(f"expected numeric samples, got dtype {data.dtype}")
    data = data.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(data)):
        raise InvalidDataError("image contains NaN or Inf samples")
    return data


# -------- plans --------

@dataclass(frozen=True)
class FrftPlan:
    size: int
    angle: Angle
    operator: NDArray[np.complex128] = field(repr=False)
    provenance: str = BACKEND

    def apply(self, signal: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return self.operator @ signal


def _commuting_matrix(size: int) -> NDArray[np.float64]:
    n = np.arange(size)
    s = np.zeros((size, size))
    # np.add.at so that N=2 (where both neighbours coincide) gets weight 2
    np.add.at(s, (n, (n + 1) % size), 1.0)
    np.add.at(s, (n, (n - 1) % size), 1.0)
    s[n, n] += 2.0 * np.cos(TWO_PI * n / size)
    return s


def _parity_split(size: int) -> NDArray[np.float64]:
    r = size // 2
    even = size % 2 == 0
    h = 1.0 / math.sqrt(2.0)
    p = np.zeros((size, size))
    p[0, 0] = 1.0
    for i in range(1, r - even + 1):
        p[i, i] = h
        p[i, size - i] = h
    if even:
        p[r, r] = 1.0
    for i in range(r + 1, size):
        p[i, i] = -h
        p[i, size - i] = h
    return p


def _fix_signs(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-10)
        if nz.size and col[nz[0]] < 0:
            vectors[:, j] = -col
    return vectors


@lru_cache(maxsize=32)
def hermite_basis(size: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Orthonormal DFT eigenvectors (columns) and their Hermite orders."""
    s = _commuting_matrix(size)
    p = _parity_split(size)
    cs = p @ s @ p.T
    r = size // 2
    n_even = r + 1
    ev_even, vec_even = eigh(cs[:n_even, :n_even])
    ev_odd, vec_odd = eigh(cs[n_even:, n_even:]) if size - n_even else (np.zeros(0), np.zeros((0, 0)))

    # eigh sorts ascending; Hermite order follows descending eigenvalue
    vec_even = vec_even[:, ::-1]
    vec_odd = vec_odd[:, ::-1]
    even_vecs = p.T @ np.vstack([vec_even, np.zeros((size - n_even, n_even))])
    odd_vecs = p.T @ np.vstack([np.zeros((n_even, size - n_even)), vec_odd])

    # even N: even orders run 0..N and odd orders stop at N-3, so N-1 is skipped
    orders = np.concatenate([np.arange(0, 2 * n_even, 2), np.arange(1, 2 * (size - n_even), 2)]).astype(np.float64)
    basis = _fix_signs(np.hstack([even_vecs, odd_vecs]))
    perm = np.argsort(orders, kind="stable")
    basis, orders = basis[:, perm], orders[perm]
    basis.flags.writeable = False
    orders.flags.writeable = False
    logger.debug("built hermite basis for N=%d", size)
    return basis, orders


def parity_indices(size: int) -> NDArray[np.intp]:
    return (-np.arange(size)) % size


@lru_cache(maxsize=128)
def _cached_plan(size: int, key: int) -> FrftPlan:
    radians = key * ANGLE_QUANTUM
    angle = Angle(radians)
    if angle.kind is AngleClass.IDENTITY:
        op = np.eye(size, dtype=np.complex128)
    elif angle.kind is AngleClass.REVERSAL:
        op = np.zeros((size, size), dtype=np.complex128)
        op[np.arange(size), parity_indices(size)] = 1.0
    else:
        basis, orders = hermite_basis(size)
        phases = np.exp(-1j * orders * radians)
        op = (basis * phases) @ basis.T
    op.flags.writeable = False
    logger.debug("built plan N=%d angle=%.12g rad class=%s", size, radians, angle.kind.value)
    return FrftPlan(size=size, angle=angle, operator=op)


def build_plan(size: int, angle: "Angle | float") -> FrftPlan:
    """Return the (cached, immutable) discrete FRFT operator of order `angle`."""
    if int(size) != size or size < 2:
        raise InvalidDimensionError(f"plan size must be an integer >= 2, got {size!r}")
    return _cached_plan(int(size), _quantize(as_angle(angle).radians))


# -------- transforms --------

def frft1d(signal: ArrayLike, plan: FrftPlan) -> NDArray[np.complex128]:
    x = np.asarray(signal, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] != plan.size:
        raise DimensionMismatchError(f"signal shape {x.shape} does not match plan size {plan.size}")
    return plan.apply(x)


def _along_rows(data: ComplexImage, plan: FrftPlan) -> ComplexImage:
    """Transform every column (first axis)."""
    if plan.angle.kind is AngleClass.IDENTITY:
        return data.copy()
    if plan.angle.kind is AngleClass.REVERSAL:
        return data[parity_indices(plan.size), :]
    return plan.operator @ data


def _along_cols(data: ComplexImage, plan: FrftPlan) -> ComplexImage:
    """Transform every row (second axis)."""
    return _along_rows(data.T, plan).T


def frft2d(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float") -> ComplexImage:
    data = ensure_complex_image(image)
    rows, cols = data.shape
    out = _along_rows(data, build_plan(rows, alpha))
    return np.ascontiguousarray(_along_cols(out, build_plan(cols, beta)))


def ifrft2d(image: ArrayLike, alpha: "Angle | float", beta: "Angle | float") -> ComplexImage:
    return frft2d(image, -as_angle(alpha), -as_angle(beta))
