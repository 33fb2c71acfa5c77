"""Finite-dimensional bosonic operator and state algebra.

Dense numpy arrays throughout.  Composite spaces are ordered
(transmon (x) magnon) with the transmon index slowest; a composite density
matrix of dims (dq, dm) therefore reshapes to (dq, dm, dq, dm).
"""

from __future__ import annotations

import math
import warnings
from collections import namedtuple
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = -1e-7

# Combined population of the top two Fock levels above which a state is
# flagged truncation suspect.
TRUNCATION_POPULATION = 1e-4


class TruncationWarning(UserWarning):
    """The requested state strains the Fock-space truncation."""


class InvariantViolationError(RuntimeError):
    """A density-matrix invariant (trace, Hermiticity, positivity) failed."""


@dataclass(frozen=True)
class SpaceDims:
    """Truncation levels of the composite (transmon, magnon) space."""

    dim_q: int = 3
    dim_m: int = 140

    def __post_init__(self):
        if self.dim_q < 2 or self.dim_m < 2:
            raise ValueError("both truncation dimensions must be >= 2")

    @property
    def total(self) -> int:
        return self.dim_q * self.dim_m

    def as_tuple(self) -> tuple[int, int]:
        return (self.dim_q, self.dim_m)


ModeOps = namedtuple("ModeOps", ["annihilate", "number", "identity", "parity"])


def mode_operators(dim: int) -> ModeOps:
    """Truncated single-mode operators (annihilate, number, identity, parity).

    annihilate carries sqrt(n) on the first superdiagonal; parity is
    diag((-1)^n).  The truncated commutator [a, a^dag] equals the identity
    except for the (dim-1, dim-1) entry, which is 1 - dim.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    n = np.arange(dim)
    a = np.diag(np.sqrt(n[1:].astype(float)), k=1).astype(complex)
    number = np.diag(n.astype(float)).astype(complex)
    identity = np.eye(dim, dtype=complex)
    parity = np.diag((-1.0) ** n).astype(complex)
    return ModeOps(a, number, identity, parity)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor slowest (qubit (x) magnon order)."""
    return np.kron(np.asarray(A), np.asarray(B))


def fock(n: int, dim: int) -> np.ndarray:
    """Number state |n> as a length-dim complex vector."""
    if not 0 <= n < dim:
        raise ValueError(f"n = {n} outside [0, {dim})")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def _check_truncation(alpha: complex, dim: int) -> None:
    if abs(alpha) ** 2 > dim / 4.0:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds dim/4 = {dim / 4:.3g}: "
            "truncated amplitudes are suspect",
            TruncationWarning,
            stacklevel=3,
        )


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Coherent state amplitudes alpha^n/sqrt(n!), renormalized after truncation."""
    _check_truncation(alpha, dim)
    v = np.empty(dim, dtype=complex)
    v[0] = 1.0
    for n in range(1, dim):
        v[n] = v[n - 1] * alpha / math.sqrt(n)
    v /= np.linalg.norm(v)
    return v


def cat_state(beta: complex, theta: float, parity_sign: int, dim: int) -> np.ndarray:
    """Normalized cat state (|0> + parity_sign e^{i theta} |beta>)/N.

    Uses the exact norm of the truncated superposition, so beta -> 0 with
    parity_sign = +1 smoothly gives |0>; the odd combination is a null state
    there and raises.
    """
    if parity_sign not in (+1, -1):
        raise ValueError("parity_sign must be +1 or -1")
    v = fock(0, dim) + parity_sign * np.exp(1j * theta) * coherent_state(beta, dim)
    norm = np.linalg.norm(v)
    if norm < 1e-8:
        raise ValueError("null cat state: the two components cancel")
    return v / norm


def thermal_density(n_th: float, dim: int) -> "DensityMatrix":
    """Thermal (Gibbs) state with mean occupation n_th, renormalized over the truncation."""
    if n_th < 0:
        raise ValueError("n_th must be nonnegative")
    if n_th == 0:
        p = np.zeros(dim)
        p[0] = 1.0
    else:
        if n_th > dim / 4.0:
            warnings.warn(
                f"n_th = {n_th:.3g} too close to the truncation dim = {dim}",
                TruncationWarning,
                stacklevel=2,
            )
        r = n_th / (1.0 + n_th)
        p = r ** np.arange(dim)
        p /= p.sum()
    return DensityMatrix(np.diag(p).astype(complex), (dim,))


@lru_cache(maxsize=None)
def _quadrature_eig(dim: int):
    # Hermitian generator K = i(m^dag - m); D(r) = exp(-i r K) for real r.
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    K = 1j * (a.T - a)
    lam, V = np.linalg.eigh(K)
    return lam, V


def displacement_op(alpha: complex, dim: int) -> np.ndarray:
    """Displacement unitary D(alpha) = exp(alpha m^dag - alpha* m).

    Built by unitary exponentiation of the Hermitian quadrature generator,
    combined with the exact phase-rotation identity
    D(r e^{i psi}) = e^{i psi n} D(r) e^{-i psi n}, so the result is unitary
    to machine precision at any truncation.
    """
    lam, V = _quadrature_eig(dim)
    r = abs(alpha)
    D = (V * np.exp(-1j * r * lam)) @ V.conj().T
    if r > 0:
        psi = np.angle(alpha)
        phase = np.exp(1j * psi * np.arange(dim))
        D = (phase[:, None] * D) * phase.conj()[None, :]
    return D


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one factor of a bipartite density matrix; keep in {0, 1}."""
    dq, dm = dims
    r4 = np.asarray(rho).reshape(dq, dm, dq, dm)
    if keep == 0:
        return np.einsum("ambm->ab", r4)
    if keep == 1:
        return np.einsum("aman->mn", r4)
    raise ValueError("keep must be 0 (first factor) or 1 (second factor)")


def partial_transpose(rho: np.ndarray, dims: tuple[int, int], subsystem: int = 1) -> np.ndarray:
    """Partial transpose over one factor; an involution preserving Hermiticity."""
    dq, dm = dims
    r4 = np.asarray(rho).reshape(dq, dm, dq, dm)
    if subsystem == 0:
        out = r4.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        out = r4.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return out.reshape(dq * dm, dq * dm)


def _normalize_dims(dims) -> tuple[int, ...]:
    if isinstance(dims, SpaceDims):
        return dims.as_tuple()
    if isinstance(dims, int):
        return (dims,)
    t = tuple(int(d) for d in dims)
    if not t or any(d < 1 for d in t):
        raise ValueError(f"bad dims {dims!r}")
    return t


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian unit-trace operator with explicit dimension metadata.

    ``dims`` is (dim,) for a single mode or (dim_q, dim_m) for the composite
    space.  Validation is explicit via :meth:`validate`; library code calls
    it at construction boundaries, not on every arithmetic step.
    """

    data: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, data, dims):
        dims = _normalize_dims(dims)
        data = np.asarray(data, dtype=complex)
        n = int(np.prod(dims))
        if data.shape != (n, n):
            raise ValueError(f"matrix shape {data.shape} does not match dims {dims}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_state(cls, psi: np.ndarray, dims) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), dims)

    @property
    def is_composite(self) -> bool:
        return len(self.dims) == 2

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def validate(
        self,
        trace_tol: float = TRACE_TOL,
        herm_tol: float = HERMITICITY_TOL,
        eig_tol: float = POSITIVITY_TOL,
        check_positivity: bool = True,
    ) -> "DensityMatrix":
        err = abs(self.trace() - 1.0)
        if err > trace_tol:
            raise InvariantViolationError(f"trace deviates from 1 by {err:.3g}")
        herm = float(np.max(np.abs(self.data - self.data.conj().T)))
        if herm > herm_tol:
            raise InvariantViolationError(f"Hermiticity violated by {herm:.3g}")
        if check_positivity:
            lo = float(np.linalg.eigvalsh(self.data)[0])
            if lo < eig_tol:
                raise InvariantViolationError(f"negative eigenvalue {lo:.3g}")
        return self

    def partial_trace(self, keep: int) -> "DensityMatrix":
        if not self.is_composite:
            raise ValueError("partial_trace needs a composite state")
        out = partial_trace(self.data, self.dims, keep)
        return DensityMatrix(out, (self.dims[keep],))

    def partial_transpose(self, subsystem: int = 1) -> np.ndarray:
        if not self.is_composite:
            raise ValueError("partial_transpose needs a composite state")
        return partial_transpose(self.data, self.dims, subsystem)

    def mode_populations(self) -> np.ndarray:
        """Fock populations of the magnon (last) factor."""
        if self.is_composite:
            return np.real(np.diag(partial_trace(self.data, self.dims, keep=1)))
        return np.real(np.diag(self.data))

    def truncation_suspect(self, threshold: float = TRUNCATION_POPULATION) -> bool:
        """True when the top two Fock levels hold more than ``threshold`` population."""
        pops = self.mode_populations()
        return float(pops[-2:].sum()) > threshold
