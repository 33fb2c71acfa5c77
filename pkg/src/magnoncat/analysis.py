"""Entanglement, fidelity and phase-space diagnostics of prepared states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import DensityMatrix, displacement_op, partial_transpose

# Eigenvalues of the partial transpose above this (negative) threshold are
# numerical noise and do not count towards the negativity.
NEGATIVITY_FLOOR = -1e-12

WIGNER_IMAG_TOL = 1e-10


def log_negativity(
    rho: DensityMatrix | np.ndarray,
    dims: tuple[int, int] | None = None,
    subsystem: int = 1,
) -> float:
    """Logarithmic negativity E_N = log2(2 N(rho) + 1).

    N(rho) is the summed magnitude of the negative eigenvalues of the
    partial transpose; which factor is transposed does not matter.
    """
    if isinstance(rho, DensityMatrix):
        dims = dims or rho.dims
        rho = rho.data
    if dims is None or len(dims) != 2:
        raise ValueError("log_negativity needs composite dims")
    pt = partial_transpose(np.asarray(rho), tuple(dims), subsystem)
    eig = np.linalg.eigvalsh(pt)
    neg = float(-eig[eig < NEGATIVITY_FLOOR].sum())
    return float(np.log2(2.0 * neg + 1.0))


def fidelity_pure(rho: DensityMatrix | np.ndarray, psi: np.ndarray) -> float:
    """Fidelity sqrt(<psi|rho|psi>) of a state against a pure target."""
    if isinstance(rho, DensityMatrix):
        rho = rho.data
    rho = np.asarray(rho)
    psi = np.asarray(psi)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, psi {psi.shape}")
    val = np.vdot(psi, rho @ psi)
    return float(np.sqrt(max(val.real, 0.0)))


def cat_size(beta: complex) -> float:
    """Cat size S = |beta|^2, the squared phase-space separation."""
    return abs(beta) ** 2


@dataclass(eq=False)
class WignerGrid:
    """W(alpha) samples on a rectangular phase-space grid.

    ``values[i, j]`` is W at alpha = re_axis[i] + 1j * im_axis[j], in the
    2/pi convention where the full-plane integral is 1.
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray
    truncation_suspect: bool = False

    def __post_init__(self):
        for ax in (self.re_axis, self.im_axis):
            steps = np.diff(ax)
            if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9):
                raise ValueError("axes must be uniform and strictly increasing")
        if self.values.shape != (len(self.re_axis), len(self.im_axis)):
            raise ValueError("values shape does not match axes")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite Wigner values")

    @property
    def cell_area(self) -> float:
        return float((self.re_axis[1] - self.re_axis[0]) * (self.im_axis[1] - self.im_axis[0]))

    def riemann_sum(self) -> float:
        """Grid integral of W; close to 1 when the grid encloses the state."""
        return float(self.values.sum() * self.cell_area)


def default_grid_half_width(beta_mag: float) -> float:
    """Half width 1.5 (|beta| + 2) covering a cat of the given size with margin."""
    return 1.5 * (abs(beta_mag) + 2.0)


def _wigner_row(rho_m: np.ndarray, signs: np.ndarray, x: float, im_axis: np.ndarray):
    dim = rho_m.shape[0]
    row = np.empty(len(im_axis))
    worst = 0.0
    for j, y in enumerate(im_axis):
        D = displacement_op(x + 1j * y, dim)
        # diag(D^dag rho D) without forming the full product
        diag = np.sum(D.conj() * (rho_m @ D), axis=0)
        w = (2.0 / np.pi) * np.dot(signs, diag)
        worst = max(worst, abs(w.imag))
        row[j] = w.real
    return row, worst


def wigner(
    rho_m: DensityMatrix | np.ndarray,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    n_points: int = 201,
    threads: int = 1,
) -> WignerGrid:
    """Displaced-parity Wigner function of a single-mode state.

    W(alpha) = (2/pi) sum_n (-1)^n <n| D^dag(alpha) rho D(alpha) |n>,
    with the displacement built per grid point by unitary exponentiation.
    Grid points are independent; ``threads`` > 1 evaluates rows of constant
    Re(alpha) concurrently with identical results.  A nonreal trace beyond
    1e-10 signals a corrupted state and raises.
    """
    suspect = False
    if isinstance(rho_m, DensityMatrix):
        if rho_m.is_composite:
            raise ValueError("wigner needs a single-mode density matrix")
        suspect = rho_m.truncation_suspect()
        rho_m = rho_m.data
    rho_m = np.asarray(rho_m, dtype=complex)
    dim = rho_m.shape[0]
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    re_axis = np.linspace(re_range[0], re_range[1], n_points)
    im_axis = np.linspace(im_range[0], im_range[1], n_points)
    signs = (-1.0) ** np.arange(dim)
    values = np.empty((n_points, n_points))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda x: _wigner_row(rho_m, signs, x, im_axis), re_axis))
    else:
        rows = [_wigner_row(rho_m, signs, x, im_axis) for x in re_axis]
    worst_imag = 0.0
    for i, (row, worst) in enumerate(rows):
        values[i] = row
        worst_imag = max(worst_imag, worst)
    if worst_imag > WIGNER_IMAG_TOL:
        raise ValueError(f"Wigner trace has imaginary residue {worst_imag:.3g}")
    return WignerGrid(re_axis, im_axis, values, truncation_suspect=suspect)
