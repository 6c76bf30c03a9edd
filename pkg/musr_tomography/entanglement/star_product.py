"""Star products of two-qubit tomographic symbols.

A symbol f(m_mu, n_mu, m_e, n_e) is the tomogram of an operator. The product of two
operators has the symbol

    (f * g)(x) = sum integral f(x') g(x'') K(x', x'', x) dn'/4pi dn''/4pi

with K = Tr[D(x') D(x'') Pi(x)] factorizing over the two spins. Summing a symbol over
both projections at any fixed pair of directions gives the trace of its operator, which
is how M3 and M4 are evaluated without forming a density matrix.
"""

import numpy as np
from opt_einsum import contract
from typing import Sequence

from musr_tomography.errors import DimensionError
from musr_tomography.spin_tomography.direction import Direction
from musr_tomography.spin_tomography.quadrature import QuadratureGrid
from musr_tomography.entanglement.ppt import ppt_tomogram
from musr_tomography.two_spin.two_spin_tomogram import TwoSpinTomogram

QUBIT_PROJECTIONS = np.array([0.5, -0.5])
# symbols are linear in n and so is the kernel in each source direction
STAR_DEGREE = 2


def qubit_star_factor(m1: float, n1: Direction, m2: float, n2: Direction, m: float, n: Direction) -> complex:
    """Single-qubit kernel Tr[D(m1, n1) D(m2, n2) Pi(m, n)]."""
    a, b, c = n1.vector, n2.vector, n.vector
    return (
        0.25
        + 9 * m1 * m2 * (a @ b)
        + 3 * m * m1 * (c @ a)
        + 3 * m * m2 * (c @ b)
        + 18j * m * m1 * m2 * (c @ np.cross(a, b))
    )


def star_kernel(
    first: Sequence[tuple[float, Direction]],
    second: Sequence[tuple[float, Direction]],
    target: Sequence[tuple[float, Direction]],
) -> complex:
    """Product over subsystems of the single-qubit kernel.

    Each argument holds one (m, n) pair per subsystem, muon first.
    """
    if not len(first) == len(second) == len(target):
        raise DimensionError("every argument needs one (m, n) pair per subsystem")
    kernel = 1.0 + 0j
    for (m1, n1), (m2, n2), (m, n) in zip(first, second, target):
        kernel *= qubit_star_factor(m1, n1, m2, n2, m, n)
    return kernel


def _kernel_table(source: QuadratureGrid, target: np.ndarray) -> np.ndarray:
    """Weighted single-qubit kernel, shape (2, N, 2, N, 2, M).

    Axes are (m', n'), (m'', n'') over the source grid and (m, n) over the target vectors.
    """
    V = source.vectors
    m = QUBIT_PROJECTIONS
    nn = V @ V.T
    tn = target @ V.T
    triple = np.einsum("rx,klx->klr", target, np.cross(V[:, None, :], V[None, :, :]))
    table = (
        0.25
        + 9 * np.einsum("a,b,kl->akbl", m, m, nn)[..., None, None]
        + 3 * np.einsum("c,a,rk->akcr", m, m, tn)[:, :, None, None]
        + 3 * np.einsum("c,b,rl->blcr", m, m, tn)[None, None]
        + 18j * np.einsum("c,a,b,klr->akblcr", m, m, m, triple)
    )
    weights = source.weights
    return table * weights[None, :, None, None, None, None] * weights[None, None, None, :, None, None]


def star_product(
    f: np.ndarray,
    g: np.ndarray,
    kernel_mu: np.ndarray,
    kernel_e: np.ndarray,
) -> np.ndarray:
    """f * g for symbols shaped (2, N_mu, 2, N_e), evaluated where the kernels point."""
    return contract("akbl,cmdn,akcmpr,bldnqs->prqs", f, g, kernel_mu, kernel_e)


def tomographic_M34(
    w: TwoSpinTomogram,
    n_mu: Direction | None = None,
    n_e: Direction | None = None,
) -> tuple[float, float]:
    """M3 and M4 of the partial transpose, computed from star products of w_ppt.

    Args:
        w (TwoSpinTomogram): Two-qubit tomogram on grids exact to degree 2 and closed
            under the n_y mirror.
        n_mu (Direction, optional): Muon direction the traces are read at. Defaults to z.
        n_e (Direction, optional): Electron direction the traces are read at. Defaults to z.

    Returns:
        tuple[float, float]: (M3, M4).
    """
    if w.j_e != 0.5 or w.j_mu != 0.5:
        raise DimensionError("tomographic M3/M4 are defined for two qubits")
    w.grid_mu.require_degree(STAR_DEGREE)
    w.grid_e.require_degree(STAR_DEGREE)
    n_mu = n_mu or Direction.z()
    n_e = n_e or Direction.z()

    f = ppt_tomogram(w).values.astype(np.complex128)
    k_mu = _kernel_table(w.grid_mu, w.grid_mu.vectors)
    k_e = _kernel_table(w.grid_e, w.grid_e.vectors)
    ko_mu = _kernel_table(w.grid_mu, n_mu.vector[None, :])
    ko_e = _kernel_table(w.grid_e, n_e.vector[None, :])

    f2 = star_product(f, f, k_mu, k_e)
    f3 = star_product(f2, f, k_mu, k_e)

    def trace(g, h):
        return float(np.real(star_product(g, h, ko_mu, ko_e).sum()))

    t2, t3, t4 = trace(f, f), trace(f2, f), trace(f3, f)
    M3 = (1 - 3 * t2 + 2 * t3) / 6
    M4 = (3 * t2**2 + 1 - 6 * t2 + 8 * t3 - 6 * t4) / 24
    return M3, M4

