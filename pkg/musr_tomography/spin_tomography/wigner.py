"""Wigner small-d and D functions, 3j symbols and Clebsch-Gordan coefficients.

Spins and projections are accepted as floats (0.5, 1.5, ...) and handled internally
as doubled integers, so the half-integer bookkeeping is exact.
"""

import math
import numpy as np
from functools import lru_cache

from musr_tomography.errors import InvalidProjectionError
from musr_tomography.linalg.matrix_ops import ComplexMatrix
from musr_tomography.linalg.spin_operators import check_spin, projections, two_j
from musr_tomography.spin_tomography.direction import Direction


def _twice(x: float) -> int | None:
    doubled = round(2 * float(x))
    if abs(2 * float(x) - doubled) > 1e-9:
        return None
    return int(doubled)


def _check_projection(j2: int, m: float) -> int:
    m2 = _twice(m)
    if m2 is None or abs(m2) > j2 or (j2 - m2) % 2:
        raise InvalidProjectionError(f"projection {m} is invalid for spin {j2 / 2}")
    return m2


def wigner_small_d(j: float, mp: float, m: float, beta: float) -> float:
    """d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m>, Wigner's factorial sum."""
    j2 = two_j(j)
    mp2 = _check_projection(j2, mp)
    m2 = _check_projection(j2, m)
    jpm, jmm = (j2 + m2) // 2, (j2 - m2) // 2
    jpmp, jmmp = (j2 + mp2) // 2, (j2 - mp2) // 2
    diff = (mp2 - m2) // 2
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    prefactor = math.sqrt(
        math.factorial(jpmp) * math.factorial(jmmp) * math.factorial(jpm) * math.factorial(jmm)
    )
    total = 0.0
    for k in range(max(0, -diff), min(jpm, jmmp) + 1):
        denominator = (
            math.factorial(jpm - k)
            * math.factorial(k)
            * math.factorial(diff + k)
            * math.factorial(jmmp - k)
        )
        total += (
            (-1) ** (diff + k)
            * c ** (j2 - diff - 2 * k)
            * s ** (diff + 2 * k)
            / denominator
        )
    return prefactor * total


def wigner_d_matrix(j: float, beta: float) -> np.ndarray:
    ms = projections(j)
    return np.array([[wigner_small_d(j, mp, m, beta) for m in ms] for mp in ms])


def wigner_D_matrix(j: float, alpha: float, beta: float, gamma: float) -> ComplexMatrix:
    """D^j_{m'm}(alpha, beta, gamma) = e^{-i m' alpha} d^j_{m'm}(beta) e^{-i m gamma} (z-y-z)."""
    ms = projections(j)
    return np.exp(-1j * ms * alpha)[:, None] * wigner_d_matrix(j, beta) * np.exp(-1j * ms * gamma)[None, :]


def rotation_matrix(j: float, direction: Direction) -> ComplexMatrix:
    """R(n) = exp(-i (n_perp . J) theta), the rotation carrying z onto n.

    Equal to the D-matrix with Euler angles (phi, theta, -phi).

    Args:
        j (float): Spin, one of 1/2, 1, 3/2, 2.
        direction (Direction): Target direction n.

    Returns:
        ComplexMatrix: (2j+1)x(2j+1) unitary in the |j m> basis, m descending.
    """
    j = check_spin(j)
    return wigner_D_matrix(j, direction.phi, direction.theta, -direction.phi)


def three_j(j1: float, j2: float, j3: float, m1: float, m2: float, m3: float) -> float:
    """Wigner 3j symbol via the Racah formula with log-factorials.

    Selection-rule violations (triangle, projection sum, range, parity) return 0.
    """
    J = [_twice(x) for x in (j1, j2, j3)]
    M = [_twice(x) for x in (m1, m2, m3)]
    if any(x is None for x in J + M) or any(x < 0 for x in J):
        return 0.0
    J1, J2, J3 = J
    M1, M2, M3 = M
    if M1 + M2 + M3 != 0:
        return 0.0
    if any(abs(mm) > jj or (jj - mm) % 2 for jj, mm in zip(J, M)):
        return 0.0
    if (J1 + J2 + J3) % 2 or J3 > J1 + J2 or J3 < abs(J1 - J2):
        return 0.0
    return _three_j_doubled(J1, J2, J3, M1, M2, M3)


@lru_cache(maxsize=4096)
def _three_j_doubled(J1: int, J2: int, J3: int, M1: int, M2: int, M3: int) -> float:
    lf = lambda n: math.lgamma(n + 1)  # noqa: E731
    t1 = (J1 + J2 - J3) // 2
    t2 = (J1 - J2 + J3) // 2
    t3 = (-J1 + J2 + J3) // 2
    t4 = (J1 + J2 + J3) // 2
    log_delta = lf(t1) + lf(t2) + lf(t3) - lf(t4 + 1)
    log_fact = sum(
        lf(x)
        for x in (
            (J1 + M1) // 2, (J1 - M1) // 2,
            (J2 + M2) // 2, (J2 - M2) // 2,
            (J3 + M3) // 2, (J3 - M3) // 2,
        )
    )
    log_prefactor = 0.5 * (log_delta + log_fact)
    a1 = (J3 - J2 + M1) // 2
    a2 = (J3 - J1 - M2) // 2
    b1, b2, b3 = t1, (J1 - M1) // 2, (J2 + M2) // 2
    total = 0.0
    for k in range(max(0, -a1, -a2), min(b1, b2, b3) + 1):
        log_term = lf(k) + lf(a1 + k) + lf(a2 + k) + lf(b1 - k) + lf(b2 - k) + lf(b3 - k)
        total += (-1) ** k * math.exp(log_prefactor - log_term)
    sign = -1 if ((J1 - J2 - M3) // 2) % 2 else 1
    return sign * total


def clebsch_gordan(j1: float, m1: float, j2: float, m2: float, big_j: float, big_m: float) -> float:
    """<j1 m1; j2 m2 | J M> with the Condon-Shortley phase."""
    exponent = _twice(j1 - j2 + big_m)
    if exponent is None or exponent % 2:
        return 0.0
    sign = -1 if (exponent // 2) % 2 else 1
    return sign * math.sqrt(2 * big_j + 1) * three_j(j1, j2, big_j, m1, m2, -big_m)
