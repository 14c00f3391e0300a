"""Quantum-correlation functionals for two-qubit states.

Provides the closed-form lower and upper bounds on the geometric discord
(squared Hilbert-Schmidt distance to the nearest zero-discord state), the
purity-rescaled discord derived from it, the Bell-diagonal analytic
formulas, the measurable ratio g, Wootters concurrence, and a brute-force
measurement-minimization oracle used to guard the closed forms.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .constants import InvalidParameterError, NumericalDomainError
from .linalg3 import max_eigenpair
from .states import (
    BlochForm,
    PAULI_Y,
    TwoQubitState,
    bloch_decompose,
    purity,
)

RESCALE_PREFACTOR = 0.5 * (1.0 - math.sqrt(3.0) / 2.0)

_SY_SY = np.kron(PAULI_Y, PAULI_Y)


class UpperPairing(enum.Enum):
    """Which K matrix each L correction is paired with in the upper bound.

    PRINTED is the cross pairing (K_x with L_y); SWAPPED pairs each side
    with itself and exists for sensitivity analysis only.
    """

    PRINTED = "printed"
    SWAPPED = "swapped"


@dataclass(frozen=True)
class DiscordBounds:
    ds_lower: float
    ds_upper: float
    rescaled_lower: float
    rescaled_upper: float
    coincide: bool
    degenerate: bool = False


class Regime(enum.Enum):
    G_LE_1 = "g_le_1"
    G_GE_1 = "g_ge_1"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class BellDiagonalDiscord:
    ds: float
    regime: Regime
    g: float


def _k_matrices(form: BlochForm) -> tuple[np.ndarray, np.ndarray]:
    t = form.t_corr
    k_x = np.outer(form.x, form.x) + t @ t.T
    k_y = np.outer(form.y, form.y) + t.T @ t
    return k_x, k_y


def geometric_discord_lower(state: TwoQubitState | BlochForm) -> float:
    """Closed-form lower bound: max over both measured sides of (Tr K - k_max)/4."""
    form = state if isinstance(state, BlochForm) else bloch_decompose(state)
    k_x, k_y = _k_matrices(form)
    ax = float(np.trace(k_x)) - max_eigenpair(k_x)[0]
    ay = float(np.trace(k_y)) - max_eigenpair(k_y)[0]
    return max(0.0, 0.25 * max(ax, ay))


def geometric_discord_upper(
    state: TwoQubitState | BlochForm, pairing: UpperPairing = UpperPairing.PRINTED
) -> float:
    """Closed-form upper bound; see discord_bounds for the degenerate-top handling."""
    return _upper_detail(
        state if isinstance(state, BlochForm) else bloch_decompose(state), pairing
    )[0]


def _correction(vecs: list[np.ndarray], bloch: np.ndarray, mat_for_vec) -> float:
    """min over candidate top eigenvectors of Tr L - l_max with L = |v><v| + M(k)."""
    best = math.inf
    for k_hat in vecs:
        l_mat = np.outer(bloch, bloch) + mat_for_vec(k_hat)
        val = float(np.trace(l_mat)) - max_eigenpair(l_mat)[0]
        best = min(best, val)
    return best


def _upper_detail(form: BlochForm, pairing: UpperPairing) -> tuple[float, bool]:
    t = form.t_corr
    k_x, k_y = _k_matrices(form)
    kx, kx_vecs, deg_x = max_eigenpair(k_x)
    ky, ky_vecs, deg_y = max_eigenpair(k_y)
    ax = float(np.trace(k_x)) - kx
    ay = float(np.trace(k_y)) - ky
    # L_x uses the top eigenvector of K_y and vice versa
    bx = _correction(ky_vecs, form.x, lambda k: t @ np.outer(k, k) @ t.T)
    by = _correction(kx_vecs, form.y, lambda k: t.T @ np.outer(k, k) @ t)
    if pairing is UpperPairing.PRINTED:
        value = min(ax + by, ay + bx)
    else:
        value = min(ax + bx, ay + by)
    return max(0.0, 0.25 * value), (deg_x or deg_y)


def rescaled_discord(ds: float, purity_value: float) -> float:
    """Purity-rescaled discord: p0 * (1 - sqrt(1 - ds / (2 purity))).

    p0 = (1 - sqrt(3)/2)/2 is the rescaled value of a pure maximally
    entangled state's distance scale.  Small negative radicands from
    round-off are clamped; larger ones are a domain error.
    """
    if not 0.25 - 1e-9 <= purity_value <= 1.0 + 1e-9:
        raise InvalidParameterError(f"purity must lie in [1/4, 1], got {purity_value}")
    if ds < -1e-12:
        raise InvalidParameterError(f"geometric discord must be nonnegative, got {ds}")
    radicand = 1.0 - ds / (2.0 * purity_value)
    if radicand < -1e-9:
        raise NumericalDomainError(
            f"rescaling radicand {radicand:.3e} below tolerance; ds={ds}, purity={purity_value}"
        )
    radicand = max(0.0, radicand)
    return RESCALE_PREFACTOR * (1.0 - math.sqrt(radicand))


def discord_bounds(
    state: TwoQubitState,
    pairing: UpperPairing = UpperPairing.PRINTED,
    coincide_tol: float = 1e-9,
) -> DiscordBounds:
    """Both geometric-discord bounds plus their rescaled versions."""
    form = bloch_decompose(state)
    lower = geometric_discord_lower(form)
    upper, degenerate = _upper_detail(form, pairing)
    upper = max(upper, lower)  # guard against round-off inversion at coincidence
    pur = purity(state)
    return DiscordBounds(
        ds_lower=lower,
        ds_upper=upper,
        rescaled_lower=rescaled_discord(lower, pur),
        rescaled_upper=rescaled_discord(upper, pur),
        coincide=abs(upper - lower) < coincide_tol,
        degenerate=degenerate,
    )


def bell_diagonal_discord(a: float, b: complex) -> BellDiagonalDiscord:
    """Analytic geometric discord of the X-pattern state diag(1/2-a, a, a, 1/2-a), coherence b.

    ds = 2|b|^2 in the g <= 1 regime and (1/2 - 2a)^2 + |b|^2 in the
    g >= 1 regime, with g = 2|b| / |1 - 4a|.
    """
    if not -1e-12 <= a <= 0.5 + 1e-12:
        raise InvalidParameterError(f"a must lie in [0, 1/2], got {a}")
    babs = abs(b)
    if babs > a + 1e-12:
        raise InvalidParameterError(f"positivity requires |b| <= a, got |b|={babs}, a={a}")
    denom = abs(1.0 - 4.0 * a)
    if denom < 1e-300:
        g = math.inf if babs > 0.0 else 0.0
    else:
        g = 2.0 * babs / denom
    if abs(g - 1.0) < 1e-12:
        regime = Regime.BOUNDARY
        ds = 2.0 * babs * babs
    elif g < 1.0:
        regime = Regime.G_LE_1
        ds = 2.0 * babs * babs
    else:
        regime = Regime.G_GE_1
        ds = (0.5 - 2.0 * a) ** 2 + babs * babs
    return BellDiagonalDiscord(ds=ds, regime=regime, g=g)


def g_ratio(state: TwoQubitState, zero_tol: float = 1e-14) -> float:
    """|Tr(sx x sx rho)| / |Tr(sz x sz rho)|.

    Absolute values make the ratio coincide with 2|b|/|1-4a| on X-pattern
    states.  Returns +inf for a vanishing denominator with finite
    numerator and nan (undefined) for 0/0.
    """
    rho = state.rho
    txx = abs(float(np.real(rho[0, 3] + rho[1, 2] + rho[2, 1] + rho[3, 0])))
    tzz = abs(float(np.real(rho[0, 0] - rho[1, 1] - rho[2, 2] + rho[3, 3])))
    if tzz < zero_tol:
        return math.inf if txx >= zero_tol else math.nan
    return txx / tzz


def concurrence(state: TwoQubitState) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4)."""
    rho = state.rho
    rho_tilde = _SY_SY @ rho.conj() @ _SY_SY
    vals = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sqrt(np.clip(np.real(vals), 0.0, None))
    lam[::-1].sort()
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


# ---------------------------------------------------------------------------
# measurement-minimization oracle
# ---------------------------------------------------------------------------


def pinch_first_qubit(rho: np.ndarray, theta: float, phi: float) -> np.ndarray:
    """Dephase qubit A in the basis of the Bloch direction (theta, phi)."""
    n = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    n_sigma = n[0] * np.array([[0, 1], [1, 0]]) + n[1] * np.array([[0, -1j], [1j, 0]]) + n[2] * np.array(
        [[1, 0], [0, -1]]
    )
    p_plus = 0.5 * (np.eye(2) + n_sigma)
    p_minus = 0.5 * (np.eye(2) - n_sigma)
    out = np.zeros_like(rho)
    for proj in (p_plus, p_minus):
        big = np.kron(proj, np.eye(2))
        out += big @ rho @ big
    return out


def oracle_one_sided_discord(
    state: TwoQubitState, grid_resolution: int = 24, refine: bool = True
) -> float:
    """Minimum squared Hilbert-Schmidt distance to a qubit-A pinching.

    Brute force: coarse (theta, phi) grid followed by a simplex refinement
    of the best point.  Serves as the independent check of the closed-form
    lower bound on the A side.
    """
    rho = state.rho

    def distance_sq(angles: np.ndarray) -> float:
        chi = pinch_first_qubit(rho, angles[0], angles[1])
        diff = rho - chi
        return float(np.sum(np.abs(diff) ** 2))

    thetas = np.linspace(0.0, math.pi, grid_resolution)
    phis = np.linspace(0.0, 2.0 * math.pi, 2 * grid_resolution, endpoint=False)
    best_val = math.inf
    best = (0.0, 0.0)
    for th in thetas:
        for ph in phis:
            val = distance_sq(np.array([th, ph]))
            if val < best_val:
                best_val = val
                best = (th, ph)
    if refine:
        res = minimize(
            distance_sq,
            np.array(best),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400},
        )
        best_val = min(best_val, float(res.fun))
    return best_val
