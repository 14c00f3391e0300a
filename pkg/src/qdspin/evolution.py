"""Two-qubit evolution under the product channel and trajectory analysis.

Both dots are identical and uncorrelated, so the two-qubit map is the
tensor product of two copies of the single-dot channel.  The engine
applies the channel on a time grid, evaluates every correlation measure
per time, and detects the decay-regime crossings (g through unity),
extrema and entanglement-sudden-death features used downstream.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .channel import ChannelTrajectory
from .constants import InvalidParameterError
from .measures import (
    UpperPairing,
    concurrence,
    discord_bounds,
    g_ratio,
)
from .states import (
    BellDiagonalParams,
    TwoQubitState,
    bell_diagonal_params,
    purity,
    singlet_triplet_weights,
)

EVOLVED_PSD_TOL = 1e-8  # audit tolerance for evolved states (construction is 1e-10)


class ChannelError(InvalidParameterError):
    """Channel parameters violate complete positivity."""


def _single_qubit_map(p: float, c: complex) -> np.ndarray:
    """Transfer tensor L[out_row, out_col, in_row, in_col] of the dot channel."""
    l_map = np.zeros((2, 2, 2, 2), dtype=complex)
    l_map[0, 0, 0, 0] = 1.0 - p
    l_map[0, 0, 1, 1] = p
    l_map[1, 1, 0, 0] = p
    l_map[1, 1, 1, 1] = 1.0 - p
    l_map[0, 1, 0, 1] = c
    l_map[1, 0, 1, 0] = np.conj(c)
    return l_map


def apply_channel(
    state: TwoQubitState,
    p: float,
    c: complex,
    psd_tol: float = EVOLVED_PSD_TOL,
    cp_tol: float = 1e-9,
) -> TwoQubitState:
    """Apply the product channel: populations mix by p, coherences scale by c.

    Per qubit, (u, d) -> ((1-p)u + pd, pu + (1-p)d) and the off-diagonal
    element picks up c (c* for its conjugate).  The pair (p, c) must be
    completely positive: 0 <= p <= 1 and |c| <= 1 - p.
    """
    if not -1e-15 <= p <= 1.0 + 1e-15:
        raise ChannelError(f"flip probability must lie in [0, 1], got {p}")
    if abs(c) > 1.0 - p + cp_tol:
        raise ChannelError(f"complete positivity requires |c| <= 1-p; |c|={abs(c)}, 1-p={1.0 - p}")
    l_map = _single_qubit_map(p, c)
    r = state.rho.reshape(2, 2, 2, 2)  # indices (a, b | a', b'), A the left qubit
    out = np.einsum("acuw,bdvx,uvwx->abcd", l_map, l_map, r).reshape(4, 4)
    out = 0.5 * (out + out.conj().T)
    return TwoQubitState(out, state.ordering, psd_tol=psd_tol)


@dataclass
class CorrelationTrajectory:
    """Per-time correlation report along a channel trajectory."""

    times: np.ndarray
    p: np.ndarray
    c: np.ndarray                      # coherence multiplier actually applied
    ds_lower: np.ndarray
    ds_upper: np.ndarray
    d_lower: np.ndarray
    d_upper: np.ndarray
    purity: np.ndarray
    g: np.ndarray
    concurrence: np.ndarray
    st_weights: np.ndarray             # (n, 4): w_Tm1, w_T0, w_Tp1, w_S0
    bell_a: np.ndarray                 # nan where not of Bell-diagonal form
    bell_b: np.ndarray                 # complex; nan where not of form
    min_eigenvalue: np.ndarray
    state0: TwoQubitState
    dot: object = None

    def normalized(self, mode: str = "none") -> tuple[np.ndarray, np.ndarray]:
        """Rescaled-discord bounds under an output normalization.

        'none' returns raw values, 'initial' divides by d_lower(0), 'half'
        scales so the trajectory starts at 1/2.  Normalization never
        changes where extrema or crossings sit.
        """
        if mode == "none":
            return self.d_lower.copy(), self.d_upper.copy()
        d0 = self.d_lower[0]
        if d0 <= 1e-15:
            raise InvalidParameterError("cannot normalize: initial rescaled discord is zero")
        scale = {"initial": 1.0 / d0, "half": 0.5 / d0}.get(mode)
        if scale is None:
            raise InvalidParameterError(f"unknown normalization mode {mode!r}")
        return self.d_lower * scale, self.d_upper * scale

    def to_csv(self, path: str | Path, header_lines: list[str] | None = None,
               normalize: str = "none") -> None:
        d_lo, d_hi = self.normalized(normalize)
        lines = [f"# {h}" for h in (header_lines or [])]
        lines.append(
            "t_ns,p,c_re,c_im,a,b_re,b_im,purity,ds_lo,ds_hi,d_lo,d_hi,g,concurrence,"
            "wTm1,wT0,wTp1,wS0"
        )

        def num(v: float) -> str:
            return "" if (isinstance(v, float) and math.isnan(v)) else f"{v:.17g}"

        for k in range(self.times.size):
            row = [
                f"{self.times[k]:.17g}",
                f"{self.p[k]:.17g}",
                f"{self.c[k].real:.17g}",
                f"{self.c[k].imag:.17g}",
                num(float(self.bell_a[k])),
                num(float(np.real(self.bell_b[k]))),
                num(float(np.imag(self.bell_b[k]))),
                f"{self.purity[k]:.17g}",
                f"{self.ds_lower[k]:.17g}",
                f"{self.ds_upper[k]:.17g}",
                f"{d_lo[k]:.17g}",
                f"{d_hi[k]:.17g}",
                f"{self.g[k]:.17g}",
                f"{self.concurrence[k]:.17g}",
                f"{self.st_weights[k, 0]:.17g}",
                f"{self.st_weights[k, 1]:.17g}",
                f"{self.st_weights[k, 2]:.17g}",
                f"{self.st_weights[k, 3]:.17g}",
            ]
            lines.append(",".join(row))
        Path(path).write_text("\n".join(lines) + "\n")


def effective_coherence(traj: ChannelTrajectory, drop_zeeman_phase: bool = True) -> np.ndarray:
    """Coherence multipliers with the deterministic Zeeman rotation removed.

    Removing e^{i Omega t / hbar} is a local z rotation (co-rotating
    frame); it changes no correlation measure and keeps Phi-type
    coherences slowly varying.
    """
    if not drop_zeeman_phase:
        return traj.c.copy()
    omega_z = traj.dot.zeeman_energy
    hbar = traj.dot.constants.hbar
    return traj.c * np.exp(-1j * omega_z * traj.times / hbar)


def evolve(
    state0: TwoQubitState,
    traj: ChannelTrajectory,
    drop_zeeman_phase: bool = True,
    pairing: UpperPairing = UpperPairing.PRINTED,
) -> CorrelationTrajectory:
    """Apply the product channel along the trajectory and measure everything."""
    n = traj.times.size
    c_eff = effective_coherence(traj, drop_zeeman_phase)
    out = CorrelationTrajectory(
        times=traj.times.copy(),
        p=traj.p.copy(),
        c=c_eff,
        ds_lower=np.empty(n),
        ds_upper=np.empty(n),
        d_lower=np.empty(n),
        d_upper=np.empty(n),
        purity=np.empty(n),
        g=np.empty(n),
        concurrence=np.empty(n),
        st_weights=np.empty((n, 4)),
        bell_a=np.full(n, np.nan),
        bell_b=np.full(n, np.nan, dtype=complex),
        min_eigenvalue=np.empty(n),
        state0=state0,
        dot=traj.dot,
    )
    for k in range(n):
        try:
            st = apply_channel(state0, float(traj.p[k]), complex(c_eff[k]))
        except ChannelError as exc:
            raise ChannelError(f"at time index {k} (t={traj.times[k]:g} ns): {exc}") from exc
        bounds = discord_bounds(st, pairing=pairing)
        out.ds_lower[k] = bounds.ds_lower
        out.ds_upper[k] = bounds.ds_upper
        out.d_lower[k] = bounds.rescaled_lower
        out.d_upper[k] = bounds.rescaled_upper
        out.purity[k] = purity(st)
        out.g[k] = g_ratio(st)
        out.concurrence[k] = concurrence(st)
        out.st_weights[k] = singlet_triplet_weights(st)
        out.min_eigenvalue[k] = st.min_eigenvalue
        params = bell_diagonal_params(st)
        if params is not None:
            out.bell_a[k] = params.a
            out.bell_b[k] = params.b
    return out


# ---------------------------------------------------------------------------
# feature detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KinkEvent:
    """g(t) crossing unity: the discord decay switches branch here."""

    t_cross_ns: float
    direction: str            # 'down' = above -> below, 'up' = below -> above
    slope_jump: float


class ExtremumKind(enum.Enum):
    MINIMUM = "min"
    MAXIMUM = "max"


@dataclass(frozen=True)
class Extremum:
    t_ns: float
    value: float
    kind: ExtremumKind


def find_g_crossings(
    times: np.ndarray,
    g: np.ndarray,
    band: float = 1e-6,
    refine: Callable[[float], float] | None = None,
    t_tol: float = 1e-6,
    slope_series: np.ndarray | None = None,
) -> list[KinkEvent]:
    """Sign-change crossings of g(t) - 1, refined by bisection.

    Samples with |g - 1| <= band count as on the boundary; a crossing
    requires passing from strictly above to strictly below (or vice
    versa), so tangential touches and boundary noise are excluded.  When
    `refine` is given (an exact evaluator t -> g(t)), roots are bisected
    to t_tol; otherwise linear interpolation on the grid is used.
    slope_series, if provided, supplies the series whose slope jump is
    reported as kink evidence (defaults to g itself).
    """
    times = np.asarray(times, dtype=float)
    g = np.asarray(g, dtype=float)
    finite = np.isfinite(g)
    side = np.zeros(times.size, dtype=int)
    side[finite & (g > 1.0 + band)] = 1
    side[finite & (g < 1.0 - band)] = -1

    events: list[KinkEvent] = []
    last_side = 0
    last_idx = -1
    for i in range(times.size):
        s = side[i]
        if s == 0:
            continue
        if last_side != 0 and s != last_side:
            t_lo, t_hi = times[last_idx], times[i]
            if refine is not None:
                f_lo = refine(t_lo) - 1.0
                for _ in range(200):
                    if t_hi - t_lo <= t_tol:
                        break
                    t_mid = 0.5 * (t_lo + t_hi)
                    f_mid = refine(t_mid) - 1.0
                    if (f_mid > 0.0) == (f_lo > 0.0):
                        t_lo, f_lo = t_mid, f_mid
                    else:
                        t_hi = t_mid
                t_cross = 0.5 * (t_lo + t_hi)
            else:
                g_lo, g_hi = g[last_idx], g[i]
                frac = (1.0 - g_lo) / (g_hi - g_lo) if g_hi != g_lo else 0.5
                t_cross = t_lo + frac * (t_hi - t_lo)
            series = g if slope_series is None else np.asarray(slope_series, dtype=float)
            events.append(
                KinkEvent(
                    t_cross_ns=float(t_cross),
                    direction="down" if last_side > 0 else "up",
                    slope_jump=_slope_jump(times, series, float(t_cross)),
                )
            )
        last_side = s
        last_idx = i
    return events


def _slope_jump(times: np.ndarray, values: np.ndarray, t_cross: float, window: int = 5) -> float:
    """Finite-difference slope discontinuity estimate around t_cross."""
    idx = int(np.searchsorted(times, t_cross))
    lo = slice(max(0, idx - window), max(2, idx))
    hi = slice(min(idx + 1, times.size - 2), min(idx + 1 + window, times.size))
    def slope(sl: slice) -> float:
        t, v = times[sl], values[sl]
        if t.size < 2 or not np.all(np.isfinite(v)):
            return math.nan
        return float(np.polyfit(t, v, 1)[0])
    return slope(hi) - slope(lo)


def find_extrema(
    times: np.ndarray,
    values: np.ndarray,
    min_prominence: float = 0.0,
    plateau_tol: float = 0.0,
) -> list[Extremum]:
    """Interior local extrema by discrete comparison with parabolic refinement.

    Runs of samples equal to within plateau_tol collapse to one event at
    the plateau center.  min_prominence filters noise: a peak must rise at
    least that far above the lower of the valleys separating it from
    higher terrain on each side (symmetrically for minima).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 3:
        return []

    # collapse plateaus to representative samples (center index of each run)
    reps = [0]
    for i in range(1, times.size):
        if abs(values[i] - values[reps[-1]]) <= plateau_tol:
            continue
        reps.append(i)
    run_centers: list[int] = []
    for r in range(len(reps)):
        lo = reps[r]
        hi = reps[r + 1] - 1 if r + 1 < len(reps) else times.size - 1
        run_centers.append((lo + hi) // 2)
    rt = times[run_centers]
    rv = values[run_centers]

    events: list[Extremum] = []
    for j in range(1, len(run_centers) - 1):
        prev_v, this_v, next_v = rv[j - 1], rv[j], rv[j + 1]
        if not (np.isfinite(prev_v) and np.isfinite(this_v) and np.isfinite(next_v)):
            continue
        if this_v > prev_v and this_v > next_v:
            kind = ExtremumKind.MAXIMUM
        elif this_v < prev_v and this_v < next_v:
            kind = ExtremumKind.MINIMUM
        else:
            continue
        if min_prominence > 0.0 and _prominence(rv, j, kind) < min_prominence:
            continue
        t_ref, v_ref = _parabolic_refine(rt, rv, j)
        events.append(Extremum(t_ns=t_ref, value=v_ref, kind=kind))
    return events


def _prominence(values: np.ndarray, j: int, kind: ExtremumKind) -> float:
    """Topographic prominence of the extremum at index j in the sample series."""
    v = values if kind is ExtremumKind.MAXIMUM else -values
    peak = v[j]
    def side_base(indices) -> float:
        base = peak
        lowest = peak
        for i in indices:
            if v[i] > peak:
                return lowest
            lowest = min(lowest, v[i])
        return lowest
    left = side_base(range(j - 1, -1, -1))
    right = side_base(range(j + 1, len(v)))
    return peak - max(left, right)


def _parabolic_refine(times: np.ndarray, values: np.ndarray, j: int) -> tuple[float, float]:
    t0, t1, t2 = times[j - 1 : j + 2]
    v0, v1, v2 = values[j - 1 : j + 2]
    denom = v0 - 2.0 * v1 + v2
    if abs(denom) < 1e-300:
        return float(t1), float(v1)
    # uniform-step parabola through the three points
    h = 0.5 * (t2 - t0)
    shift = 0.5 * (v0 - v2) / denom
    shift = max(-1.0, min(1.0, shift))
    t_ref = t1 + shift * h
    v_ref = v1 - 0.25 * (v0 - v2) * shift
    return float(t_ref), float(v_ref)


def build_time_grid(
    t_max: float,
    dt: float = 0.02,
    dt_long: float = 2.0,
    dense_prefix: float = 50.0,
    long_threshold: float = 100.0,
) -> np.ndarray:
    """Default grids: uniform dt up to `long_threshold`, else a dense prefix plus coarse tail."""
    if t_max <= 0.0:
        raise InvalidParameterError(f"t_max must be positive, got {t_max}")
    if t_max <= long_threshold:
        n = int(round(t_max / dt))
        return np.linspace(0.0, n * dt, n + 1)
    n_dense = int(round(dense_prefix / dt))
    dense = np.linspace(0.0, n_dense * dt, n_dense + 1)
    n_coarse = int(math.ceil((t_max - dense_prefix) / dt_long))
    coarse = dense_prefix + dt_long * np.arange(1, n_coarse + 1)
    coarse = coarse[coarse <= t_max + 1e-9]
    return np.concatenate([dense, coarse])
