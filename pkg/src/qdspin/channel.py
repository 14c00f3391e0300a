"""Single-dot decoherence channel of the uniform-coupling hyperfine model.

The electron couples identically (alpha = A/N) to N bath spins, so the
Hamiltonian is block diagonal in the conserved total z projection: each
2x2 block spans |up, m> and |down, m+1> of the collective bath spin.
Diagonalizing a block gives the survival amplitudes and the in-block flip
probability; averaging them over the infinite-temperature bath yields the
channel pair
    p(t)  occupation-transfer (flip) probability,
    c(t)  coherence multiplier,
which completely determine the qubit map (complete positivity reads
|c| <= 1 - p).

Bath statistics in the large-N limit: the polarization m is Gaussian with
variance sigma^2 = N I(I+1)/3 (Gauss-Hermite nodes) and the transverse
invariant Q is exponential with mean 2 sigma^2 (Gauss-Laguerre nodes);
the flip-flop strength of a block is j(j+1) - m(m+1) = Q - m.  The
bra-side block of the coherence average sits at polarization m-1 inside
the same multiplet, so its strength is Q + m (exact difference 2m).
Sharing the multiplet invariant keeps the two block frequencies exactly
degenerate at zero field, which the zero-field Werner-form identities
rely on.

Long times: the e^{+-i(w+w')t} interference terms decay on the dephasing
scale (a ~2e-5 remnant from near-frozen low-frequency blocks persists,
measured directly), while the quadrature resolves their phase only up to
a Nyquist window set by the largest frequency step between adjacent nodes
on either grid axis.  Past 0.8x that window the fast terms are dropped,
leaving the slow difference terms whose phase is exactly resolved at
every time.  This keeps the channel accurate over the whole validity
window with node counts linear in t_max; the handoff error is the tiny
remnant above, far below every tolerance used downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import roots_hermite, roots_laguerre

from .constants import (
    DotParameters,
    QdspinError,
    ValidityWindowError,
)

DEGENERATE_BLOCK_E2 = 1e-30      # ueV^2; below this a block acts as identity
CP_MARGIN_SOFT = 1e-6            # trajectory invariant |c| <= 1 - p + soft margin
CP_MARGIN_HARD = 1e-4            # beyond this the quadrature is under-resolved
VALIDITY_GRACE = 1.05            # hbar*N/A is an estimate; allow 5% on top
MIN_M_NODES = 257
MIN_Q_NODES = 64
_MIN_BATH_NUCLEI = 100           # Gaussian bath statistics need a large bath


class QuadratureResolutionError(QdspinError, ArithmeticError):
    """The bath quadrature cannot resolve the requested evolution."""


@dataclass(frozen=True)
class BlockAmplitudes:
    """Survival amplitudes and flip probability of one 2x2 block."""

    a_amp: complex
    d_amp: complex
    f_prob: float


def block_amplitudes(
    delta: float,
    v_coupling: float,
    t_ns: float,
    hbar: float = 0.6582119569,
    mean_energy: float = 0.0,
) -> BlockAmplitudes:
    """Exact evolution of the block Hamiltonian delta*sz + V*sx over time t.

    a_amp = <up,m|U|up,m>, d_amp = <down,m+1|U|down,m+1>, f_prob the
    in-block flip probability.  The block mean energy (-alpha/4, identical
    for every block) is dropped by default; pass mean_energy to retain it,
    which changes no bath-averaged observable.
    """
    e2 = delta * delta + v_coupling * v_coupling
    if e2 < DEGENERATE_BLOCK_E2:
        return BlockAmplitudes(1.0 + 0.0j, 1.0 + 0.0j, 0.0)
    e = math.sqrt(e2)
    omega = e / hbar
    cos_t = math.cos(omega * t_ns)
    sin_t = math.sin(omega * t_ns)
    s = delta / e
    a_amp = complex(cos_t, -s * sin_t)
    d_amp = complex(cos_t, +s * sin_t)
    f_prob = (v_coupling * v_coupling / e2) * sin_t * sin_t
    if mean_energy != 0.0:
        phase = complex(math.cos(mean_energy * t_ns / hbar), -math.sin(mean_energy * t_ns / hbar))
        a_amp *= phase
        d_amp *= phase
    return BlockAmplitudes(a_amp, d_amp, f_prob)


@dataclass(frozen=True)
class BathQuadrature:
    """Normalized quadrature over the infinite-temperature bath.

    m_nodes/m_weights sample the Gaussian polarization, q_nodes/q_weights
    the exponential transverse invariant.  t_resolved_ns is the largest
    time at which the fastest interference phase is still Nyquist-resolved
    by the m grid.
    """

    m_nodes: np.ndarray
    m_weights: np.ndarray
    q_nodes: np.ndarray
    q_weights: np.ndarray
    sigma_m: float
    t_max_ns: float
    t_resolved_ns: float

    def __post_init__(self) -> None:
        for name in ("m_weights", "q_weights"):
            w = getattr(self, name)
            if abs(float(w.sum()) - 1.0) > 1e-9:
                raise QuadratureResolutionError(f"{name} must sum to 1, got {w.sum()!r}")
        if np.any(self.q_nodes <= 0.0):
            raise QuadratureResolutionError("all q_nodes must be positive")


def node_count_rule(dot: DotParameters, t_max_ns: float) -> tuple[int, int]:
    """Minimum node counts resolving the e^{-i alpha m t / hbar} phase at t_max."""
    hbar = dot.constants.hbar
    n_m = max(MIN_M_NODES, math.ceil(8.0 * dot.sigma_m * dot.alpha * t_max_ns / (2.0 * math.pi * hbar)))
    return n_m, MIN_Q_NODES


def build_quadrature(
    dot: DotParameters,
    t_max_ns: float,
    m_count: int | None = None,
    q_count: int | None = None,
) -> BathQuadrature:
    """Gauss-Hermite x Gauss-Laguerre bath quadrature sized for t_max."""
    if t_max_ns < 0.0:
        raise ValidityWindowError(f"t_max must be nonnegative, got {t_max_ns}")
    window = VALIDITY_GRACE * dot.validity_window_ns
    if t_max_ns > window:
        raise ValidityWindowError(
            f"t_max={t_max_ns:g} ns exceeds the box-model validity window "
            f"~{dot.validity_window_ns:g} ns (hbar*N/A)"
        )
    if dot.n_nuclei < _MIN_BATH_NUCLEI:
        raise ValidityWindowError(
            f"Gaussian bath statistics require N >= {_MIN_BATH_NUCLEI}, got {dot.n_nuclei:g}"
        )
    n_m_min, n_q_min = node_count_rule(dot, t_max_ns)
    n_m = n_m_min if m_count is None else int(m_count)
    n_q = n_q_min if q_count is None else int(q_count)
    if n_m < 3 or n_q < 3:
        raise QuadratureResolutionError(f"node counts too small: m={n_m}, q={n_q}")

    sigma = dot.sigma_m
    x, wx = roots_hermite(n_m)            # weight e^{-x^2}; m = sqrt(2) sigma x
    m_nodes = math.sqrt(2.0) * sigma * x
    m_weights = wx / wx.sum()
    y, wy = roots_laguerre(n_q)           # weight e^{-y}; Q = 2 sigma^2 y
    q_nodes = 2.0 * sigma * sigma * y
    q_weights = wy / wy.sum()

    # largest m spacing inside the Gaussian bulk fixes the resolved window
    bulk = m_nodes[np.abs(m_nodes) <= 4.0 * sigma]
    if bulk.size < 2:
        bulk = m_nodes
    dm_max = float(np.diff(np.sort(bulk)).max())
    t_resolved = math.pi * dot.constants.hbar / (dot.alpha * dm_max)

    return BathQuadrature(
        m_nodes=m_nodes,
        m_weights=m_weights,
        q_nodes=q_nodes,
        q_weights=q_weights,
        sigma_m=sigma,
        t_max_ns=float(t_max_ns),
        t_resolved_ns=t_resolved,
    )


@dataclass
class ChannelTrajectory:
    """Time series of the single-dot channel pair {p(t), c(t)}."""

    times: np.ndarray
    p: np.ndarray
    c: np.ndarray
    dot: DotParameters
    m_count: int = 0
    q_count: int = 0
    fast_term_cutoff_ns: float = math.inf

    def validate_invariants(self, cp_margin: float = CP_MARGIN_SOFT) -> None:
        if self.times.size and self.times[0] == 0.0:
            if abs(self.p[0]) > 1e-12 or abs(self.c[0] - 1.0) > 1e-12:
                raise QuadratureResolutionError(
                    f"channel must start at (p, c) = (0, 1); got ({self.p[0]}, {self.c[0]})"
                )
        if np.any(self.p < -1e-12) or np.any(self.p > 1.0 + 1e-12):
            raise QuadratureResolutionError("flip probability left [0, 1]")
        margin = 1.0 - self.p - np.abs(self.c)
        worst = float(margin.min()) if margin.size else 0.0
        if worst < -cp_margin:
            t_bad = float(self.times[int(np.argmin(margin))])
            raise QuadratureResolutionError(
                f"complete positivity violated by {-worst:.3e} at t={t_bad:g} ns"
            )

    def to_csv(self, path: str | Path, header_lines: list[str] | None = None) -> None:
        lines = [f"# {h}" for h in (header_lines or [])]
        lines.append("t_ns,p,c_re,c_im")
        for t, pv, cv in zip(self.times, self.p, self.c):
            lines.append(f"{t:.17g},{pv:.17g},{cv.real:.17g},{cv.imag:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class CpReport:
    """Physicality audit of a channel trajectory (report-only)."""

    ok: bool
    worst_margin: float
    worst_time_ns: float
    p_min: float
    p_max: float


def verify_channel_cp(traj: ChannelTrajectory, eps: float = 1e-12) -> CpReport:
    """Per-time check 0 <= p <= 1 and |c| <= 1 - p; returns the worst margin.

    `eps` absorbs float round-off (c(0) carries the weight-normalization
    epsilon); the raw worst margin is always reported.
    """
    margin = 1.0 - traj.p - np.abs(traj.c)
    idx = int(np.argmin(margin)) if margin.size else 0
    worst = float(margin[idx]) if margin.size else 1.0
    p_min = float(traj.p.min()) if traj.p.size else 0.0
    p_max = float(traj.p.max()) if traj.p.size else 0.0
    ok = worst >= -eps and p_min >= -eps and p_max <= 1.0 + eps
    return CpReport(
        ok=ok,
        worst_margin=worst,
        worst_time_ns=float(traj.times[idx]) if margin.size else 0.0,
        p_min=p_min,
        p_max=p_max,
    )


def _node_tables(dot: DotParameters, quad: BathQuadrature):
    """Per-node block data shared by every time point."""
    alpha = dot.alpha
    omega_z = dot.zeeman_energy
    hbar = dot.constants.hbar
    m = quad.m_nodes[:, None]
    q = quad.q_nodes[None, :]
    w2d = quad.m_weights[:, None] * quad.q_weights[None, :]

    delta_ket = 0.5 * (-omega_z + alpha * (m + 0.5))
    delta_bra = 0.5 * (-omega_z + alpha * (m - 0.5))
    # both blocks share the multiplet: j(j+1) - m(m+1) = Q -+ m in terms of
    # the transverse invariant Q, so their frequencies degenerate at B = 0
    v2 = np.clip(0.25 * alpha * alpha * (q - m), 0.0, None)
    v2_bra = np.clip(0.25 * alpha * alpha * (q + m), 0.0, None)

    e2_ket = delta_ket * delta_ket + v2
    e2_bra = delta_bra * delta_bra + v2_bra
    e_ket = np.sqrt(e2_ket)
    e_bra = np.sqrt(e2_bra)

    live_ket = e2_ket >= DEGENERATE_BLOCK_E2
    live_bra = e2_bra >= DEGENERATE_BLOCK_E2
    s_ket = np.where(live_ket, delta_ket / np.where(live_ket, e_ket, 1.0), 0.0)
    s_bra = np.where(live_bra, delta_bra / np.where(live_bra, e_bra, 1.0), 0.0)
    v_frac = np.where(live_ket, v2 / np.where(live_ket, e2_ket, 1.0), 0.0)

    w_ket = e_ket / hbar
    w_bra = e_bra / hbar
    # e_ket^2 - e_bra^2 = -Omega*alpha/2 exactly (same-multiplet sharing),
    # so the slow frequency difference is computed without cancellation
    esum = e_ket + e_bra
    w_diff = np.where(esum > 0.0, (-omega_z * alpha / 2.0) / (hbar * esum), 0.0)

    # Nyquist window of the interference phase (w_ket + w_bra) * t on the
    # actual grid: beyond pi / max-step the fast terms alias on one axis.
    w_fast = w_ket + w_bra
    m_bulk = quad.m_weights > 1e-16 * quad.m_weights.max()
    q_bulk = quad.q_weights > 1e-16 * quad.q_weights.max()
    sub = w_fast[np.ix_(m_bulk, q_bulk)]
    steps = [np.abs(np.diff(sub, axis=0)).max() if sub.shape[0] > 1 else 0.0,
             np.abs(np.diff(sub, axis=1)).max() if sub.shape[1] > 1 else 0.0]
    max_step = max(steps)
    t_fast_ok = math.pi / max_step if max_step > 0.0 else math.inf
    return w2d, s_ket, s_bra, v_frac, w_ket, w_bra, w_diff, t_fast_ok


def compute_channel(
    dot: DotParameters,
    times: np.ndarray,
    quad: BathQuadrature | None = None,
    fast_term_cutoff: float | None = None,
    time_chunk: int | None = None,
) -> ChannelTrajectory:
    """Bath-averaged channel {p(t), c(t)} on the given time grid.

    p(t) = E[f_prob] over ket-side blocks; c(t) = E[a_amp * conj(d_amp)]
    with the bra-side block at polarization m-1 in the same multiplet.
    Summation order over nodes is fixed, so results are independent of
    any worker or thread count.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0.0):
        raise ValidityWindowError("times must be nonnegative")
    t_max = float(times.max()) if times.size else 0.0
    if quad is None:
        quad = build_quadrature(dot, t_max)
    elif t_max > quad.t_max_ns * (1.0 + 1e-12):
        raise QuadratureResolutionError(
            f"quadrature built for t_max={quad.t_max_ns:g} ns, requested {t_max:g} ns"
        )

    w2d, s_ket, s_bra, v_frac, w_ket, w_bra, w_diff, t_fast_ok = _node_tables(dot, quad)
    cutoff = 0.8 * t_fast_ok if fast_term_cutoff is None else float(fast_term_cutoff)
    needs_slow = times.size and t_max > cutoff
    if needs_slow and cutoff < 5.0 * dot.dephasing_time_ns:
        raise QuadratureResolutionError(
            f"fast-term window {cutoff:.1f} ns does not cover the interference decay "
            f"(~5 dephasing times = {5.0 * dot.dephasing_time_ns:.1f} ns); raise the node counts"
        )
    ss = s_ket * s_bra
    slow_re_coef = 0.5 * (1.0 - ss)
    slow_im_coef = 0.5 * (s_bra - s_ket)
    p_slow = float(np.sum(w2d * 0.5 * v_frac))

    n_nodes = w2d.size
    if time_chunk is None:
        time_chunk = max(1, min(256, int(1e6 / max(1, n_nodes))))

    p_out = np.empty(times.size)
    c_out = np.empty(times.size, dtype=complex)

    fast_mask = times <= cutoff
    fast_idx = np.nonzero(fast_mask)[0]
    slow_idx = np.nonzero(~fast_mask)[0]

    for start in range(0, fast_idx.size, time_chunk):
        idx = fast_idx[start : start + time_chunk]
        t = times[idx][:, None, None]
        th_k = w_ket[None, :, :] * t
        th_b = w_bra[None, :, :] * t
        cos_k, sin_k = np.cos(th_k), np.sin(th_k)
        cos_b, sin_b = np.cos(th_b), np.sin(th_b)
        # a * conj(d'): both amplitudes carry the same dropped mean phase
        re = cos_k * cos_b - (s_ket * s_bra)[None, :, :] * sin_k * sin_b
        im = -(s_ket[None, :, :] * sin_k * cos_b + s_bra[None, :, :] * cos_k * sin_b)
        p_out[idx] = np.sum(w2d[None, :, :] * v_frac[None, :, :] * sin_k * sin_k, axis=(1, 2))
        c_out[idx] = np.sum(w2d[None, :, :] * (re + 1j * im), axis=(1, 2))

    for start in range(0, slow_idx.size, time_chunk):
        idx = slow_idx[start : start + time_chunk]
        t = times[idx][:, None, None]
        phase = w_diff[None, :, :] * t
        re = slow_re_coef[None, :, :] * np.cos(phase)
        im = slow_im_coef[None, :, :] * np.sin(phase)
        p_out[idx] = p_slow
        c_out[idx] = np.sum(w2d[None, :, :] * (re + 1j * im), axis=(1, 2))

    traj = ChannelTrajectory(
        times=times,
        p=p_out,
        c=c_out,
        dot=dot,
        m_count=quad.m_nodes.size,
        q_count=quad.q_nodes.size,
        fast_term_cutoff_ns=cutoff,
    )
    traj.validate_invariants(cp_margin=CP_MARGIN_HARD)
    return traj
