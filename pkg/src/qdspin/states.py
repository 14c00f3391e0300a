"""Two-qubit states: construction, validation, Bloch decomposition, diagnostics.

Density matrices are always stored in the computational product basis
|uu>, |ud>, |du>, |dd> with |0> = spin-up (parallel to the field).  The
`ordering` tag records in which basis arrangement the state exhibits the
Bell-diagonal X pattern
    diag(1/2 - a, a, a, 1/2 - a)  with inner anti-diagonal coherence b,
which differs between Psi-type and Phi-type initial states.  Every
correlation measure is ordering-independent; only the (a, b) pattern
extraction is not.
"""
from __future__ import annotations

import cmath
import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .constants import InvalidParameterError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL_CONSTRUCTION = 1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)
IDENTITY_2 = np.eye(2, dtype=complex)

# (sigma_i x 1), (1 x sigma_i) and (sigma_i x sigma_j) cached for fast traces
_SIG_A = [np.kron(s, IDENTITY_2) for s in PAULIS]
_SIG_B = [np.kron(IDENTITY_2, s) for s in PAULIS]
_SIG_AB = [[np.kron(si, sj) for sj in PAULIS] for si in PAULIS]


class Ordering(enum.Enum):
    """Basis arrangement in which a state shows the Bell-diagonal X pattern."""

    COMPUTATIONAL = "computational"  # |uu>, |ud>, |du>, |dd>
    PSI = "psi"                      # same arrangement; pattern of Psi-type states
    PHI = "phi"                      # |ud>, |uu>, |dd>, |du>; pattern of Phi-type states


_ORDERING_PERM = {
    Ordering.COMPUTATIONAL: (0, 1, 2, 3),
    Ordering.PSI: (0, 1, 2, 3),
    Ordering.PHI: (1, 0, 3, 2),
}


def validate_density_matrix(rho: np.ndarray, psd_tol: float = PSD_TOL_CONSTRUCTION) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return min eigenvalue array-free."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidParameterError(f"density matrix must be 4x4, got shape {rho.shape}")
    herm = float(np.abs(rho - rho.conj().T).max())
    if herm > HERMITICITY_TOL:
        raise InvalidParameterError(f"matrix not Hermitian: max asymmetry {herm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidParameterError(f"trace must be 1, got {tr:.15g}")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if min_eig < -psd_tol:
        raise InvalidParameterError(f"matrix not positive semidefinite: min eigenvalue {min_eig:.3e}")
    return rho


@dataclass(frozen=True)
class TwoQubitState:
    """Validated 4x4 density matrix plus its Bell-diagonal ordering tag."""

    rho: np.ndarray
    ordering: Ordering = Ordering.COMPUTATIONAL
    psd_tol: float = PSD_TOL_CONSTRUCTION

    def __post_init__(self) -> None:
        rho = validate_density_matrix(self.rho, psd_tol=self.psd_tol)
        rho = np.array(rho, dtype=complex, order="C")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho).min())


# ---------------------------------------------------------------------------
# state specifications
# ---------------------------------------------------------------------------

_BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")


@dataclass(frozen=True)
class Bell:
    kind: str = "psi-"

    def __post_init__(self) -> None:
        if self.kind not in _BELL_KINDS:
            raise InvalidParameterError(f"unknown Bell state {self.kind!r}; expected one of {_BELL_KINDS}")


@dataclass(frozen=True)
class Werner:
    """(1 - p) * maximally mixed + p * singlet; quantumly correlated for p > 0."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameterError(f"Werner mixing p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class EntFamily:
    """Maximally entangled family sqrt(a)|00> + sqrt(b)e^{ia}|10> + sqrt(b)e^{ib}|01> - sqrt(a)e^{i(a+b)}|11>.

    Unit norm forces a + b = 1/2; `b` may be omitted and is then derived.
    """

    a: float
    alpha: float = 0.0
    beta: float = 0.0
    b: float | None = None

    def __post_init__(self) -> None:
        b = 0.5 - self.a if self.b is None else self.b
        if self.a < -1e-15 or b < -1e-15:
            raise InvalidParameterError(f"amplitudes must be nonnegative: a={self.a}, b={b}")
        if abs(self.a + b - 0.5) > 1e-12:
            raise InvalidParameterError(f"normalization requires a + b = 1/2, got {self.a + b}")
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class PhaseFamily:
    """(|00> + |10> + |01> + e^{i gamma}|11>) / 2; separable at gamma = 0."""

    gamma: float


@dataclass(frozen=True)
class BellDiagonal:
    """X-pattern state diag(1/2-a, a, a, 1/2-a) with inner coherence b."""

    a: float
    b: complex

    def __post_init__(self) -> None:
        if not 0.0 <= self.a <= 0.5 + 1e-12:
            raise InvalidParameterError(f"diagonal weight a must lie in [0, 1/2], got {self.a}")
        if abs(self.b) > self.a + 1e-12:
            raise InvalidParameterError(
                f"positivity requires |b| <= a, got |b|={abs(self.b)} > a={self.a}"
            )


@dataclass(frozen=True)
class Raw:
    matrix: np.ndarray


StateSpec = Union[Bell, Werner, EntFamily, PhaseFamily, BellDiagonal, Raw]


def _ket_state(amplitudes: np.ndarray, ordering: Ordering) -> TwoQubitState:
    psi = np.asarray(amplitudes, dtype=complex)
    return TwoQubitState(np.outer(psi, psi.conj()), ordering)


def make_state(spec: StateSpec) -> TwoQubitState:
    """Construct a validated TwoQubitState from a specification."""
    if isinstance(spec, Bell):
        s = 1.0 / math.sqrt(2.0)
        kets = {
            "phi+": np.array([s, 0, 0, s]),
            "phi-": np.array([s, 0, 0, -s]),
            "psi+": np.array([0, s, s, 0]),
            "psi-": np.array([0, s, -s, 0]),
        }
        ordering = Ordering.PHI if spec.kind.startswith("phi") else Ordering.PSI
        return _ket_state(kets[spec.kind], ordering)
    if isinstance(spec, Werner):
        singlet = make_state(Bell("psi-")).rho
        rho = (1.0 - spec.p) * np.eye(4, dtype=complex) / 4.0 + spec.p * singlet
        return TwoQubitState(rho, Ordering.PSI)
    if isinstance(spec, EntFamily):
        ra, rb = math.sqrt(spec.a), math.sqrt(spec.b)
        psi = np.array(
            [
                ra,
                rb * cmath.exp(1j * spec.beta),
                rb * cmath.exp(1j * spec.alpha),
                -ra * cmath.exp(1j * (spec.alpha + spec.beta)),
            ]
        )
        return _ket_state(psi, Ordering.COMPUTATIONAL)
    if isinstance(spec, PhaseFamily):
        psi = 0.5 * np.array([1.0, 1.0, 1.0, cmath.exp(1j * spec.gamma)])
        return _ket_state(psi, Ordering.COMPUTATIONAL)
    if isinstance(spec, BellDiagonal):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = rho[3, 3] = 0.5 - spec.a
        rho[1, 1] = rho[2, 2] = spec.a
        rho[1, 2] = spec.b
        rho[2, 1] = np.conj(spec.b)
        return TwoQubitState(rho, Ordering.PSI)
    if isinstance(spec, Raw):
        return TwoQubitState(np.asarray(spec.matrix, dtype=complex), Ordering.COMPUTATIONAL)
    raise InvalidParameterError(f"unknown state specification {spec!r}")


# ---------------------------------------------------------------------------
# Bloch decomposition and diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors and correlation matrix of a two-qubit state."""

    x: np.ndarray
    y: np.ndarray
    t_corr: np.ndarray


def _re_trace(rho: np.ndarray, op: np.ndarray) -> float:
    # Tr[rho op] for Hermitian op; the transpose pairing avoids a matmul
    return float(np.real(np.sum(rho * op.T)))


def bloch_decompose(state: TwoQubitState | np.ndarray) -> BlochForm:
    """Return x_i = Tr[rho (s_i x 1)], y_i = Tr[rho (1 x s_i)], T_ij = Tr[rho (s_i x s_j)]."""
    rho = state.rho if isinstance(state, TwoQubitState) else np.asarray(state, dtype=complex)
    x = np.array([_re_trace(rho, op) for op in _SIG_A])
    y = np.array([_re_trace(rho, op) for op in _SIG_B])
    t_corr = np.array([[_re_trace(rho, _SIG_AB[i][j]) for j in range(3)] for i in range(3)])
    return BlochForm(x, y, t_corr)


def bloch_reconstruct(form: BlochForm) -> np.ndarray:
    """Inverse of bloch_decompose."""
    rho = np.eye(4, dtype=complex)
    for i in range(3):
        rho += form.x[i] * _SIG_A[i] + form.y[i] * _SIG_B[i]
        for j in range(3):
            rho += form.t_corr[i, j] * _SIG_AB[i][j]
    return rho / 4.0


def purity(state: TwoQubitState | np.ndarray) -> float:
    """Tr rho^2, in [1/4, 1].  Equals the squared Frobenius norm for Hermitian rho."""
    rho = state.rho if isinstance(state, TwoQubitState) else np.asarray(state, dtype=complex)
    return float(np.sum(np.abs(rho) ** 2))


_SQRT_HALF = 1.0 / math.sqrt(2.0)
_KET_T0 = np.array([0.0, _SQRT_HALF, _SQRT_HALF, 0.0], dtype=complex)
_KET_S0 = np.array([0.0, _SQRT_HALF, -_SQRT_HALF, 0.0], dtype=complex)


def singlet_triplet_weights(state: TwoQubitState) -> tuple[float, float, float, float]:
    """Projector weights (w_Tm1, w_T0, w_Tp1, w_S0) in the total-spin basis.

    T+1 = |uu>, T-1 = |dd>, T0/S0 the symmetric/antisymmetric combinations
    of |ud>, |du>.  The four weights always sum to Tr rho = 1.
    """
    rho = state.rho
    w_tp1 = float(np.real(rho[0, 0]))
    w_tm1 = float(np.real(rho[3, 3]))
    w_t0 = float(np.real(_KET_T0.conj() @ rho @ _KET_T0))
    w_s0 = float(np.real(_KET_S0.conj() @ rho @ _KET_S0))
    return (w_tm1, w_t0, w_tp1, w_s0)


@dataclass(frozen=True)
class BellDiagonalParams:
    a: float
    b: complex


def bell_diagonal_params(
    state: TwoQubitState, pattern_tol: float = 1e-10
) -> BellDiagonalParams | None:
    """Extract (a, b) if the state matches the Bell-diagonal X pattern.

    The pattern is checked in the basis arrangement named by the state's
    ordering tag.  Returns None when the state is not of that form
    (not-of-form is a value, not an error).
    """
    perm = _ORDERING_PERM[state.ordering]
    rho = state.rho[np.ix_(perm, perm)]
    diag = np.real(np.diag(rho))
    a = 0.5 * (diag[1] + diag[2])
    outer = 0.5 * (diag[0] + diag[3])
    b = complex(rho[1, 2])
    pattern = np.zeros((4, 4), dtype=complex)
    pattern[0, 0] = pattern[3, 3] = outer
    pattern[1, 1] = pattern[2, 2] = a
    pattern[1, 2] = b
    pattern[2, 1] = np.conj(b)
    if np.abs(rho - pattern).max() > pattern_tol:
        return None
    if abs(outer - (0.5 - a)) > pattern_tol:
        return None
    return BellDiagonalParams(a=float(a), b=b)


# ---------------------------------------------------------------------------
# raw-state I/O (16 complex entries, row-major)
# ---------------------------------------------------------------------------


def raw_state_from_json(text: str) -> TwoQubitState:
    """Parse a JSON 4x4 array of [re, im] pairs."""
    data = json.loads(text)
    rho = np.empty((4, 4), dtype=complex)
    try:
        for i in range(4):
            for j in range(4):
                re, im = data[i][j]
                rho[i, j] = complex(re, im)
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise InvalidParameterError(f"malformed raw-state JSON: {exc}") from exc
    return make_state(Raw(rho))


def raw_state_from_csv(text: str) -> TwoQubitState:
    """Parse CSV (re, im) pairs, 16 entries row-major (any row grouping)."""
    values: list[float] = []
    for row in csv.reader(io.StringIO(text)):
        values.extend(float(cell) for cell in row if cell.strip() != "")
    if len(values) != 32:
        raise InvalidParameterError(f"raw-state CSV must hold 32 numbers (16 re/im pairs), got {len(values)}")
    flat = np.asarray(values).reshape(16, 2)
    rho = (flat[:, 0] + 1j * flat[:, 1]).reshape(4, 4)
    return make_state(Raw(rho))


def load_raw_state(path: str | Path) -> TwoQubitState:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return raw_state_from_json(text)
    return raw_state_from_csv(text)
