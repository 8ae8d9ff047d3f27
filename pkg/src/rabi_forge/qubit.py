"""Two-level algebra: Pauli operators, states, expectation values, SU(2) exponentials.

Basis ordering is ``(|e>, |g>)``: the excited state is the ``sigma_z = +1``
eigenvector, so ``(omega_a / 2) sigma_z`` puts ``|e>`` higher in energy and the
excited population is ``P_e = (1 + <sigma_z>) / 2``.

Operators and states are plain ``numpy`` complex arrays (``(2, 2)`` and
``(2,)``).  The helpers here validate them at the public boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, NonHermitianGenerator, NonHermitianObservable

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-10

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY = np.eye(2, dtype=complex)
SIGMA_X, SIGMA_Y, SIGMA_Z = _PAULI["x"], _PAULI["y"], _PAULI["z"]
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
for _m in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS):
    _m.flags.writeable = False

EXCITED = np.array([1, 0], dtype=complex)
GROUND = np.array([0, 1], dtype=complex)
EXCITED.flags.writeable = False
GROUND.flags.writeable = False


def pauli(axis: str) -> np.ndarray:
    """Return a fresh copy of the Pauli matrix for ``axis`` in ``{"x", "y", "z"}``."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None


def ladder(sign: str) -> np.ndarray:
    """Raising (``"plus"``) or lowering (``"minus"``) operator, ``(sigma_x +/- i sigma_y) / 2``."""
    if sign == "plus":
        return SIGMA_PLUS.copy()
    if sign == "minus":
        return SIGMA_MINUS.copy()
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Hermiticity relative to the largest entry: ``max|A - A^dag| <= tol * max|A|``."""
    a = np.asarray(a)
    scale = np.max(np.abs(a)) if a.size else 0.0
    return bool(np.max(np.abs(a - dagger(a))) <= tol * max(scale, np.finfo(float).tiny))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(dagger(u) @ u - IDENTITY)) <= tol)


def pure_state(amp_g: complex, amp_e: complex) -> np.ndarray:
    """Build a normalized pure state from ground/excited amplitudes.

    Raises :class:`InvalidState` for non-finite amplitudes or a norm off by
    more than ``1e-10``.
    """
    psi = np.array([amp_e, amp_g], dtype=complex)
    if not np.all(np.isfinite(psi)):
        raise InvalidState("state amplitudes must be finite")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > NORM_TOL:
        raise InvalidState(f"state norm is {norm!r}, expected 1")
    return psi


def density_matrix(rho) -> np.ndarray:
    """Validate a 2x2 density matrix (Hermitian, unit trace, PSD to tolerance)."""
    rho = np.array(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidState(f"density matrix must be 2x2, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidState("density matrix entries must be finite")
    if np.max(np.abs(rho - dagger(rho))) > 1e-10:
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise InvalidState(f"density matrix trace is {np.trace(rho)!r}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-9:
        raise InvalidState("density matrix has a negative eigenvalue")
    return rho


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def expectation(state: np.ndarray, obs: np.ndarray) -> float:
    """``<psi|A|psi>`` for a pure state or ``tr(rho A)`` for a density matrix."""
    obs = np.asarray(obs, dtype=complex)
    if not is_hermitian(obs):
        raise NonHermitianObservable("observable is not Hermitian")
    state = np.asarray(state, dtype=complex)
    if state.shape == (2,):
        value = np.vdot(state, obs @ state)
    elif state.shape == (2, 2):
        value = np.trace(state @ obs)
    else:
        raise InvalidState(f"expected a (2,) pure state or (2, 2) density matrix, got {state.shape}")
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise NonHermitianObservable(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        comps = (self.x, self.y, self.z)
        if not all(np.isfinite(c) for c in comps):
            raise InvalidState("Bloch components must be finite")
        if any(abs(c) > 1 + 1e-9 for c in comps):
            raise InvalidState(f"Bloch component outside [-1, 1]: {comps}")
        if self.x**2 + self.y**2 + self.z**2 > 1 + 1e-8:
            raise InvalidState(f"Bloch vector outside the unit ball: {comps}")

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


def bloch_vector(state: np.ndarray) -> BlochVector:
    return BlochVector(*(expectation(state, p) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)))


def excited_population(state: np.ndarray) -> float:
    return 0.5 * (1.0 + expectation(state, SIGMA_Z))


def pauli_components(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Split a Hermitian 2x2 matrix as ``a I + b . sigma``; returns ``(a, b)``."""
    h = np.asarray(h, dtype=complex)
    a = 0.5 * (h[0, 0] + h[1, 1]).real
    b = np.array([h[1, 0].real, h[1, 0].imag, 0.5 * (h[0, 0] - h[1, 1]).real])
    return a, b


def matrix_exp_su2(h: np.ndarray, t: float) -> np.ndarray:
    """Closed-form ``exp(-i H t)`` for a time-independent Hermitian 2x2 ``H`` (rad/s).

    With ``H = a I + |b| n.sigma`` the result is
    ``exp(-i a t) [cos(|b| t) I - i sin(|b| t) n.sigma]``.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2) or not is_hermitian(h):
        raise NonHermitianGenerator("generator must be a Hermitian 2x2 matrix")
    a, b = pauli_components(h)
    theta = np.linalg.norm(b) * t
    # sin(theta)/|b| stays finite as |b| -> 0
    n_sigma = b[0] * SIGMA_X + b[1] * SIGMA_Y + b[2] * SIGMA_Z
    sinc = t * np.sinc(theta / np.pi)
    u = np.cos(theta) * IDENTITY - 1j * sinc * n_sigma
    return np.exp(-1j * a * t) * u
