"""Balanced multipartite entangled coherent states and their qubit pictures.

The balanced MECS on N modes is

    N_c (|alpha>^{⊗N} + e^{i theta} |-alpha>^{⊗N}),
    N_c = (2 + 2 p^N cos theta)^{-1/2},   p = exp(-2|alpha|^2).

In the orthonormal pair ``|0> = |alpha>``, ``|1> = (|-alpha> - p|alpha>)/M``
the same state is an N-qubit vector. Party 1 is the most significant bit of
the basis index throughout the package.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .coherent import MultimodeSuperposition, alpha_from_p, ortho_basis, overlap_p
from .errors import DomainError, NullStateError, ValidationError

NORM_ATOL = 1e-12
_NULL_TOL = 1e-300


@dataclass(frozen=True)
class MecsSpec:
    """Parameters ``(alpha or p, theta, N)`` of a balanced MECS.

    Give exactly one of ``alpha`` and ``p``. When only ``p`` is known the
    coherent representation uses the real amplitude ``sqrt(-ln(p)/2)``.
    """

    parties: int
    theta: float
    alpha: complex | None = None
    p: float | None = None

    def __post_init__(self):
        if (self.alpha is None) == (self.p is None):
            raise DomainError("give exactly one of alpha and p")
        if int(self.parties) != self.parties or self.parties < 2:
            raise DomainError(f"need N >= 2 parties, got {self.parties}")
        if not math.isfinite(self.theta):
            raise DomainError("theta must be finite")
        if self.alpha is not None:
            a = complex(self.alpha)
            if not cmath.isfinite(a):
                raise DomainError("alpha must be finite")
            object.__setattr__(self, "alpha", a)
        else:
            p = float(self.p)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"overlap p must lie in [0, 1], got {p}")
            object.__setattr__(self, "p", p)
        object.__setattr__(self, "parties", int(self.parties))

    @classmethod
    def from_alpha(cls, alpha: complex, theta: float, parties: int) -> "MecsSpec":
        return cls(parties=parties, theta=theta, alpha=alpha)

    @classmethod
    def from_p(cls, p: float, theta: float, parties: int) -> "MecsSpec":
        return cls(parties=parties, theta=theta, p=p)

    @property
    def overlap(self) -> float:
        """The real overlap ``p = <-alpha|alpha>``."""
        if self.p is not None:
            return self.p
        return overlap_p(self.alpha)

    @property
    def amplitude(self) -> complex:
        if self.alpha is not None:
            return self.alpha
        return complex(alpha_from_p(self.p))

    def norm_denominator(self) -> float:
        """``2 + 2 p^N cos(theta)``, the squared inverse normalization."""
        return 2.0 + 2.0 * self.overlap**self.parties * math.cos(self.theta)

    def is_null(self) -> bool:
        return self.norm_denominator() <= _NULL_TOL

    @property
    def normalization(self) -> float:
        d = self.norm_denominator()
        if d <= _NULL_TOL:
            raise NullStateError("p = 1 with theta = pi gives the zero vector")
        return d**-0.5


@dataclass(frozen=True, eq=False)
class QubitState:
    """Normalized pure state of N qubits, amplitudes indexed with party 1 as MSB."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = amps.shape[0]
        if n < 2 or n & (n - 1):
            raise ValidationError(f"length {n} is not a power of two >= 2")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_ATOL:
            raise ValidationError(f"state is not normalized (norm {nrm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalize(cls, amplitudes) -> "QubitState":
        amps = np.asarray(amplitudes, dtype=complex)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise NullStateError("zero vector")
        return cls(amps / nrm)

    @property
    def parties(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.parties)

    def fidelity(self, other: "QubitState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def build_mecs(spec: MecsSpec) -> MultimodeSuperposition:
    """Two-term coherent representation of the MECS with the right normalization."""
    nc = spec.normalization
    a = spec.amplitude
    n = spec.parties
    return MultimodeSuperposition(
        np.array([nc, nc * cmath.exp(1j * spec.theta)]),
        np.array([[a] * n, [-a] * n]),
    )


def _branch_vectors(p: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``|0...0>`` and ``(M|1> + p|0>)^{⊗N}`` as 2^N vectors."""
    basis = ortho_basis(p)
    zero = np.zeros(2**n, dtype=complex)
    zero[0] = 1.0
    minus = reduce(np.kron, [basis.minus_alpha.astype(complex)] * n)
    return zero, minus


def embed_as_qubits(spec: MecsSpec) -> QubitState:
    """The MECS written in the orthonormal pair, one qubit per mode.

    Raises :class:`~mecs.errors.DegenerateBasisError` for ``p = 1``.
    """
    zero, minus = _branch_vectors(spec.overlap, spec.parties)
    vec = spec.normalization * (zero + cmath.exp(1j * spec.theta) * minus)
    # renormalize away the last-bit rounding; the analytic norm is exactly one
    return QubitState(vec / np.linalg.norm(vec))


def ghz_state(n: int, theta: float = 0.0) -> QubitState:
    """``(|0...0> + e^{i theta}|1...1>) / sqrt(2)``."""
    if n < 2:
        raise DomainError(f"GHZ state needs N >= 2, got {n}")
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = 1.0
    vec[-1] = cmath.exp(1j * theta)
    return QubitState(vec / math.sqrt(2.0))


def w_state(n: int) -> QubitState:
    """Uniform superposition of the N single-excitation basis states."""
    if n < 2:
        raise DomainError(f"W state needs N >= 2, got {n}")
    vec = np.zeros(2**n, dtype=complex)
    for k in range(n):
        vec[1 << k] = 1.0
    return QubitState(vec / math.sqrt(n))


def apply_local(psi: np.ndarray, op: np.ndarray, party: int, n: int) -> np.ndarray:
    """Apply a 2x2 operator to one party (0-based) of an N-qubit vector."""
    t = np.asarray(psi, dtype=complex).reshape((2,) * n)
    t = np.tensordot(op, t, axes=([1], [party]))
    return np.moveaxis(t, 0, party).reshape(-1)


def reduced_density_matrix(psi: np.ndarray, keep: list[int] | tuple[int, ...], n: int) -> np.ndarray:
    """Partial trace of ``|psi><psi|`` onto the listed parties (0-based, kept in order)."""
    keep = list(keep)
    rest = [k for k in range(n) if k not in keep]
    t = np.asarray(psi, dtype=complex).reshape((2,) * n)
    t = np.transpose(t, keep + rest).reshape(2 ** len(keep), -1)
    return t @ t.conj().T
