"""Entanglement swapping from ion electronic states onto vibrational modes.

Each ion i starts in ``2^{-1/2} |alpha>_i (|0>_i + |1>_i)`` and evolves under
``g a_i^dagger a_i sigma_{iz}`` for the scaled time ``tau = g t`` into

    2^{-1/2} (|alpha e^{i tau}> |0> + |alpha e^{-i tau}> |1>).

The interaction picture solution is exact, so evolution is a phase rotation
of the coherent labels. A hybrid state is kept as a list of
``(electronic basis index, vibrational superposition)`` branches; projecting
the electronic part onto a GHZ-type basis state leaves a MECS on the modes.

The module also checks the conditional-displacement construction of a CNOT
gate numerically, in a truncated Fock space.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .coherent import MultimodeSuperposition, inner_product
from .errors import DomainError, NullStateError, TruncationError, ValidationError
from .states import MecsSpec, build_mecs

HYBRID_NORM_ATOL = 1e-12
#: Outcomes with probability below this are reported as impossible.
ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True)
class ProtocolParams:
    alpha: complex
    tau: float
    parties: int

    def __post_init__(self):
        a = complex(self.alpha)
        if not (cmath.isfinite(a) and math.isfinite(self.tau)):
            raise DomainError("alpha and tau must be finite")
        if self.parties < 1:
            raise DomainError(f"need at least one party, got {self.parties}")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True, eq=False)
class HybridState:
    """``sum_b |b>_electronic ⊗ |branch_b>_vibrational`` with distinct indices b."""

    parties: int
    branches: tuple[tuple[int, MultimodeSuperposition], ...]

    def __post_init__(self):
        seen = set()
        for idx, branch in self.branches:
            if not 0 <= idx < 2**self.parties:
                raise ValidationError(f"electronic index {idx} out of range")
            if idx in seen:
                raise ValidationError(f"electronic index {idx} repeated")
            if branch.modes != self.parties:
                raise ValidationError("each ion must be paired with one mode")
            seen.add(idx)

    def norm_squared(self) -> float:
        return sum(inner_product(b, b).real for _, b in self.branches)

    def branch(self, index: int) -> MultimodeSuperposition | None:
        for idx, b in self.branches:
            if idx == index:
                return b
        return None


def _label(alpha: complex, tau: float, bit: int) -> complex:
    # electronic |0> rotates the mode by e^{+i tau}, |1> by e^{-i tau}
    return alpha * cmath.exp(1j * tau * (1 - 2 * bit))


def evolve_single(params: ProtocolParams, i: int = 0) -> HybridState:
    """One ion and its mode after time tau: two branches of weight 2^{-1/2}."""
    if not 0 <= i < params.parties:
        raise DomainError(f"party index {i} outside 0..{params.parties - 1}")
    w = 2.0**-0.5
    return HybridState(
        1,
        tuple(
            (bit, MultimodeSuperposition.product([_label(params.alpha, params.tau, bit)], w))
            for bit in (0, 1)
        ),
    )


def _bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def product_state(params: ProtocolParams) -> HybridState:
    """N independently evolved ion-mode pairs; 2^N branches of weight 2^{-N/2}."""
    n = params.parties
    if n < 2:
        raise DomainError(f"product state needs N >= 2, got {n}")
    w = 2.0 ** (-n / 2)
    branches = []
    for idx in range(2**n):
        labels = [_label(params.alpha, params.tau, b) for b in _bits(idx, n)]
        branches.append((idx, MultimodeSuperposition.product(labels, w)))
    return HybridState(n, tuple(branches))


@dataclass(frozen=True)
class GeneralizedBellOutcome:
    """``2^{-1/2}(|i_1...i_N> + sign |~i_1...~i_N>)`` with ``i_1 = 0``."""

    pattern: str
    sign: int = 1

    def __post_init__(self):
        if not self.pattern or set(self.pattern) - {"0", "1"}:
            raise DomainError(f"pattern must be a bit string, got {self.pattern!r}")
        if self.pattern[0] != "0":
            raise DomainError("first bit must be 0; use GeneralizedBellOutcome.canonical")
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")

    @classmethod
    def canonical(cls, pattern: str, sign: int | str = 1) -> "GeneralizedBellOutcome":
        """Accept any pattern; a leading 1 is replaced by the complement (same state up to phase)."""
        if isinstance(sign, str):
            sign = {"+": 1, "-": -1}[sign]
        if pattern.startswith("1"):
            pattern = "".join("1" if c == "0" else "0" for c in pattern)
        return cls(pattern, sign)

    @property
    def parties(self) -> int:
        return len(self.pattern)

    @property
    def index(self) -> int:
        return int(self.pattern, 2)

    @property
    def complement_index(self) -> int:
        return self.index ^ (2**self.parties - 1)

    def vector(self) -> np.ndarray:
        v = np.zeros(2**self.parties, dtype=complex)
        v[self.index] = 2.0**-0.5
        v[self.complement_index] = self.sign * 2.0**-0.5
        return v

    def __str__(self) -> str:
        return f"{self.pattern}{'+' if self.sign > 0 else '-'}"


def all_outcomes(n: int) -> list[GeneralizedBellOutcome]:
    """The 2^N basis states, each counted once."""
    return [
        GeneralizedBellOutcome("0" + "".join(rest), sign)
        for rest in itertools.product("01", repeat=n - 1)
        for sign in (1, -1)
    ]


@dataclass(frozen=True, eq=False)
class BellResult:
    outcome: GeneralizedBellOutcome
    probability: float
    collapsed: MultimodeSuperposition | None

    @property
    def possible(self) -> bool:
        return self.collapsed is not None


def bell_measure(state: HybridState, outcome: GeneralizedBellOutcome) -> BellResult:
    """Project the electronic part onto ``outcome``; returns probability and normalized mode state."""
    if outcome.parties != state.parties:
        raise DomainError(f"{outcome.parties}-bit outcome for a {state.parties}-party state")
    if abs(state.norm_squared() - 1.0) > HYBRID_NORM_ATOL:
        raise ValidationError("hybrid state is not normalized")
    bra = outcome.vector()
    parts = [b.scaled(np.conj(bra[idx])) for idx, b in state.branches if bra[idx] != 0]
    if not parts:
        return BellResult(outcome, 0.0, None)
    try:
        projected = reduce(lambda x, y: x + y, parts).canonicalize()
    except NullStateError:
        return BellResult(outcome, 0.0, None)
    prob = inner_product(projected, projected).real
    if prob < ZERO_PROBABILITY:
        return BellResult(outcome, max(prob, 0.0), None)
    return BellResult(outcome, prob, projected.scaled(1.0 / math.sqrt(prob)))


def outcome_distribution(state: HybridState) -> list[BellResult]:
    return [bell_measure(state, o) for o in all_outcomes(state.parties)]


def sample_outcome(state: HybridState, rng: np.random.Generator) -> BellResult:
    """Draw one measurement result with the Born-rule probabilities."""
    results = outcome_distribution(state)
    probs = np.array([r.probability for r in results])
    pick = rng.choice(len(results), p=probs / probs.sum())
    return results[int(pick)]


def swap_end_to_end(params: ProtocolParams, outcome: GeneralizedBellOutcome) -> float:
    """Fidelity of the swapped mode state with the analytic MECS at tau = pi/2.

    The all-zeros pattern with sign +/- should give the MECS with amplitude
    ``i alpha`` and phase 0/pi.
    """
    if abs(params.tau - math.pi / 2) > 1e-12:
        raise DomainError("the end-to-end check is defined at tau = pi/2")
    if set(outcome.pattern) != {"0"}:
        raise DomainError("the end-to-end check uses the all-zeros pattern")
    result = bell_measure(product_state(params), outcome)
    if not result.possible:
        raise NullStateError(f"outcome {outcome} has zero probability")
    theta = 0.0 if outcome.sign > 0 else math.pi
    target = build_mecs(MecsSpec.from_alpha(1j * params.alpha, theta, params.parties))
    return abs(inner_product(target, result.collapsed)) ** 2


# -- disentangling gate ----------------------------------------------------------

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def _single(op: np.ndarray, party: int, n: int) -> np.ndarray:
    mats = [np.eye(2)] * n
    mats[party] = op
    return reduce(np.kron, mats)


def cnot(control: int, target: int, n: int) -> np.ndarray:
    """CNOT on N qubits as a permutation matrix (0-based parties, party 0 is MSB)."""
    if control == target:
        raise DomainError("control and target must differ")
    dim = 2**n
    u = np.zeros((dim, dim))
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    for idx in range(dim):
        u[idx ^ tbit if idx & cbit else idx, idx] = 1.0
    return u


def gate_g(n: int) -> np.ndarray:
    """``H_1 CN_{1N} ... CN_{13} CN_{12}``: maps each basis state of ``all_outcomes`` to a product state."""
    if n < 2:
        raise DomainError(f"gate G needs N >= 2, got {n}")
    g = np.eye(2**n)
    for target in range(1, n):
        g = cnot(0, target, n) @ g
    return _single(HADAMARD, 0, n) @ g


def gate_outcome_map(n: int) -> dict[int, GeneralizedBellOutcome]:
    """Computational readout index after G for each generalized Bell state."""
    g = gate_g(n)
    table = {}
    for o in all_outcomes(n):
        out = g @ o.vector()
        j = int(np.argmax(np.abs(out)))
        if abs(abs(out[j]) - 1.0) > 1e-12:
            raise ValidationError(f"G does not map {o} to a product state")
        if j in table:
            raise ValidationError(f"outcomes {table[j]} and {o} collide")
        table[j] = o
    return table


# -- conditional-displacement CNOT -------------------------------------------------


@dataclass(frozen=True)
class CnotParams:
    kx: float
    kp: float
    cutoff: int = 64

    def __post_init__(self):
        if self.cutoff < MIN_CUTOFF:
            raise TruncationError(f"cutoff {self.cutoff} is below the minimum {MIN_CUTOFF}")

    @classmethod
    def cnot(cls, cutoff: int = 64) -> "CnotParams":
        """Symmetric choice ``kx = kp = sqrt(pi)``, so ``kx kp = pi``."""
        k = math.sqrt(math.pi)
        return cls(k, k, cutoff)


MIN_CUTOFF = 16


@dataclass(frozen=True)
class CnotVerdict:
    residual: float
    databus_infidelity: float
    subspace_max_fock: int
    cutoff: int


def quadratures(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated ``X = (a + a^dagger)/sqrt(2)`` and ``P = (a - a^dagger)/(i sqrt(2))``."""
    a = np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)
    ad = a.conj().T
    return (a + ad) / math.sqrt(2.0), (a - ad) / (1j * math.sqrt(2.0))


def coherent_fock(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes of ``|alpha>`` for n < cutoff (not renormalized)."""
    n = np.arange(cutoff)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(cutoff, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * cmath.phase(alpha))


def _support_above(alpha: complex, level: int) -> float:
    amps = coherent_fock(alpha, 4 * level + 64)
    return float(np.sum(np.abs(amps[level + 1:]) ** 2))


def _projectors(control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    """(1 - sigma_z)/2 on the control and (1 - sigma_x)/2 on the target, as 4x4 matrices."""
    if {control, target} != {0, 1}:
        raise DomainError("control and target must be ions 0 and 1 in some order")
    qz = np.diag([0.0, 1.0])
    # sigma_x = H sigma_z H: the target rotation is a Hadamard conjugation
    qx = HADAMARD @ qz @ HADAMARD
    return _single(qz, control, 2), _single(qx, target, 2)


def cnot_target(kx: float, kp: float, control: int = 0, target: int = 1) -> np.ndarray:
    """``exp[-i kx kp (1 - sigma_iz)(1 - sigma_jx)/4]``; a CNOT when ``kx kp = pi``."""
    qi, qj = _projectors(control, target)
    proj = qi @ qj
    return np.eye(4) - proj + cmath.exp(-1j * kx * kp) * proj


def displacement_sequence(params: CnotParams, control: int = 0, target: int = 1) -> np.ndarray:
    """Product of the four conditional displacements on ion_0 ⊗ ion_1 ⊗ mode.

    exp(i kx X Q_i) exp(i kp P Q_j) exp(-i kx X Q_i) exp(-i kp P Q_j), with
    Q_i = (1 - sigma_iz)/2 on the control and Q_j = (1 - sigma_jx)/2 on the
    target.
    """
    c = params.cutoff
    x, p = quadratures(c)
    qi, qj = _projectors(control, target)
    eye_q = np.eye(4)

    def conditional(q: np.ndarray, gen: np.ndarray, k: float) -> np.ndarray:
        # q is a projector, so exp(i k gen ⊗ q) = (1 - q) ⊗ 1 + q ⊗ exp(i k gen)
        return np.kron(eye_q - q, np.eye(c)) + np.kron(q, scipy.linalg.expm(1j * k * gen))

    return (
        conditional(qi, x, params.kx)
        @ conditional(qj, p, params.kp)
        @ conditional(qi, x, -params.kx)
        @ conditional(qj, p, -params.kp)
    )


def verify_cnot_identity(
    params: CnotParams,
    control: int = 0,
    target: int = 1,
    vibrational_alpha: complex = 0.0,
) -> CnotVerdict:
    """Compare the displacement sequence with the ideal gate ⊗ identity on low Fock levels.

    The residual is the operator norm of (U - T ⊗ 1) restricted to inputs with
    at most ``cutoff // 4`` phonons. The databus check sends
    ``|+>_control |0>_target |alpha>`` through U and returns ``1 - <alpha|rho_mode|alpha>``.
    """
    c = params.cutoff
    if _support_above(vibrational_alpha, c // 2) >= 1e-8:
        raise TruncationError(f"cutoff {c} too small for |alpha|={abs(vibrational_alpha):.3g}")
    u = displacement_sequence(params, control, target)
    ideal = cnot_target(params.kx, params.kp, control, target)
    t = np.kron(ideal, np.eye(c))
    low = c // 4
    cols = [q * c + n for q in range(4) for n in range(low + 1)]
    residual = float(np.linalg.norm((u - t)[:, cols], 2))

    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    zero = np.array([1.0, 0.0])
    mode_in = coherent_fock(vibrational_alpha, c)
    qubits_in = np.kron(plus, zero) if control == 0 else np.kron(zero, plus)
    psi_in = np.kron(qubits_in, mode_in)
    psi_out = (u @ psi_in).reshape(4, c)
    rho_mode = psi_out.T @ psi_out.conj()
    fid = float(np.real(mode_in.conj() @ rho_mode @ mode_in))
    return CnotVerdict(residual, 1.0 - fid, low, c)
