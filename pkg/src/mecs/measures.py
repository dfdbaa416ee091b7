"""Entanglement of the balanced MECS.

Closed forms (all functions of the overlap p, the phase theta and N):

* bipartite split k | N-k of the pure state
      sqrt((1 - p^{2k}) (1 - p^{2(N-k)})) / (1 + p^N cos theta)
* concurrence of any two modes (mixed reduced state)
      (p^{N-2} - p^N) / (1 + p^N cos theta)
* N-tangle for even N, and N = 3
      (1 - p^2)^N / (1 + p^N cos theta)^2

Each has an independent numerical counterpart here (Wootters concurrence of
the reduced 4x4 matrix, linear entropy of a brute-force marginal, and the
sigma_y^{⊗N} contraction) so the two routes can be compared point by point.

At p = 1, theta = pi the parameterization degenerates (0/0). The limiting
state is the W state for N > 2 and Psi^- for N = 2, and every closed form
returns its limit there.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, ValidationError
from .states import MecsSpec, QubitState, apply_local, embed_as_qubits, reduced_density_matrix
from .coherent import ortho_basis

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

DENSITY_ATOL = 1e-10
_NULL_TOL = 1e-300


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix of dimension 2^n."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ValidationError(f"dimension {dim} is not a power of two")
        if np.max(np.abs(m - m.conj().T)) > DENSITY_ATOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > DENSITY_ATOL:
            raise ValidationError(f"trace is {np.trace(m).real:.3g}, not 1")
        if np.min(np.linalg.eigvalsh(m)) < -DENSITY_ATOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class ConcurrenceDiagnostics:
    lambdas: tuple[float, float, float, float]
    concurrence: float


@dataclass(frozen=True)
class SplitSpec:
    """First block of a bipartite split holds ``k`` parties."""

    k: int

    def check(self, parties: int) -> None:
        if not 1 <= self.k <= parties - 1:
            raise DomainError(f"split size k={self.k} must lie in [1, {parties - 1}]")


@dataclass(frozen=True)
class GeneralPairSpec:
    """Real overlap ``<Psi|Phi> = p'`` and relative phase ``theta'`` of a general pair."""

    p_prime: float
    theta_prime: float

    def __post_init__(self):
        if not 0.0 <= self.p_prime <= 1.0:
            raise DomainError(f"p' must lie in [0, 1], got {self.p_prime}")


def _is_null(spec: MecsSpec) -> bool:
    return spec.norm_denominator() <= _NULL_TOL


def _denominator(spec: MecsSpec) -> float:
    return 1.0 + spec.overlap**spec.parties * math.cos(spec.theta)


# -- reduced two-mode state and Wootters concurrence -------------------------


def reduced_pair_density(spec: MecsSpec) -> DensityOperator:
    """State of modes 1 and 2 after the parity flip on mode 2, in the orthonormal pair.

    With ``|a> = |alpha, -alpha>`` and ``|b> = |-alpha, alpha>`` and q = p^{N-2},
    rho = N_c^2 (|a><a| + |b><b| + q e^{i theta}|b><a| + q e^{-i theta}|a><b|).
    For N = 2 this is the projector onto the (flipped) pure state.
    """
    n = spec.parties
    p = spec.overlap
    theta = spec.theta
    if _is_null(spec):
        # limit p -> 1 along theta = pi: pair marginal of the W state (N=2: Psi^-)
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = (n - 2) / n
        rho[1, 1] = rho[2, 2] = 1.0 / n
        rho[1, 2] = rho[2, 1] = -1.0 / n
        return DensityOperator(rho)
    m = math.sqrt((1.0 - p) * (1.0 + p))
    q = p ** (n - 2)
    a = np.array([p, m, 0.0, 0.0], dtype=complex)
    b = np.array([p, 0.0, m, 0.0], dtype=complex)
    phase = np.exp(1j * theta)
    rho = (
        np.outer(a, a)
        + np.outer(b, b)
        + q * phase * np.outer(b, a)
        + q * np.conj(phase) * np.outer(a, b)
    )
    return DensityOperator(rho / spec.norm_denominator())


def reduced_pair_density_display(spec: MecsSpec) -> np.ndarray:
    """The 4x4 matrix written entry by entry in the standard basis (same object as above)."""
    n = spec.parties
    p = spec.overlap
    m = math.sqrt((1.0 - p) * (1.0 + p))
    q = p ** (n - 2)
    e = np.exp(1j * spec.theta)
    ec = np.conj(e)
    mat = np.array(
        [
            [2 * p**2 * (1 + q * math.cos(spec.theta)), p * m * (1 + q * e), p * m * (1 + q * ec), 0],
            [p * m * (1 + q * ec), m**2, m**2 * q * ec, 0],
            [p * m * (1 + q * e), m**2 * q * e, m**2, 0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    )
    return mat * spec.normalization**2


def pair_density_bruteforce(spec: MecsSpec, flip_second: bool = True) -> np.ndarray:
    """Trace parties 3..N out of the embedded state, optionally after parity on party 2."""
    n = spec.parties
    psi = embed_as_qubits(spec).amplitudes
    if flip_second:
        psi = apply_local(psi, ortho_basis(spec.overlap).parity(), 1, n)
    return reduced_density_matrix(psi, [0, 1], n)


def wootters_concurrence(rho: DensityOperator | np.ndarray) -> ConcurrenceDiagnostics:
    """Two-qubit concurrence max(l1 - l2 - l3 - l4, 0).

    The l_i are square roots of the eigenvalues of rho (Y⊗Y) rho^* (Y⊗Y),
    sorted in decreasing order.
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    if rho.dim != 4:
        raise ValidationError(f"concurrence needs a 4x4 matrix, got dimension {rho.dim}")
    r = rho.matrix
    spin_flipped = r @ SIGMA_YY @ r.conj() @ SIGMA_YY
    # the spectrum is real and non-negative for a valid state; imaginary
    # parts are rounding noise of the non-Hermitian solver
    ev = np.linalg.eigvals(spin_flipped).real
    lambdas = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    c = max(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3], 0.0)
    return ConcurrenceDiagnostics(tuple(float(x) for x in lambdas), float(c))


def pair_lambdas_closed(spec: MecsSpec) -> tuple[float, float, float, float]:
    """Spin-flip roots of the MECS pair state: N_c^2 M^2 (1 +- q), 0, 0."""
    n = spec.parties
    if _is_null(spec):
        return (2.0 / n if n > 2 else 1.0, 0.0, 0.0, 0.0)
    p = spec.overlap
    q = p ** (n - 2)
    scale = (1.0 - p * p) / spec.norm_denominator()
    return (scale * (1.0 + q), scale * (1.0 - q), 0.0, 0.0)


# -- closed forms --------------------------------------------------------------


def pair_concurrence_closed(spec: MecsSpec) -> float:
    """Concurrence between any two modes of the MECS."""
    n = spec.parties
    if _is_null(spec):
        return 2.0 / n if n > 2 else 1.0
    p = spec.overlap
    return (p ** (n - 2) - p**n) / _denominator(spec)


def split_concurrence_closed(spec: MecsSpec, split: SplitSpec | int) -> float:
    """Concurrence between the first k modes and the remaining N - k."""
    if isinstance(split, int):
        split = SplitSpec(split)
    n = spec.parties
    k = split.k
    split.check(n)
    if _is_null(spec):
        # W-state (or Psi^-) limit
        return 2.0 * math.sqrt(k * (n - k)) / n
    p = spec.overlap
    if 2 * k == n:
        # identical factors; avoid sqrt(x^2) rounding so theta = pi gives exactly 1
        num = 1.0 - p**n
    else:
        num = math.sqrt((1.0 - p ** (2 * k)) * (1.0 - p ** (2 * (n - k))))
    return num / _denominator(spec)


def n_tangle_closed(spec: MecsSpec) -> float:
    """N-tangle of the MECS; defined for even N and for N = 3."""
    n = spec.parties
    if n % 2 and n != 3:
        raise DomainError(f"no N-tangle formula for odd N = {n} > 3")
    if _is_null(spec):
        return 1.0 if n == 2 else 0.0
    p = spec.overlap
    return (1.0 - p * p) ** n / _denominator(spec) ** 2


def three_tangle_composed(spec: MecsSpec) -> float:
    """3-tangle as C_{1(23)}^2 - 2 C_{12}^2 (the two pair terms are equal by symmetry)."""
    if spec.parties != 3:
        raise DomainError(f"3-tangle needs N = 3, got {spec.parties}")
    return split_concurrence_closed(spec, 1) ** 2 - 2.0 * pair_concurrence_closed(spec) ** 2


def three_tangle(spec: MecsSpec) -> float:
    """3-tangle ``(1 - p^2)^3 / (1 + p^3 cos theta)^2``."""
    if spec.parties != 3:
        raise DomainError(f"3-tangle needs N = 3, got {spec.parties}")
    return n_tangle_closed(spec)


# -- numerical counterparts ----------------------------------------------------


def n_tangle_numeric(psi: QubitState | np.ndarray) -> float:
    """``|<psi| sigma_y^{⊗N} |psi^*>|^2`` by direct contraction."""
    if not isinstance(psi, QubitState):
        psi = QubitState(psi)
    amps = psi.amplitudes
    n = psi.parties
    idx = np.arange(amps.shape[0])
    ones = np.array([bin(i).count("1") for i in idx])
    # sigma_y maps |0> -> i|1> and |1> -> -i|0>; row b picks column ~b
    phase = (1j) ** ones * (-1j) ** (n - ones)
    flipped = phase * np.conj(amps[idx ^ (amps.shape[0] - 1)])
    return float(abs(np.vdot(amps, flipped)) ** 2)


def three_tangle_numeric(psi: QubitState | np.ndarray) -> float:
    """3-tangle of a three-qubit pure state, ``4 |Cayley hyperdeterminant|``.

    The sigma_y contraction vanishes identically for odd N, so this is the
    numerical counterpart used for N = 3.
    """
    if not isinstance(psi, QubitState):
        psi = QubitState(psi)
    if psi.parties != 3:
        raise DomainError(f"3-tangle needs three qubits, got {psi.parties}")
    a = psi.as_tensor()
    d1 = (
        a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2
        + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
        + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2
        + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2
    )
    d2 = (
        a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
        + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1]
    )
    d3 = a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1] + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]
    return float(4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3))


def n_tangle_oracle(psi: QubitState) -> float:
    """Numerical N-tangle wherever a closed form exists: sigma_y contraction, or the hyperdeterminant at N = 3."""
    if psi.parties == 3:
        return three_tangle_numeric(psi)
    return n_tangle_numeric(psi)


def pure_split_concurrence(psi: QubitState | np.ndarray, k: int) -> float:
    """``sqrt(2 (1 - Tr rho_k^2))`` for the first k parties of a pure state.

    Equals the concurrence of the split when the marginal has rank at most two.
    """
    if not isinstance(psi, QubitState):
        psi = QubitState(psi)
    rho = reduced_density_matrix(psi.amplitudes, list(range(k)), psi.parties)
    purity = float(np.real(np.trace(rho @ rho)))
    return math.sqrt(max(2.0 * (1.0 - purity), 0.0))


# -- maximization over p -------------------------------------------------------


@dataclass(frozen=True)
class MaxResult:
    p_star: float
    c_star: float
    boundary: bool = False


def stationarity(p: float, n: int, theta: float) -> float:
    """Zero of this in p marks the extremum of the pair concurrence at fixed (N, theta)."""
    return 2.0 * p**n * math.cos(theta) + n * p * p - (n - 2)


def solve_max_p(n: int, theta: float) -> MaxResult:
    """Overlap maximizing the pair concurrence for fixed N >= 3 and theta.

    The stationarity condition is strictly increasing in p on (0, 1) unless
    cos(theta) = -1, so a sign change brackets the unique interior maximum.
    Without one the maximum sits on the boundary and is located by a scan.
    """
    if n < 3:
        raise DomainError(f"maximization over p needs N >= 3, got {n}")
    lo, hi = 1e-9, 1.0 - 1e-9
    f_lo = stationarity(lo, n, theta)
    f_hi = stationarity(hi, n, theta)
    # at cos(theta) = -1 the condition has a double root at p = 1 and any
    # sign change near hi is rounding noise
    interior = math.cos(theta) > -1.0 + 1e-12
    if interior and f_lo * f_hi < 0.0:
        root = optimize.bisect(stationarity, lo, hi, args=(n, theta), xtol=2e-16, maxiter=200)
        return MaxResult(root, pair_concurrence_closed(MecsSpec.from_p(root, theta, n)))
    grid = np.linspace(0.0, 1.0, 10_001)
    values = [pair_concurrence_closed(MecsSpec.from_p(float(p), theta, n)) for p in grid]
    best = int(np.argmax(values))
    return MaxResult(float(grid[best]), float(values[best]), boundary=True)


# -- reports -------------------------------------------------------------------


@dataclass
class MeasureReport:
    p: float
    theta: float
    n: int
    k: int
    split_concurrence: float
    pair_concurrence: float
    n_tangle: float | None
    lambdas: tuple[float, float, float, float]
    oracle_deltas: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambdas"] = list(self.lambdas)
        return d


# embedding oracles build 2^N vectors; skip them beyond this size
ORACLE_MAX_PARTIES = 12


def measure_report(spec: MecsSpec, k: int = 1, oracles: bool = True) -> MeasureReport:
    """Closed-form measures for one MECS, with optional numerical cross-checks."""
    n = spec.parties
    split = SplitSpec(k)
    split.check(n)
    try:
        tangle = n_tangle_closed(spec)
    except DomainError:
        tangle = None
    report = MeasureReport(
        p=spec.overlap,
        theta=spec.theta,
        n=n,
        k=k,
        split_concurrence=split_concurrence_closed(spec, split),
        pair_concurrence=pair_concurrence_closed(spec),
        n_tangle=tangle,
        lambdas=pair_lambdas_closed(spec),
    )
    if not oracles:
        return report
    diag = wootters_concurrence(reduced_pair_density(spec))
    report.lambdas = diag.lambdas
    report.oracle_deltas["pair_concurrence"] = abs(diag.concurrence - report.pair_concurrence)
    if spec.overlap < 1.0 and n <= ORACLE_MAX_PARTIES:
        psi = embed_as_qubits(spec)
        report.oracle_deltas["split_concurrence"] = abs(pure_split_concurrence(psi, k) - report.split_concurrence)
        if tangle is not None:
            report.oracle_deltas["n_tangle"] = abs(n_tangle_oracle(psi) - tangle)
    return report


def general_pair_measures(spec: GeneralPairSpec, n: int, split: SplitSpec | int = 1) -> MeasureReport:
    """Measures of N_c'(|Psi>^{⊗N} + e^{i theta'} |Phi>^{⊗N}) with real <Psi|Phi> = p'.

    Only the overlap and the phase enter, so this is the MECS result at
    (p', theta').
    """
    k = split.k if isinstance(split, SplitSpec) else int(split)
    return measure_report(MecsSpec.from_p(spec.p_prime, spec.theta_prime, n), k=k, oracles=False)


# -- special states ------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    state: str
    p: float
    n: int
    theta: float
    concurrence: float
    expected: float
    atol: float = 1e-12

    @property
    def passed(self) -> bool:
        return abs(self.concurrence - self.expected) <= self.atol


def special_state_table(n: int = 4, large_n: int = 400) -> list[TableRow]:
    """Pair concurrence of the limiting states, each recomputed from the closed form.

    ``n`` (> 2) is the party count used for the finite-N rows; the infinite-N
    row is evaluated at ``large_n``.
    """
    if n <= 2:
        raise DomainError("table rows for N > 2 need n >= 3")

    def row(state, p, parties, theta, expected):
        c = pair_concurrence_closed(MecsSpec.from_p(p, theta, parties))
        return TableRow(state, p, parties, theta, c, expected)

    return [
        row(f"W_{n}", 1.0, n, math.pi, 2.0 / n),
        row("Psi^-", 1.0, 2, math.pi, 1.0),
        row("Phi (orthogonal, N=2)", 0.0, 2, 0.3, 1.0),
        row(f"GHZ_{n}", 0.0, n, 0.3, 0.0),
        row(f"vacuum^{n}", 1.0, n, 0.5, 0.0),
        row(f"MECS N={large_n}", 0.5, large_n, 0.0, 0.0),
    ]
