"""Exact algebra on finite superpositions of multimode coherent states.

A state is stored as a list of terms, each a complex coefficient times a
product of single-mode coherent states ``|b_1> ⊗ ... ⊗ |b_N>``. Every
quantity we need (inner products, norms, the action of a_1...a_N) follows
from the single-mode overlap

    <b|c> = exp(-|b|^2/2 - |c|^2/2 + conj(b) c),

so no Fock-space truncation is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateBasisError, DomainError, ModeMismatchError, NullStateError

#: Labels closer than this (componentwise) are treated as the same coherent state.
LABEL_ATOL = 1e-12

#: Stand-in amplitude for the orthogonal limit p = 0 (all cross overlaps underflow).
ORTHOGONAL_ALPHA = 30.0


def overlap(a: complex, b: complex) -> complex:
    """Overlap ``<a|b>`` of two single-mode coherent states."""
    a = complex(a)
    b = complex(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("coherent labels must be finite")
    # -|a|^2/2 - |b|^2/2 + conj(a) b, rearranged so that a == b gives exactly 0
    return complex(np.exp(-0.5 * abs(a - b) ** 2 + 1j * (a.conjugate() * b).imag))


def overlap_p(alpha: complex) -> float:
    """Overlap ``<-alpha|alpha> = exp(-2|alpha|^2)``.

    Underflows to exactly 0.0 for ``|alpha|^2`` above roughly 372, which is
    the orthogonal limit anyway.
    """
    return math.exp(-2.0 * abs(complex(alpha)) ** 2)


def alpha_from_p(p: float) -> float:
    """Real, non-negative amplitude whose overlap ``exp(-2 alpha^2)`` equals ``p``.

    ``p = 0`` maps to ``ORTHOGONAL_ALPHA``, large enough that every overlap
    between ``|alpha>`` and ``|-alpha>`` underflows to zero.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"overlap p must lie in [0, 1], got {p}")
    if p == 0.0:
        return ORTHOGONAL_ALPHA
    return math.sqrt(-0.5 * math.log(p))


def _overlap_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Term-by-term overlaps: ``out[s, t] = prod_k <x[s, k] | y[t, k]>``."""
    xs = x[:, None, :]
    ys = y[None, :, :]
    expo = -0.5 * np.abs(xs - ys) ** 2 + 1j * (np.conj(xs) * ys).imag
    return np.exp(expo.sum(axis=2))


@dataclass(frozen=True, eq=False)
class MultimodeSuperposition:
    """``sum_t coeffs[t] * |labels[t, 0]> ⊗ ... ⊗ |labels[t, N-1]>``.

    Terms are kept as given; call :meth:`canonicalize` to merge duplicates.
    """

    coeffs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self._check(allow_zero=False)

    def _check(self, allow_zero: bool) -> None:
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        labels = np.array(self.labels, dtype=complex)
        if labels.ndim == 1:
            labels = labels.reshape(1, -1)
        if labels.ndim != 2 or labels.shape[0] != coeffs.shape[0]:
            raise DomainError("need exactly one label row per coefficient")
        if labels.shape[1] < 1:
            raise DomainError("a superposition needs at least one mode")
        if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(labels))):
            raise DomainError("coefficients and labels must be finite")
        if not allow_zero and not np.any(coeffs != 0):
            raise NullStateError("superposition has no nonzero coefficient")
        coeffs.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def _unchecked_zero_ok(cls, coeffs, labels) -> "MultimodeSuperposition":
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", coeffs)
        object.__setattr__(obj, "labels", labels)
        obj._check(allow_zero=True)
        return obj

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, Sequence[complex]]]) -> "MultimodeSuperposition":
        terms = list(terms)
        return cls(
            np.array([c for c, _ in terms], dtype=complex),
            np.array([list(lab) for _, lab in terms], dtype=complex),
        )

    @classmethod
    def product(cls, labels: Sequence[complex], coeff: complex = 1.0) -> "MultimodeSuperposition":
        return cls(np.array([coeff], dtype=complex), np.array([list(labels)], dtype=complex))

    @property
    def modes(self) -> int:
        return self.labels.shape[1]

    @property
    def n_terms(self) -> int:
        return self.coeffs.shape[0]

    def terms(self) -> list[tuple[complex, tuple[complex, ...]]]:
        return [(complex(c), tuple(complex(z) for z in row)) for c, row in zip(self.coeffs, self.labels)]

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))

    def normalized(self) -> "MultimodeSuperposition":
        nrm = self.norm()
        if not nrm > 0.0 or not math.isfinite(nrm):
            raise NullStateError("cannot normalize a zero-norm superposition")
        return MultimodeSuperposition(self.coeffs / nrm, self.labels)

    def scaled(self, factor: complex) -> "MultimodeSuperposition":
        return MultimodeSuperposition(self.coeffs * factor, self.labels)

    def __add__(self, other: "MultimodeSuperposition") -> "MultimodeSuperposition":
        if not isinstance(other, MultimodeSuperposition):
            return NotImplemented
        if other.modes != self.modes:
            raise ModeMismatchError(f"{self.modes} modes vs {other.modes} modes")
        return MultimodeSuperposition(
            np.concatenate([self.coeffs, other.coeffs]),
            np.concatenate([self.labels, other.labels]),
        )

    def canonicalize(self) -> "MultimodeSuperposition":
        """Merge terms whose labels agree within ``LABEL_ATOL`` and drop zeros.

        Raises :class:`NullStateError` if every term cancels.
        """
        merged_labels: list[np.ndarray] = []
        merged_coeffs: list[complex] = []
        for c, row in zip(self.coeffs, self.labels):
            for idx, seen in enumerate(merged_labels):
                if np.all(np.abs(seen - row) <= LABEL_ATOL):
                    merged_coeffs[idx] += c
                    break
            else:
                merged_labels.append(row)
                merged_coeffs.append(complex(c))
        keep = [i for i, c in enumerate(merged_coeffs) if c != 0]
        if not keep:
            raise NullStateError("all terms cancel")
        return MultimodeSuperposition(
            np.array([merged_coeffs[i] for i in keep]),
            np.array([merged_labels[i] for i in keep]),
        )


def inner_product(x: MultimodeSuperposition, y: MultimodeSuperposition) -> complex:
    """``<x|y>``, conjugate-linear in ``x`` and linear in ``y``."""
    if x.modes != y.modes:
        raise ModeMismatchError(f"{x.modes} modes vs {y.modes} modes")
    gram = _overlap_matrix(x.labels, y.labels)
    return complex(np.conj(x.coeffs) @ gram @ y.coeffs)


def apply_annihilation_all(x: MultimodeSuperposition) -> MultimodeSuperposition:
    """Apply ``a_1 a_2 ... a_N``: each term picks up the product of its labels.

    Terms are not merged, and the result may have every coefficient zero
    (the vacuum is annihilated).
    """
    return MultimodeSuperposition._unchecked_zero_ok(x.coeffs * np.prod(x.labels, axis=1), x.labels)


@dataclass(frozen=True)
class OrthoBasisPair:
    """Orthonormal pair built from ``|alpha>`` and ``|-alpha>``.

    ``|0> = |alpha>`` and ``|1> = (|-alpha> - p|alpha>) / M`` with
    ``M = sqrt(1 - p^2)``, so that ``|-alpha> = M|1> + p|0>``.
    """

    p: float
    M: float

    @property
    def minus_alpha(self) -> np.ndarray:
        """Coordinates of ``|-alpha>`` in the ``(|0>, |1>)`` basis."""
        return np.array([self.p, self.M])

    @property
    def plus_alpha(self) -> np.ndarray:
        """Coordinates of ``|alpha>`` in the ``(|0>, |1>)`` basis."""
        return np.array([1.0, 0.0])

    def parity(self) -> np.ndarray:
        """Matrix of ``(-1)^{a^dagger a}`` on ``span{|alpha>, |-alpha>}``.

        Parity swaps ``|alpha>`` and ``|-alpha>``; in the orthonormal pair it
        is the real reflection ``[[p, M], [M, -p]]``.
        """
        return np.array([[self.p, self.M], [self.M, -self.p]])

    def basis_states(self, alpha: complex | None = None) -> tuple[MultimodeSuperposition, MultimodeSuperposition]:
        """The pair as single-mode coherent superpositions.

        ``alpha`` defaults to the real amplitude reproducing ``p``.
        """
        if alpha is None:
            alpha = alpha_from_p(self.p)
        zero = MultimodeSuperposition.product([alpha])
        one = MultimodeSuperposition(
            np.array([1.0 / self.M, -self.p / self.M]),
            np.array([[-alpha], [alpha]]),
        )
        return zero, one


def ortho_basis(p: float) -> OrthoBasisPair:
    """Orthonormal basis for the overlap ``p = <-alpha|alpha>``; requires ``0 <= p < 1``."""
    p = float(p)
    if not math.isfinite(p) or p < 0.0:
        raise DomainError(f"overlap p must be non-negative, got {p}")
    if p >= 1.0:
        raise DegenerateBasisError("p >= 1: |alpha> and |-alpha> coincide")
    return OrthoBasisPair(p=p, M=math.sqrt((1.0 - p) * (1.0 + p)))
