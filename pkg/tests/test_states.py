import cmath
import math
from functools import reduce

import numpy as np
import pytest

from mecs.coherent import MultimodeSuperposition, inner_product
from mecs.errors import DegenerateBasisError, DomainError, NullStateError, ValidationError
from mecs.states import MecsSpec, QubitState, build_mecs, embed_as_qubits, ghz_state, w_state


def test_spec_requires_exactly_one_amplitude():
    with pytest.raises(DomainError):
        MecsSpec(parties=3, theta=0.0)
    with pytest.raises(DomainError):
        MecsSpec(parties=3, theta=0.0, alpha=1.0, p=0.5)
    with pytest.raises(DomainError):
        MecsSpec.from_p(0.5, 0.0, 1)
    with pytest.raises(DomainError):
        MecsSpec.from_p(1.5, 0.0, 3)


def test_spec_overlap_from_alpha():
    assert MecsSpec.from_alpha(1 + 1j, 0, 2).overlap == pytest.approx(math.exp(-4))


@pytest.mark.parametrize("sign, theta", [(1, 0.0), (-1, math.pi)])
def test_even_odd_cat_normalization(sign, theta):
    a = 0.8
    state = build_mecs(MecsSpec.from_alpha(1j * a, theta, 2))
    assert 1 / state.coeffs[0].real == pytest.approx(math.sqrt(2 + sign * 2 * math.exp(-4 * a * a)), rel=1e-13)
    assert inner_product(state, state).real == pytest.approx(1.0, abs=1e-13)


def test_orthogonal_limit_normalization():
    state = build_mecs(MecsSpec.from_p(0.0, 0.0, 3))
    assert state.coeffs[0] == pytest.approx(1 / math.sqrt(2))
    assert inner_product(state, state).real == pytest.approx(1.0, abs=1e-14)


def test_normalization_example():
    spec = MecsSpec.from_p(0.5, math.pi / 3, 4)
    assert spec.normalization == pytest.approx(0.696310623822791352709165026451, abs=1e-15)
    state = build_mecs(spec)
    assert inner_product(state, state).real == pytest.approx(1.0, abs=1e-13)


def test_null_state():
    with pytest.raises(NullStateError):
        build_mecs(MecsSpec.from_p(1.0, math.pi, 3))


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("p", [0.1 * i for i in range(10)])
def test_build_mecs_normalized_on_grid(n, p):
    rng = np.random.default_rng(n * 100 + int(p * 10))
    theta = float(rng.uniform(0, 2 * math.pi))
    state = build_mecs(MecsSpec.from_p(p, theta, n))
    assert inner_product(state, state).real == pytest.approx(1.0, abs=1e-12)


def test_embed_orthogonal_limit_is_ghz():
    theta = 0.4
    psi = embed_as_qubits(MecsSpec.from_p(0.0, theta, 3))
    assert psi.fidelity(ghz_state(3, theta)) == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(psi.amplitudes, ghz_state(3, theta).amplitudes, atol=1e-15)


def test_embed_amplitude_formula():
    p, theta, n = 0.45, 1.3, 4
    spec = MecsSpec.from_p(p, theta, n)
    psi = embed_as_qubits(spec)
    m = math.sqrt(1 - p * p)
    for idx in range(2**n):
        ones = bin(idx).count("1")
        expected = spec.normalization * ((idx == 0) + cmath.exp(1j * theta) * p ** (n - ones) * m**ones)
        assert psi.amplitudes[idx] == pytest.approx(expected, abs=1e-14)


def test_embed_rejects_p_one():
    with pytest.raises(DegenerateBasisError):
        embed_as_qubits(MecsSpec.from_p(1.0, 0.0, 3))


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("alpha", [0.3, 0.9 + 0.4j, 1.5j])
def test_embedding_preserves_inner_products(n, alpha):
    # <MECS(theta1)|MECS(theta2)> agrees between the coherent and qubit pictures
    s1 = MecsSpec.from_alpha(alpha, 0.3, n)
    s2 = MecsSpec.from_alpha(alpha, 2.1, n)
    coherent = inner_product(build_mecs(s1), build_mecs(s2))
    qubit = np.vdot(embed_as_qubits(s1).amplitudes, embed_as_qubits(s2).amplitudes)
    assert qubit == pytest.approx(coherent, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_branch_overlap_preserved(n):
    alpha = 0.7
    p = math.exp(-2 * alpha**2)
    coherent = inner_product(MultimodeSuperposition.product([alpha] * n), MultimodeSuperposition.product([-alpha] * n))
    minus = reduce(np.kron, [np.array([p, math.sqrt(1 - p * p)])] * n)
    assert minus[0] == pytest.approx(coherent.real, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_embed_converges_linearly_to_ghz(n):
    for p in (1e-2, 1e-3, 1e-4):
        psi = embed_as_qubits(MecsSpec.from_p(p, 0.7, n))
        dist = np.linalg.norm(psi.amplitudes - ghz_state(n, 0.7).amplitudes)
        assert dist < 10 * p


def test_w_limit_fidelity_three_parties():
    psi = embed_as_qubits(MecsSpec.from_p(0.999, math.pi, 3))
    assert psi.fidelity(w_state(3)) > 0.99


@pytest.mark.parametrize("n", [3, 4, 5])
def test_w_fidelity_monotone_towards_one(n):
    ps = np.linspace(0.9, 0.9999, 40)
    fids = [embed_as_qubits(MecsSpec.from_p(float(p), math.pi, n)).fidelity(w_state(n)) for p in ps]
    assert all(b > a for a, b in zip(fids, fids[1:]))
    assert fids[-1] > 0.999


def test_ghz_examples():
    np.testing.assert_allclose(ghz_state(2, 0).amplitudes, [2**-0.5, 0, 0, 2**-0.5])
    amps = ghz_state(3, math.pi).amplitudes
    assert amps[0] == pytest.approx(2**-0.5)
    assert amps[-1] == pytest.approx(-(2**-0.5))
    assert np.allclose(amps[1:-1], 0)


def test_w_examples():
    np.testing.assert_allclose(w_state(2).amplitudes, [0, 2**-0.5, 2**-0.5, 0])
    assert np.count_nonzero(w_state(5).amplitudes) == 5


@pytest.mark.parametrize("ctor", [ghz_state, w_state])
def test_limit_states_need_two_parties(ctor):
    with pytest.raises(DomainError):
        ctor(1)


def test_qubit_state_validation():
    with pytest.raises(ValidationError):
        QubitState([1.0, 1.0])
    with pytest.raises(ValidationError):
        QubitState([1.0, 0.0, 0.0])
    assert QubitState.normalize([1.0, 1.0, 0, 0]).parties == 2
