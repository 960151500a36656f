import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subdyn import (
    InvalidInputError,
    Substitution,
    admissible_words,
    builtin,
    expand,
    is_admissible,
    is_aperiodic_class_check,
    is_primitive,
    load_substitution,
    pf_frequencies,
    substitution_matrix,
)


def test_builtin_images():
    theta = builtin("theta")
    assert theta.image("0") == "001"
    assert theta.image("1") == "11001"
    eta = builtin("eta")
    assert eta.image("0") == "001"
    assert eta.image("1") == "11100"
    assert builtin("theta-tilde").images == ("abab", "bbab")
    assert builtin("eta-tilde").images == ("abab", "bbba")


def test_builtin_djr_is_not_a_substitution():
    with pytest.raises(InvalidInputError):
        builtin("djr")


def test_expand_basic():
    theta = builtin("theta")
    assert expand(theta, "0") == "001"
    assert expand(theta, "0", 0) == "0"
    assert expand(theta, "0", 2) == expand(theta, "001")
    assert expand(theta, "01") == "00111001"


@given(st.text(alphabet="01", min_size=1, max_size=12), st.integers(0, 3))
@settings(max_examples=50, deadline=None)
def test_expand_is_a_homomorphism(w, n):
    theta = builtin("theta")
    assert expand(theta, w, n) == "".join(expand(theta, c, n) for c in w)


def test_matrix_and_primitivity():
    for name in ("theta", "eta"):
        m = substitution_matrix(builtin(name))
        assert m.tolist() == [[2, 2], [1, 3]]
        prim, e = is_primitive(builtin(name))
        assert prim and e >= 1


def test_pf_frequencies_exact():
    for name in ("theta", "eta"):
        fv = pf_frequencies(builtin(name))
        assert fv.pf_eigenvalue == pytest.approx(4.0, abs=1e-12)
        assert fv.frequencies[0] == pytest.approx(0.5, abs=1e-12)
        assert fv.frequencies[1] == pytest.approx(0.5, abs=1e-12)


def test_pf_residual_contract():
    for name in ("theta", "eta", "theta-tilde", "eta-tilde"):
        sub = builtin(name)
        fv = pf_frequencies(sub)
        m = substitution_matrix(sub).astype(float)
        v = np.array(fv.frequencies)
        assert np.max(np.abs(m @ v - fv.pf_eigenvalue * v)) <= 1e-12
        assert all(f > 0 for f in fv.frequencies)


def test_admissibility():
    theta = builtin("theta")
    assert is_admissible(theta, "001")
    assert is_admissible(theta, "111")  # 11001.11001 contains 111
    assert not is_admissible(theta, "0000")
    assert not is_admissible(theta, "2")
    assert is_admissible(theta, "")
    eta = builtin("eta")
    assert is_admissible(eta, "111")
    assert is_admissible(eta, "1111")  # junction of images: 001 + 11100
    assert not is_admissible(eta, "11111")


def test_admissible_words_enumeration():
    theta = builtin("theta")
    words = admissible_words(theta, 2)
    assert words == ["00", "01", "10", "11"]
    for w in admissible_words(theta, 6):
        assert is_admissible(theta, w)


def test_aperiodicity_class_check():
    assert is_aperiodic_class_check(builtin("theta-tilde"))
    with pytest.raises(InvalidInputError):
        # images abab / bbba do not share a common tail: not the aA/bA class
        is_aperiodic_class_check(builtin("eta-tilde"))
    with pytest.raises(InvalidInputError):
        is_aperiodic_class_check(builtin("theta"))  # images differ in length


def test_load_substitution():
    sub = load_substitution("0 -> 001\n1 -> 11001\n")
    assert sub.images == builtin("theta").images
    with pytest.raises(InvalidInputError):
        load_substitution("0 -> \n")
    with pytest.raises(InvalidInputError):
        load_substitution("0 -> 001\n0 -> 01\n")
    with pytest.raises(InvalidInputError):
        load_substitution("garbage line")


def test_substitution_validation():
    with pytest.raises(InvalidInputError):
        Substitution("00", ("0", "0"))
    with pytest.raises(InvalidInputError):
        Substitution("01", ("0",))
    with pytest.raises(InvalidInputError):
        Substitution("01", ("0", "2"))
