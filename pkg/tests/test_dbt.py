import math

import numpy as np
import pytest

from ratext import dbt
from ratext.dbt import (
    EXTRA,
    dbt_numerator,
    dbt_rs,
    extend,
    extended_eigenstate,
    generic_eigenstate,
    m_polynomial,
    m_value_at_zero,
    n_polynomial,
    orthogonal_family,
    p_polynomial,
    superpartner,
)
from ratext.errors import NoExtraStateError, NoSuchStateError, RegularityError, UnsupportedError
from ratext.families import FamilySpec, base_energy, potential_value
from ratext.oracle import GridSpec, schrodinger_residual
from ratext.polynomials import laguerre_eval, laguerre_poly

HO2 = FamilySpec.ho(2.0)
MORSE5 = FamilySpec.morse(5.0, 1.0)
KC_I = FamilySpec.erkc(1.6, 2.0)
KC_II = FamilySpec.erkc(4.0, 2.0)


def ratio_spread(a, b):
    r = np.asarray(a) / np.asarray(b)
    return float(np.max(np.abs(r / r[0] - 1.0)))


# ---------------------------------------------------------------- extensions
@pytest.mark.parametrize("omega", [1.0, 2.0])
def test_extension_n0_is_shift(omega):
    ext = extend(FamilySpec.ho(omega), 0)
    x = np.linspace(-4, 4, 33)
    assert np.allclose(ext(x), potential_value(ext.family, x) - omega, atol=1e-13)


@pytest.mark.parametrize("omega", [1.0, 2.0])
def test_extension_n1_isotonic(omega):
    ext = extend(FamilySpec.ho(omega), 1, non_conforming=True)
    x = np.linspace(0.1, 6, 200)
    ref = omega**2 * x**2 / 4 + 2 / x**2 - 1.5 * omega
    assert np.max(np.abs(ext(x) - ref) / np.abs(ref)) < 1e-12
    assert ext.domain == (0.0, math.inf)
    assert not ext.conforming


@pytest.mark.parametrize("omega", [1.0, 2.0])
def test_extension_n2_rational(omega):
    ext = extend(FamilySpec.ho(omega), 2)
    x = np.linspace(-6, 6, 201)
    ref = omega**2 * x**2 / 4 + 4 * omega * (omega * x**2 - 1) / (omega * x**2 + 1) ** 2 - 1.5 * omega
    assert np.max(np.abs(ext(x) - ref) / np.maximum(1.0, np.abs(ref))) < 1e-12


def test_odd_ho_rejected_by_default():
    with pytest.raises(RegularityError) as info:
        extend(HO2, 1)
    assert "KLH branch" in str(info.value)
    assert info.value.verdict.verdict == "SingularInDomain"


def test_morse_odd_rejected():
    with pytest.raises(RegularityError):
        extend(MORSE5, 1)


@pytest.mark.parametrize(
    "f, n", [(HO2, 2), (MORSE5, 2), (FamilySpec.morse(3.7, 0.8, 0.7), 2), (KC_I, 1), (KC_II, 2)]
)
def test_shifted_parameter_form_matches(f, n):
    ext = extend(f, n)
    x = np.linspace(0.05, 8, 300) if f.kind == "erkc" else np.linspace(-2, 8, 300)
    a, b = ext(x), ext.closed_form(x)
    assert np.max(np.abs(a - b) / (1 + np.abs(a))) < 1e-10


# ------------------------------------------------------------------ spectra
def test_spectrum_ho():
    ext = extend(HO2, 2, k_max=3)
    assert ext.spectrum.labels == [EXTRA, 0, 1, 2, 3]
    assert np.allclose(ext.spectrum.energies, [-6, 0, 2, 4, 6])
    assert not ext.spectrum.strict


def test_spectrum_morse():
    ext = extend(MORSE5, 2)
    assert np.allclose(ext.spectrum.energies, [-39, 0, 9, 16, 21, 24])
    assert ext.spectrum.extra_level == pytest.approx(-39.0)


def test_spectrum_erkc_strict():
    ext = extend(KC_I, 1, k_max=3)
    assert EXTRA not in ext.spectrum.labels
    assert ext.spectrum.strict
    assert np.all(ext.spectrum.energies >= 0)


def test_spectrum_erkc_case_ii_has_extra():
    ext = extend(KC_II, 2)
    assert ext.spectrum.labels[0] == EXTRA
    assert ext.spectrum.extra_level == pytest.approx(base_energy(KC_II, -3))
    assert ext.spectrum.extra_level < 0


# ------------------------------------------------------------ RS transforms
def test_dbt_rs_n0():
    ext = extend(HO2, 0)
    x = np.linspace(0.3, 3, 10)
    # v_0 - w_0 = -omega x, so w_0^(0) = omega x / 2 - 1/x: the state x exp(-omega x^2/4)
    assert np.allclose(dbt_rs(ext, 0, x), x - 1 / x)


def test_dbt_rs_is_log_derivative():
    ext = extend(HO2, 2)
    psi = extended_eigenstate(ext, 0)
    h = 1e-5
    numeric = -(math.log(abs(psi(1 + h))) - math.log(abs(psi(1 - h)))) / (2 * h)
    assert dbt_rs(ext, 0, 1.0) == pytest.approx(numeric, abs=1e-9)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_dbt_rs_riccati_residual(k):
    ext = extend(MORSE5, 2)
    x = np.linspace(-1.5, 6, 300)
    psi = extended_eigenstate(ext, k)
    roots = psi.num_var.inverse(psi.numerator.real_roots())
    keep = np.all(np.abs(x[:, None] - np.atleast_1d(roots)[None, :]) > 1e-2, axis=1)
    x = x[keep]
    w = dbt_rs(ext, k, x)
    dw = dbt.dbt_rs_deriv(ext, k, x)
    res = -dw + w * w - (ext(x) - base_energy(MORSE5, k))
    assert np.max(np.abs(res) / (1 + w * w)) < 1e-8


# --------------------------------------------------------------- polynomials
def test_p_degree():
    assert p_polynomial(1, 0, 2.0).degree == 3
    assert p_polynomial(2, 3, 1.0).degree == 8


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("l", [0, 1, 2])
def test_p_even_index_product_form(m, l):
    w = 2.0
    x = np.linspace(0.2, 2.5, 10)
    s = w * x * x / 2
    xi = math.sqrt(w / 2) * x
    two = xi * (laguerre_eval(m, -0.5, -s) * laguerre_eval(l, 0.5, s)
                + laguerre_eval(m - 1, 0.5, -s) * laguerre_eval(l, -0.5, s))
    assert ratio_spread(p_polynomial(m, 2 * l, w)(x), two) < 1e-12


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("l", [0, 1, 2])
def test_p_odd_index_product_form(m, l):
    # the second product carries omega x^2 / 2 (a bare sqrt(omega/2) x does not match)
    w = 2.0
    x = np.linspace(0.2, 2.5, 10)
    s = w * x * x / 2
    two = ((l + 1) * laguerre_eval(m, -0.5, -s) * laguerre_eval(l + 1, -0.5, s)
           - s * laguerre_eval(m - 1, 0.5, -s) * laguerre_eval(l, 0.5, s))
    assert ratio_spread(p_polynomial(m, 2 * l + 1, w)(x), two) < 1e-12


@pytest.mark.parametrize("omega", [1.0, 2.0])
@pytest.mark.parametrize("m", [1, 2])
def test_p_matches_darboux_numerator(omega, m):
    ext = extend(FamilySpec.ho(omega), 2 * m)
    x = np.linspace(0.3, 3, 12)
    for k in range(5):
        assert ratio_spread(p_polynomial(m, k, omega)(x), dbt_numerator(ext, k)(x)) < 1e-10


@pytest.mark.parametrize("a", [2.0, 3.0, 5.0, 6.4])
@pytest.mark.parametrize("m", [1, 2])
def test_m_degree_and_darboux_numerator(a, m):
    f = FamilySpec.morse(a, 1.0)
    ext = extend(f, 2 * m)
    y = np.linspace(0.2, 3.0, 12)
    for k in range(min(3, math.ceil(a))):
        mp = m_polynomial(a, k, m)
        assert mp.degree == 2 * m + k + 1
        assert ratio_spread(mp(2 * y), dbt_numerator(ext, k)(y)) < 1e-10


@pytest.mark.parametrize("a", [2.0, 3.0, 5.0])
@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_m_value_at_zero_corrected_anchor(a, m, k):
    assert m_polynomial(a, k, m)(0.0) == pytest.approx(m_value_at_zero(a, k, m), rel=1e-12)


def test_m_value_at_zero_examples():
    assert m_polynomial(2.0, 0, 1)(0.0) == pytest.approx(-252.0)
    assert m_polynomial(3.0, 1, 1)(0.0) == pytest.approx(-2200.0)


def test_n_degree():
    assert n_polynomial(4.0, 0, 2, 2.0).degree == 3


@pytest.mark.parametrize("a, n", [(1.6, 1), (2.6, 3), (4.0, 2), (6.3, 4)])
def test_n_matches_darboux_numerator(a, n):
    f = FamilySpec.erkc(a, 2.0)
    ext = extend(f, n)
    for k in range(4):
        p, q = n_polynomial(a, k, n, 2.0), dbt_numerator(ext, k)
        assert p.allclose(q * (p.leading / q.leading))


def test_n_rejects_out_of_case():
    with pytest.raises(UnsupportedError):
        n_polynomial(4.0, 0, 1, 2.0)


# ---------------------------------------------------------------- eigenstates
def test_ho_extra_state_shape():
    ext = extend(HO2, 2)
    psi = extended_eigenstate(ext, EXTRA)
    x = np.linspace(-3, 3, 21)
    ref = np.exp(-x * x / 2) / laguerre_eval(1, -0.5, -x * x)
    assert ratio_spread(psi(x), ref) < 1e-12


def test_morse_extra_state_shape():
    ext = extend(MORSE5, 2)
    psi = extended_eigenstate(ext, EXTRA)
    x = np.linspace(-1, 4, 21)
    z = 2 * np.exp(-x)
    ref = z**8 * np.exp(-z / 2) / laguerre_eval(2, -16.0, -z)
    assert ratio_spread(psi(x), ref) < 1e-12
    assert np.all(psi(x) > 0)


def test_erkc_case_ii_ground_state_shape():
    ext = extend(KC_II, 2)
    psi = extended_eigenstate(ext, 0)
    x = np.linspace(0.2, 10, 21)
    n_num = n_polynomial(4.0, 0, 2, 2.0)
    ref = x**3 * np.exp(-x / 4) * n_num(x) / laguerre_eval(2, -7.0, -2 * x)
    assert ratio_spread(psi(x), ref) < 1e-12


@pytest.mark.parametrize(
    "f, n, k", [(HO2, 2, 0), (HO2, 4, 3), (MORSE5, 2, 1), (KC_I, 1, 2), (KC_II, 2, 1)]
)
def test_closed_form_matches_generic(f, n, k):
    ext = extend(f, n)
    x = np.linspace(0.3, 4, 25)
    assert ratio_spread(extended_eigenstate(ext, k)(x), generic_eigenstate(ext, k)(x)) < 1e-9


def test_node_counts():
    ext = extend(HO2, 2)
    x = np.linspace(-8, 8, 40001)
    for k in range(4):
        sign = np.sign(extended_eigenstate(ext, k)(x))
        sign = sign[sign != 0]
        # the extra state is the ground state, so level k sits (k+1)-th
        assert np.count_nonzero(np.diff(sign)) == k + 1


def test_no_extra_in_strict_case():
    with pytest.raises(NoExtraStateError):
        extended_eigenstate(extend(KC_I, 1), EXTRA)


def test_no_such_level():
    with pytest.raises(NoSuchStateError):
        extended_eigenstate(extend(MORSE5, 2), 5)


def test_extra_state_residual():
    ext = extend(HO2, 2)
    psi = extended_eigenstate(ext, EXTRA)
    assert schrodinger_residual(ext, -6.0, psi, GridSpec(-6, 6, 1024)) < 1e-8


def test_norm_positive_finite():
    for ext in (extend(HO2, 2), extend(MORSE5, 2), extend(KC_I, 1)):
        for label in ext.spectrum.labels:
            nrm = extended_eigenstate(ext, label).norm()
            assert math.isfinite(nrm) and nrm > 0


# ---------------------------------------------------------- orthogonal families
def test_ho_family_members_and_weight():
    fam = orthogonal_family(extend(HO2, 2), 2)
    assert fam.labels == [EXTRA, 0, 1, 2]
    x = np.linspace(-2, 2, 9)
    ref = np.exp(-x * x) / laguerre_eval(1, -0.5, -x * x) ** 2
    assert np.allclose(fam.weight(x), ref)


def test_morse_family_weight():
    fam = orthogonal_family(extend(MORSE5, 2), 3)
    z = np.array([0.3, 1.0, 2.5])
    ref = np.exp(-1 / z) / (z ** (2 * 7 + 3) * laguerre_eval(2, -16.0, -1 / z) ** 2)
    assert np.allclose(fam.weight(z), ref, rtol=1e-12)


def test_erkc_strict_family_has_no_constant():
    fam = orthogonal_family(extend(KC_I, 1), 3)
    assert EXTRA not in fam.labels


@pytest.mark.parametrize("f, n", [(HO2, 2), (MORSE5, 2), (KC_I, 1), (KC_II, 2)])
def test_gram_is_identity(f, n):
    gram = orthogonal_family(extend(f, n), 3).gram()
    assert np.max(np.abs(gram - np.eye(len(gram)))) < 1e-8


def test_gram_detects_non_orthogonal_members():
    fam = orthogonal_family(extend(HO2, 2), 2)
    bad = dbt.OrthogonalFamily(
        fam.members + ((9, lambda x: 1.0 + x * x),), fam.weight, fam.lo, fam.hi, fam.var,
        fam.log_measure, fam.breakpoints,
    )
    assert np.max(np.abs(bad.gram() - np.eye(5))) > 1e-3


# ---------------------------------------------------------------- superpartner
@pytest.mark.parametrize("f, n", [(HO2, 2), (FamilySpec.ho(1.0), 4), (MORSE5, 2), (KC_II, 2)])
def test_superpartner_is_base(f, n):
    ext = extend(f, n)
    x = np.linspace(0.1, 8, 400) if f.kind == "erkc" else np.linspace(-3, 8, 400)
    base = potential_value(f, x)
    assert np.max(np.abs(superpartner(ext)(x) - base) / (1 + np.abs(base))) < 1e-10


def test_superpartner_strict_case_regular():
    ext = extend(KC_I, 1)
    x = np.geomspace(1e-3, 200, 2000)
    assert np.all(np.isfinite(superpartner(ext)(x)))
