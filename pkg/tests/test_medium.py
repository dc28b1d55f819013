import numpy as np
import pytest
from hypothesis import given, strategies as st

from microsonic.medium import (ATTENUATION_PRESETS, AttenuationModel, Medium,
                               attenuation, effective_viscosity, wave_vector)

MHZ = 1e6
UM = 1e-6

PRESET_TERMS = {
    "water": ((0.025, 2.0),),
    "low": ((0.5, 1.36), (0.025, 2.0)),
    "high": ((5.2, 1.28), (0.137, 2.0)),
}


@pytest.mark.parametrize("name,terms", PRESET_TERMS.items())
@pytest.mark.parametrize("f_mhz", [1.0, 10.0, 100.0, 300.0])
def test_preset_curves_match_power_law_exactly(name, terms, f_mhz):
    expected = sum(a * f_mhz**p for a, p in terms)
    got = attenuation(ATTENUATION_PRESETS[name], f_mhz * MHZ)
    assert got == pytest.approx(expected, rel=1e-15)


# attenuation distances 1/alpha in um; the paper rounds two cells to one
# significant figure, hence the 3% band
TABLE2_DISTANCES = {
    ("water", 10.0): 4e5,
    ("water", 100.0): 4000.0,
    ("low", 10.0): 7e4,
    ("low", 100.0): 2000.0,
    ("high", 10.0): 9e3,
    ("high", 100.0): 300.0,
}


@pytest.mark.parametrize("key,expected_um", TABLE2_DISTANCES.items())
def test_attenuation_distances_match_table(key, expected_um):
    name, f_mhz = key
    dist = ATTENUATION_PRESETS[name].attenuation_distance(f_mhz * MHZ)
    assert dist / UM == pytest.approx(expected_um, rel=0.03)


def test_wavelengths():
    m = Medium.preset("water")
    assert m.wavelength(10 * MHZ) == pytest.approx(150 * UM, rel=1e-12)
    assert m.wavelength(100 * MHZ) == pytest.approx(15 * UM, rel=1e-12)


def test_water_100mhz_attenuation():
    # 1/alpha = 4000 um exactly for the quadratic water fit
    assert attenuation(ATTENUATION_PRESETS["water"], 100 * MHZ) == \
        pytest.approx(250.0, rel=1e-12)


def test_alpha_zero_at_zero_frequency():
    for model in ATTENUATION_PRESETS.values():
        assert attenuation(model, 0.0) == 0.0


def test_negative_frequency_rejected():
    with pytest.raises(ValueError):
        attenuation(ATTENUATION_PRESETS["water"], -1.0)


@given(st.sampled_from(["water", "low", "high"]),
       st.floats(min_value=0.0, max_value=1e9),
       st.floats(min_value=0.0, max_value=1e9))
def test_alpha_nondecreasing(name, f1, f2):
    model = ATTENUATION_PRESETS[name]
    lo, hi = min(f1, f2), max(f1, f2)
    assert attenuation(model, lo) <= attenuation(model, hi) * (1 + 1e-12) + 1e-30


def test_wave_vector_water_100mhz():
    # hand evaluation: Re k = 2 pi f / c, Im k = alpha
    wv = wave_vector(Medium.preset("water"), 100 * MHZ)
    assert wv.k.real == pytest.approx(2 * np.pi * 1e8 / 1500.0, rel=1e-12)
    assert wv.k.real == pytest.approx(4.18879e5, rel=1e-5)
    assert wv.k.imag == pytest.approx(250.0, rel=1e-12)


def test_wave_vector_roundtrip():
    m = Medium.preset("high")
    for f in (3e6, 47e6, 215e6):
        wv = m.wave_vector(f)
        assert wv.alpha == m.alpha(f)                      # exact recovery
        assert wv.wavelength * f == pytest.approx(m.c, rel=1e-14)


def test_wave_vector_zero_attenuation_is_real():
    m = Medium(attenuation=AttenuationModel(()), name="lossless")
    assert m.wave_vector(10 * MHZ).k.imag == 0.0


def test_wave_vector_rejects_nonpositive_frequency():
    with pytest.raises(ValueError):
        Medium.preset("water").wave_vector(0.0)


def test_effective_viscosity_water_100mhz():
    # arithmetic inversion: 2 c^3 rho alpha / omega^2
    # = 2 * 1500^3 * 1000 * 250 / (2 pi 1e8)^2 = 4.2745e-3 Pa s
    visc = effective_viscosity(Medium.preset("water"), 100 * MHZ)
    assert visc.total == pytest.approx(4.2745e-3, rel=1e-4)


def test_effective_viscosity_low_10mhz_oracle():
    # independent brute-force arithmetic
    f = 10 * MHZ
    alpha = 0.5 * 10**1.36 + 0.025 * 10**2
    omega = 2 * np.pi * f
    expected = 2 * 1500.0**3 * 1000.0 * alpha / omega**2
    visc = effective_viscosity(Medium.preset("low"), f)
    assert visc.total == pytest.approx(expected, rel=1e-12)


def test_effective_viscosity_linear_in_alpha():
    f = 25 * MHZ
    base = Medium.preset("water")
    doubled = base.with_attenuation(AttenuationModel(((0.05, 2.0),)))
    assert effective_viscosity(doubled, f).total == \
        pytest.approx(2 * effective_viscosity(base, f).total, rel=1e-12)


@pytest.mark.parametrize("name", ["water", "low", "high"])
@pytest.mark.parametrize("f_mhz", [3.0, 10.0, 100.0, 300.0])
def test_viscosity_split_preserves_identity(name, f_mhz):
    visc = effective_viscosity(Medium.preset(name), f_mhz * MHZ)
    assert 4 * visc.shear / 3 + visc.bulk == pytest.approx(visc.total, rel=1e-14)
    assert visc.bulk == pytest.approx(2 * visc.shear / 3, rel=1e-14)
    assert visc.shear >= 0 and visc.bulk >= 0


def test_attenuation_model_validation():
    with pytest.raises(ValueError):
        AttenuationModel(((-0.1, 2.0),))
    with pytest.raises(ValueError):
        AttenuationModel(((0.1, 0.0),))


def test_medium_validation():
    with pytest.raises(ValueError):
        Medium(c=0.0)
    with pytest.raises(ValueError):
        Medium(rho=-1.0)
    with pytest.raises(ValueError):
        Medium.preset("marrow")


def test_custom_power_law_sum():
    model = AttenuationModel(((1.0, 1.0), (0.5, 1.5)))
    assert model.alpha(4 * MHZ) == pytest.approx(4.0 + 0.5 * 8.0, rel=1e-14)
