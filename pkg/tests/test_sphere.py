import numpy as np
import pytest

from microsonic.medium import AttenuationModel, Medium
from microsonic import sphere as sph

UM, MHZ, PW = 1e-6, 1e6, 1e-12

LOW = Medium.preset("low")
LOSSLESS = Medium(attenuation=AttenuationModel(()), name="lossless")


def make(a=5 * UM, eps=1e-6, f=10 * MHZ, medium=LOW):
    return sph.SphereRadiator(a, eps, f, medium)


def test_surface_velocity_boundary_condition():
    s = make()
    _, v = sph.field_at(s, s.radius)
    expected = -1j * s.radius * s.omega * s.epsilon
    assert v == pytest.approx(expected, rel=1e-13)


def test_far_field_pressure_spreads_as_one_over_r():
    # lossless, ka >> 1: |p| ~ 1/r within 0.1% over [10a, 100a]
    s = make(f=1000 * MHZ, medium=LOSSLESS)
    r = np.linspace(10 * s.radius, 100 * s.radius, 50)
    p, _ = sph.field_at(s, r)
    assert np.ptp(np.abs(p) * r) / np.mean(np.abs(p) * r) < 1e-3


def test_field_domain_error():
    s = make()
    with pytest.raises(ValueError):
        sph.field_at(s, 0.5 * s.radius)


def test_velocity_gradient_against_finite_difference():
    s = make(f=100 * MHZ)
    fld = sph.SphereField(s)
    r = 3 * s.radius
    h = 1e-11
    fd = (fld.velocity(r + h) - fld.velocity(r - h)) / (2 * h)
    assert fld.velocity_gradient(r) == pytest.approx(fd, rel=1e-6)


def test_divergence_identity_against_finite_difference():
    # div v in spherical symmetry: dv/dr + 2 v / r
    s = make(f=100 * MHZ)
    fld = sph.SphereField(s)
    r = 2 * s.radius
    direct = fld.velocity_gradient(r) + 2 * fld.velocity(r) / r
    assert fld.velocity_divergence(r) == pytest.approx(direct, rel=1e-10)


def test_force_reduces_to_pressure_without_viscosity():
    s = make(medium=LOSSLESS)
    fld = sph.SphereField(s)
    F = sph.surface_force(s)
    assert F == pytest.approx(4 * np.pi * s.radius**2 * fld.pressure(s.radius),
                              rel=1e-13)


def test_force_linear_in_epsilon():
    s1 = make(eps=1e-6)
    s2 = make(eps=2e-6)
    assert abs(sph.surface_force(s2)) == pytest.approx(
        2 * abs(sph.surface_force(s1)), rel=1e-12)


def test_linearity_and_quadratic_power_scaling():
    rng = np.random.default_rng(42)
    for _ in range(4):
        c = rng.uniform(0.3, 3.0)
        e0 = rng.uniform(1e-7, 1e-5)
        s1, s2 = make(eps=e0), make(eps=c * e0)
        r = 7 * s1.radius
        p1, v1 = sph.field_at(s1, r)
        p2, v2 = sph.field_at(s2, r)
        assert p2 == pytest.approx(c * p1, rel=1e-10)
        assert v2 == pytest.approx(c * v1, rel=1e-10)
        assert sph.input_power(s2) == pytest.approx(
            c**2 * sph.input_power(s1), rel=1e-10)
        assert sph.radiated_power(s2, r)[0] == pytest.approx(
            c**2 * sph.radiated_power(s1, r)[0], rel=1e-10)


def test_waveform_averages_to_input_power():
    s = make()
    t = sph.waveform_times(s)
    waveform = sph.power_waveform(s, t)
    assert waveform.mean() == pytest.approx(sph.input_power(s), rel=1e-9)


def test_waveform_oscillates_with_negative_excursions():
    s = sph.calibrated_sphere(5 * UM, 10 * MHZ, LOW, 100 * PW)
    w = sph.power_waveform(s, sph.waveform_times(s))
    assert w.mean() == pytest.approx(100 * PW, rel=1e-9)
    assert w.min() < 0                       # fluid does work on the sphere
    assert w.max() > 2 * w.mean()


def test_lossless_radiated_power_conserved():
    s = make(medium=LOSSLESS, f=100 * MHZ)
    r = np.geomspace(s.radius, 100 * s.radius, 64)
    P, _ = sph.radiated_power(s, r)
    assert np.ptp(P) / P.mean() < 1e-6


def test_lossy_radiated_power_strictly_decreasing():
    s = make(f=100 * MHZ)
    r = np.geomspace(s.radius, 100 * s.radius, 64)
    P, _ = sph.radiated_power(s, r)
    assert np.all(np.diff(P) < 0)


def test_far_field_attenuation_exponent():
    # fitted log-slope of P_rad within 1% of -2 alpha for r >> a, 1/k
    s = make(f=100 * MHZ)
    alpha = LOW.alpha(s.frequency)
    r = np.linspace(50 * s.radius, 150 * s.radius, 40)
    P, _ = sph.radiated_power(s, r)
    slope = np.polyfit(r, np.log(P), 1)[0]
    assert slope == pytest.approx(-2 * alpha, rel=0.01)


def test_radiated_power_domain_error():
    with pytest.raises(ValueError):
        sph.radiated_power(make(), 1 * UM)


# -- the published sphere table: low attenuation, 100 pW ----------------------
# (radius um, f MHz) -> (radiated power pW at 100 um, flux pW/um^2, max Pa)
SPHERE_TABLE = {
    (0.5, 10.0): (0.7, 5.4e-6, 800.0),
    (0.5, 100.0): (58.0, 4.6e-4, 8000.0),
    (5.0, 10.0): (87.0, 6.9e-4, 910.0),
    (5.0, 100.0): (90.0, 7.2e-4, 980.0),
    (50.0, 10.0): (100.0, 7.9e-4, 98.0),
    (50.0, 100.0): (95.0, 7.6e-4, 98.0),
}


@pytest.mark.parametrize("key,expected", SPHERE_TABLE.items())
def test_sphere_table_low_attenuation(key, expected):
    a_um, f_mhz = key
    p_rad_pw, flux, p_max = expected
    wide = a_um == 0.5           # viscosity-split sensitivity
    s = sph.calibrated_sphere(a_um * UM, f_mhz * MHZ, LOW, 100 * PW)
    rep = sph.power_report(s, 100 * UM)
    rel = 0.30 if wide else 0.10
    assert rep.radiated_power / PW == pytest.approx(p_rad_pw, rel=rel)
    assert rep.flux == pytest.approx(flux, rel=rel)
    assert rep.max_pressure == pytest.approx(p_max, rel=0.25)


def test_calibration_roundtrip_and_scaling():
    eps = sph.calibrate_epsilon(5 * UM, 10 * MHZ, LOW, 100 * PW)
    s = sph.SphereRadiator(5 * UM, eps, 10 * MHZ, LOW)
    assert sph.input_power(s) == pytest.approx(100 * PW, rel=1e-9)
    eps4 = sph.calibrate_epsilon(5 * UM, 10 * MHZ, LOW, 400 * PW)
    assert eps4 == pytest.approx(2 * eps, rel=1e-12)


def test_max_pressure_is_at_surface():
    s = sph.calibrated_sphere(5 * UM, 100 * MHZ, LOW, 100 * PW)
    fld = sph.SphereField(s)
    assert sph.max_surface_pressure(s) == pytest.approx(
        abs(fld.pressure(s.radius)), rel=1e-9)


def test_power_report_efficiency_product():
    rep = sph.power_report(make(), 100 * UM)
    assert rep.overall_efficiency == pytest.approx(
        rep.acoustic_efficiency * rep.transmission_efficiency, rel=1e-12)


def test_efficiency_anchors():
    assert sph.efficiency(5 * UM, 30 * MHZ, LOW, 100 * UM).overall == \
        pytest.approx(0.97, abs=0.05)
    assert sph.efficiency(5 * UM, 100 * MHZ, LOW, 100 * UM).overall == \
        pytest.approx(0.90, abs=0.05)


def test_transmission_unity_without_attenuation():
    eff = sph.efficiency(5 * UM, 50 * MHZ, LOSSLESS, 100 * UM)
    assert eff.transmission == pytest.approx(1.0, rel=1e-9)


def test_efficiency_domain_error():
    with pytest.raises(ValueError):
        sph.efficiency(5 * UM, 10 * MHZ, LOW, 1 * UM)


@pytest.mark.parametrize("a_um,f_expect_mhz", [(0.5, 150.0), (5.0, 30.0),
                                               (50.0, 5.0)])
def test_efficiency_peaks_within_factor_two(a_um, f_expect_mhz):
    peak = sph.efficiency_peak(a_um * UM, LOW, 100 * UM)
    assert not peak.at_boundary
    assert f_expect_mhz / 2 <= peak.frequency / MHZ <= f_expect_mhz * 2


def test_efficiency_peak_boundary_flag():
    peak = sph.efficiency_peak(5 * UM, LOW, 100 * UM, f_range=(1e6, 3e6))
    assert peak.at_boundary
    assert peak.frequency == pytest.approx(3e6, rel=1e-6)


@pytest.mark.parametrize("a_um", [0.3, 2.0, 20.0])
@pytest.mark.parametrize("name", ["water", "low", "high"])
@pytest.mark.parametrize("f_mhz", [3.0, 30.0, 300.0])
def test_efficiencies_bounded(a_um, name, f_mhz):
    eff = sph.efficiency(a_um * UM, f_mhz * MHZ, Medium.preset(name), 100 * UM)
    assert 0 <= eff.acoustic <= 1 + 1e-12
    assert 0 <= eff.transmission <= 1 + 1e-12


def test_epsilon_range_enforced():
    with pytest.raises(ValueError):
        make(eps=0.5)
    with pytest.warns(UserWarning):
        make(eps=5e-12)


def test_small_sphere_high_frequency_pressure():
    s = sph.calibrated_sphere(0.5 * UM, 100 * MHZ, LOW, 100 * PW)
    assert sph.max_surface_pressure(s) == pytest.approx(8000.0, rel=0.25)
