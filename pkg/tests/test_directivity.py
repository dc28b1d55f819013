import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import j1, spherical_jn, spherical_yn

from microsonic.medium import Medium
from microsonic import directivity as dv
from microsonic import sphere as sph

UM, MHZ, PW = 1e-6, 1e6, 1e-12
LOW = Medium.preset("low")
HIGH = Medium.preset("high")


# ---------------------------------------------------------------------------
# baffled disk
# ---------------------------------------------------------------------------

def test_null_angle_worked_example():
    theta = dv.disk_null_angle(100 * UM, 15 * UM)
    assert np.degrees(theta) == pytest.approx(10.5, abs=0.5)


def test_null_angle_no_beam():
    assert dv.disk_null_angle(10 * UM, 15 * UM) is None


def test_null_angle_boundary():
    d = 100 * UM
    theta = dv.disk_null_angle(d, d / dv.FIRST_J1_ZERO_OVER_PI)
    assert np.degrees(theta) == pytest.approx(90.0, rel=1e-9)
    assert dv.disk_null_angle(d, d / 1.21) is None


def test_pattern_normalization_and_null():
    d, lam = 100 * UM, 15 * UM
    assert dv.disk_pattern(d, lam, 0.0) == 1.0
    theta0 = dv.disk_null_angle(d, lam)
    assert dv.disk_pattern(d, lam, theta0) == pytest.approx(0.0, abs=1e-10)


def test_pattern_small_argument_series():
    # [2 J1(x)/x]^2 = 1 - x^2/4 + O(x^4); series oracle at small x
    d, lam = 10 * UM, 150 * UM
    for theta in (0.01, 0.05, 0.1):
        x = np.pi * d / lam * np.sin(theta)
        series = 1 - x**2 / 4
        assert dv.disk_pattern(d, lam, theta) == pytest.approx(
            series, abs=x**4)


def piston_gain_closed_form(d, lam):
    """Radiation-resistance identity: gain = (ka)^2/2 / (1 - J1(2ka)/(ka))
    with ka = pi d / lam. Independent of the quadrature route."""
    ka = np.pi * d / lam
    return ka**2 / 2 / (1 - j1(2 * ka) / ka)


@pytest.mark.parametrize("lam_over_d", [0.05, 0.15, 0.5, 1.5, 5.0, 30.0])
def test_gain_matches_closed_form(lam_over_d):
    d = 100 * UM
    lam = lam_over_d * d
    assert dv.disk_gain(d, lam) == pytest.approx(
        piston_gain_closed_form(d, lam), rel=1e-6)


def test_gain_worked_examples():
    assert dv.disk_gain(100 * UM, 150 * UM) == pytest.approx(2.0, rel=0.25)
    assert dv.disk_gain(100 * UM, 15 * UM) == pytest.approx(200.0, rel=0.15)


def test_gain_asymptotes():
    d = 100 * UM
    # short wavelength: (pi d / lam)^2 / 2 within 5%
    lam = 0.05 * d
    assert dv.disk_gain(d, lam) == pytest.approx(
        0.5 * (np.pi * d / lam) ** 2, rel=0.05)
    # long wavelength: isotropic
    assert dv.disk_gain(d, 100 * d) == pytest.approx(1.0, rel=1e-3)


def test_gain_monotone_in_wavelength():
    d = 100 * UM
    gains = [dv.disk_gain(d, lod * d) for lod in np.geomspace(0.05, 20, 25)]
    assert all(g1 > g2 for g1, g2 in zip(gains, gains[1:]))


# ---------------------------------------------------------------------------
# spherical Hankel recurrence
# ---------------------------------------------------------------------------

def test_hankel_against_scipy_real_argument():
    z = 3.7
    ls = np.arange(13)
    h, hp = dv.spherical_hankel_h1(12, complex(z))
    ref = spherical_jn(ls, z) + 1j * spherical_yn(ls, z)
    refp = spherical_jn(ls, z, derivative=True) \
        + 1j * spherical_yn(ls, z, derivative=True)
    assert np.allclose(h, ref, rtol=1e-12)
    assert np.allclose(hp, refp, rtol=1e-11)


def test_hankel_derivative_complex_argument_fd():
    z = 2.0 + 0.3j
    h_hi, _ = dv.spherical_hankel_h1(8, z + 1e-7)
    h_lo, _ = dv.spherical_hankel_h1(8, z - 1e-7)
    _, hp = dv.spherical_hankel_h1(8, z)
    assert np.allclose(hp, (h_hi - h_lo) / 2e-7, rtol=1e-6)


def test_hankel_overflow_signalled():
    with pytest.raises(dv.ModeTruncationError):
        dv.spherical_hankel_h1(400, 0.5 + 0.01j)


# ---------------------------------------------------------------------------
# sphere modes
# ---------------------------------------------------------------------------

def test_mode_zero_matches_closed_form_sphere():
    a, f = 5 * UM, 100 * MHZ
    s = sph.SphereRadiator(a, 1e-6, f, LOW)
    v_a = s.surface_velocity()
    fld = sph.SphereField(s)
    r = 60 * UM
    p_surf, flux_r, beta0 = dv.sphere_mode_transfer(0, a, f, LOW, r)
    assert p_surf * v_a == pytest.approx(fld.pressure(a), rel=1e-9)
    assert flux_r * abs(v_a) ** 2 == pytest.approx(
        sph.radiated_power(s, r)[1], rel=1e-9)
    assert beta0 * abs(v_a) ** 2 == pytest.approx(sph.input_power(s), rel=1e-9)


def test_mode_powers_positive():
    bank = dv.mode_bank(40, 5 * UM, 100 * MHZ, LOW)
    assert np.all(bank.power_coefficient > 0)


def test_high_order_transfer_decays():
    a, f = 5 * UM, 100 * MHZ
    bank = dv.mode_bank(30, a, f, LOW)
    k_abs_a = abs(bank.k) * a
    flux = np.abs(bank.flux_at(100 * UM))
    start = int(np.ceil(k_abs_a)) + 1
    tail = flux[start:]
    assert np.all(np.diff(tail) < 0)


def test_mode_weight_power_bookkeeping():
    a, f, P, d = 5 * UM, 100 * MHZ, 100 * PW, 100 * UM
    beam = dv.optimize_directed_beam(a, f, LOW, P, d)
    assert beam.weights.total_input_power() == pytest.approx(P, rel=1e-9)


def test_optimize_power_constraint_and_enhancement():
    beam = dv.optimize_directed_beam(5 * UM, 100 * MHZ, LOW, 100 * PW, 100 * UM)
    assert beam.enhancement >= 1.0
    assert 10 <= beam.enhancement <= 40          # published band at 100 MHz
    beam300 = dv.optimize_directed_beam(5 * UM, 300 * MHZ, LOW, 100 * PW, 100 * UM)
    assert 40 <= beam300.enhancement <= 160      # published band at 300 MHz


def test_optimize_monopole_only_degenerates_to_uniform():
    a, f, P, d = 5 * UM, 100 * MHZ, 100 * PW, 100 * UM
    beam = dv.optimize_directed_beam(a, f, LOW, P, d, lmax=0)
    assert beam.enhancement == pytest.approx(1.0, rel=1e-12)
    s = sph.calibrated_sphere(a, f, LOW, P)
    assert beam.flux == pytest.approx(sph.radiated_power(s, d)[1], rel=1e-9)


def test_two_mode_optimum_matches_brute_force():
    # 200 x 200 grid over the power split and relative phase
    a, f, P, d = 5 * UM, 100 * MHZ, 100 * PW, 100 * UM
    closed = dv.optimize_directed_beam(a, f, LOW, P, d, lmax=1)
    bank = dv.mode_bank(1, a, f, LOW)
    tp, tv = bank.pressure_at(d), bank.velocity_at(d)
    beta = bank.power_coefficient
    split = np.linspace(0, 1, 200)
    phase = np.exp(1j * np.linspace(0, 2 * np.pi, 200, endpoint=False))
    v0 = np.sqrt(split * P / beta[0])
    v1 = np.sqrt((1 - split) * P / beta[1])
    p = tp[0] * v0[:, None] + tp[1] * (v1[:, None] * phase[None, :])
    v = tv[0] * v0[:, None] + tv[1] * (v1[:, None] * phase[None, :])
    grid_best = float(np.max(0.5 * np.real(p * np.conj(v))))
    assert closed.flux == pytest.approx(grid_best, rel=1e-3)
    assert closed.flux >= grid_best * (1 - 1e-9)


def test_directed_pattern_no_free_energy():
    # directional average of the optimized pattern cannot exceed the
    # uniform radiator's flux at the same distance and input power
    a, f, P, d = 5 * UM, 100 * MHZ, 100 * PW, 100 * UM
    beam = dv.optimize_directed_beam(a, f, LOW, P, d)
    pat = beam.pattern(d)
    s = sph.calibrated_sphere(a, f, LOW, P)
    p_rad_at_d, _ = sph.radiated_power(s, d)
    assert pat.total_power() <= p_rad_at_d * 1.05
    assert pat.max_flux == pytest.approx(beam.flux, rel=1e-6)
    # weak negative circulation zones (a fraction of a percent of the peak)
    # are genuine near-field physics of the multimode sum
    assert np.all(pat.flux >= -2e-3 * pat.max_flux)


def test_high_attenuation_band():
    beam = dv.optimize_directed_beam(5 * UM, 100 * MHZ, HIGH, 100 * PW, 100 * UM)
    assert 5 <= beam.enhancement <= 20


# ---------------------------------------------------------------------------
# superposition
# ---------------------------------------------------------------------------

def test_singleton_matches_sphere_field():
    e = dv.Emitter((0.0, 0.0, 0.0), 2 * UM, 10 * MHZ, 1e-6)
    s = e.radiator(LOW)
    fld = sph.SphereField(s)
    pts = [(0.0, 0.0, 30 * UM), (20 * UM, 0.0, 0.0)]
    intensity, valid = dv.superpose(dv.EmitterSet((e,), LOW), pts)
    for (x, y, z), got in zip(pts, intensity):
        r = np.sqrt(x * x + y * y + z * z)
        expect = 0.5 * np.real(fld.pressure(r) * np.conj(fld.velocity(r)))
        assert got == pytest.approx(expect, rel=1e-12)
    assert valid.all()


def test_ten_incoherent_emitters_add():
    ring = 10 * UM
    emitters = tuple(
        dv.Emitter((ring * np.cos(t), ring * np.sin(t), 0.0), 2 * UM,
                   10 * MHZ, 1e-5)
        for t in 2 * np.pi * np.arange(10) / 10)
    one, _ = dv.superpose(dv.EmitterSet(emitters[:1], LOW, coherent=False),
                          [(0.0, 0.0, 0.0)])
    ten, _ = dv.superpose(dv.EmitterSet(emitters, LOW, coherent=False),
                          [(0.0, 0.0, 0.0)])
    assert ten[0] == pytest.approx(10 * one[0], rel=1e-12)


def test_coherent_pair_quadruples_intensity():
    e1 = dv.Emitter((0.0, 0.0, -10 * UM), 2 * UM, 10 * MHZ, 1e-6)
    e2 = dv.Emitter((0.0, 0.0, +10 * UM), 2 * UM, 10 * MHZ, 1e-6)
    pt = [(0.0, 2000 * UM, 0.0)]       # far equidistant point
    single, _ = dv.superpose(dv.EmitterSet((e1,), LOW), pt)
    both, _ = dv.superpose(dv.EmitterSet((e1, e2), LOW), pt)
    assert both[0] == pytest.approx(4 * single[0], rel=1e-3)


def test_coherent_sum_equals_manual_field_sum():
    e1 = dv.Emitter((0.0, 0.0, -10 * UM), 2 * UM, 10 * MHZ, 1e-6)
    e2 = dv.Emitter((0.0, 0.0, 8 * UM), 2 * UM, 10 * MHZ, 2e-6 * 1j)
    pt = np.array([13 * UM, 5 * UM, 2 * UM])
    got, _ = dv.superpose(dv.EmitterSet((e1, e2), LOW), [tuple(pt)])
    p_tot, v_tot = 0j, np.zeros(3, dtype=complex)
    for e in (e1, e2):
        fld = sph.SphereField(e.radiator(LOW))
        delta = pt - np.asarray(e.position)
        r = np.linalg.norm(delta)
        p_tot += fld.pressure(r)
        v_tot += fld.velocity(r) * delta / r
    expect = np.linalg.norm(0.5 * np.real(p_tot * np.conj(v_tot)))
    assert got[0] == pytest.approx(expect, rel=1e-12)


def test_points_inside_emitter_excluded():
    e = dv.Emitter((0.0, 0.0, 0.0), 2 * UM, 10 * MHZ, 1e-6)
    intensity, valid = dv.superpose(dv.EmitterSet((e,), LOW),
                                    [(0.0, 0.0, 1 * UM), (0.0, 0.0, 5 * UM)])
    assert not valid[0] and np.isnan(intensity[0])
    assert valid[1] and np.isfinite(intensity[1])


def test_overlapping_emitters_rejected():
    e1 = dv.Emitter((0.0, 0.0, 0.0), 2 * UM, 10 * MHZ, 1e-6)
    e2 = dv.Emitter((0.0, 0.0, 3 * UM), 2 * UM, 10 * MHZ, 1e-6)
    with pytest.raises(ValueError):
        dv.EmitterSet((e1, e2), LOW)


def test_coherent_set_requires_shared_frequency():
    e1 = dv.Emitter((0.0, 0.0, 0.0), 2 * UM, 10 * MHZ, 1e-6)
    e2 = dv.Emitter((0.0, 0.0, 10 * UM), 2 * UM, 20 * MHZ, 1e-6)
    with pytest.raises(ValueError):
        dv.EmitterSet((e1, e2), LOW, coherent=True)
    dv.EmitterSet((e1, e2), LOW, coherent=False)   # fine incoherently
