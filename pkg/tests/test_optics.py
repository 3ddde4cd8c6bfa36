import math

import numpy as np
import pytest

import turbsynth as ts
from turbsynth import optics

from conftest import CN2_R0_20MM


def cfg_with(**kw):
    base = dict(focal_length=0.3, f_number=8.0, distance=500.0,
                cn2=CN2_R0_20MM, wind_speed=5.0, exposure_time=0.04)
    base.update(kw)
    return ts.OpticalConfig(**base)


class TestFriedParameter:
    def test_calibrated_value(self, base_cfg):
        assert ts.fried_parameter(base_cfg) == pytest.approx(0.02, abs=1e-12)

    def test_reference_value(self):
        """Independently computed: 550 nm, Cn2 = 1e-13, 500 m, spherical."""
        cfg = cfg_with(cn2=1e-13)
        assert ts.fried_parameter(cfg) == pytest.approx(
            0.015524384897345093, rel=1e-12)

    def test_plane_wave_ratio(self):
        """Plane-wave r0 is (3/8)^(3/5) of the spherical-wave value."""
        sph = ts.fried_parameter(cfg_with())
        pla = ts.fried_parameter(cfg_with(wave_shape="plane"))
        assert pla / sph == pytest.approx((3.0 / 8.0) ** 0.6, rel=1e-12)

    def test_scaling_laws(self):
        r_base = ts.fried_parameter(cfg_with())
        assert (ts.fried_parameter(cfg_with(cn2=2 * CN2_R0_20MM)) / r_base
                == pytest.approx(2 ** -0.6, rel=1e-12))
        assert (ts.fried_parameter(cfg_with(distance=1000.0)) / r_base
                == pytest.approx(2 ** -0.6, rel=1e-12))

    def test_invalid_config_rejected(self):
        cfg = cfg_with(cn2=-1.0)
        with pytest.raises(ts.ValidationError):
            ts.fried_parameter(cfg)


class TestExposureMtfs:
    def test_dc_is_exactly_one(self, base_cfg):
        xi = np.array([0.0, 1e3, 1e4])
        assert ts.mtf_long_exposure(base_cfg, xi).data[0, 0] == 1.0
        assert ts.mtf_short_exposure(base_cfg, xi).data[0, 0] == 1.0

    def test_range_and_monotone(self, base_cfg):
        xi = np.linspace(0.0, 5e4, 200)
        for grid in (ts.mtf_long_exposure(base_cfg, xi),
                     ts.mtf_short_exposure(base_cfg, xi)):
            v = grid.data[0]
            assert v.min() >= 0.0 and v.max() <= 1.0
            assert np.all(np.diff(v) <= 1e-15)

    def test_short_bounds_long(self, base_cfg):
        """Freezing tilt can only help: SE >= LE at every frequency."""
        xi = np.linspace(0.0, 1e5, 500)
        se = ts.mtf_short_exposure(base_cfg, xi).data
        le = ts.mtf_long_exposure(base_cfg, xi).data
        assert np.all(se >= le - 1e-15)

    def test_long_exposure_matches_fried_form(self, base_cfg):
        """exp(-3.44 (lam xi / r0)^(5/3)) is the same curve up to the
        rounding of the 57.4 prefactor (~0.1% in the exponent)."""
        xi = np.linspace(0.0, 5e4, 50)
        r0 = ts.fried_parameter(base_cfg)
        expected = np.exp(-3.44 * (base_cfg.wavelength * xi / r0) ** (5 / 3))
        got = ts.mtf_long_exposure(base_cfg, xi).data[0]
        assert np.allclose(got, expected, rtol=6e-3)

    def test_near_field_decays_slower(self, base_cfg):
        xi = np.linspace(1e3, 3e4, 64)
        far = ts.mtf_short_exposure(base_cfg, xi).data
        near = ts.mtf_short_exposure(
            base_cfg.replace(field_regime="near"), xi).data
        assert np.all(near >= far - 1e-15)

    def test_negative_frequency_rejected(self, base_cfg):
        with pytest.raises(ts.ValidationError):
            ts.mtf_long_exposure(base_cfg, np.array([-1.0]))


class TestShortExposureGain:
    def test_above_one_and_decaying(self, base_cfg):
        taus = [0.0, 1e-3, 4e-3, 0.04, 1.0]
        gains = [ts.short_exposure_gain(base_cfg, tau=t) for t in taus]
        assert all(g >= 1.0 for g in gains)
        assert all(a > b for a, b in zip(gains, gains[1:]))

    def test_long_exposure_limit(self, base_cfg):
        assert ts.short_exposure_gain(base_cfg, tau=math.inf) == 1.0

    def test_zero_exposure_form(self, base_cfg):
        """At tau=0 only the aperture matters."""
        r0 = ts.fried_parameter(base_cfg)
        expected = 1.0 + 0.35 * (r0 / base_cfg.aperture) ** (1 / 3)
        assert ts.short_exposure_gain(base_cfg, tau=0.0) == pytest.approx(
            expected, rel=1e-12)

    def test_width_parameterization_consistent(self, base_cfg):
        """The r0 form and the width form agree within 2% of (rho - 1)."""
        r0 = ts.fried_parameter(base_cfg)
        omega = ts.blur_width_from_fried(base_cfg, r0)
        for tau in (0.0, 1e-3, 0.04, 1.0):
            g_r0 = ts.short_exposure_gain(base_cfg, tau=tau)
            g_w = ts.short_exposure_gain_from_width(base_cfg, omega, tau=tau)
            assert abs(g_w - g_r0) / (g_r0 - 1.0) < 0.02


class TestBlurWidthFromFried:
    def test_round_trip(self, base_cfg):
        r0 = 0.0173
        w = ts.blur_width_from_fried(base_cfg, r0)
        assert ts.fried_from_blur_width(base_cfg, w) == pytest.approx(
            r0, rel=1e-15)

    def test_value(self, base_cfg):
        # 0.49 * 550e-9 * 0.3 / 0.02
        assert ts.blur_width_from_fried(base_cfg, 0.02) == pytest.approx(
            4.042500e-6, rel=1e-9)


class TestFiniteExposureMtf:
    def test_dc_exact_and_range(self, base_cfg):
        g = ts.mtf_finite_exposure(base_cfg, 4.0, (32, 24))
        assert g.data[0, 0] == 1.0
        assert g.data.min() >= 0.0 and g.data.max() <= 1.0
        assert g.data.shape == (24, 32)

    def test_radial_symmetry(self, base_cfg):
        d = ts.mtf_finite_exposure(base_cfg, 4.0, (33, 33)).data
        mirrored = np.roll(d[::-1, ::-1], (1, 1), axis=(0, 1))
        assert np.abs(d - mirrored).max() < 1e-15

    def test_monotone_in_width(self, base_cfg):
        xi = np.linspace(0.01, 0.5, 64)
        prev = ts.mtf_finite_exposure_profile(base_cfg, 2.0, xi)
        for w in (4.0, 8.0, 16.0):
            cur = ts.mtf_finite_exposure_profile(base_cfg, w, xi)
            assert np.all(cur < prev)
            prev = cur

    def test_monotone_in_exposure(self, base_cfg):
        xi = np.linspace(0.01, 0.5, 64)
        prev = ts.mtf_finite_exposure_profile(base_cfg, 4.0, xi, tau=0.0)
        for tau in (1e-3, 8e-3, 0.04, math.inf):
            cur = ts.mtf_finite_exposure_profile(base_cfg, 4.0, xi, tau=tau)
            assert np.all(cur < prev)
            prev = cur

    def test_exposure_limits_bracket(self, base_cfg):
        xi = np.linspace(0.0, 0.5, 64)
        lo = ts.mtf_finite_exposure_profile(base_cfg, 4.0, xi, tau=math.inf)
        hi = ts.mtf_finite_exposure_profile(base_cfg, 4.0, xi, tau=0.0)
        mid = ts.mtf_finite_exposure_profile(base_cfg, 4.0, xi, tau=8e-3)
        assert np.all(mid >= lo - 1e-12) and np.all(mid <= hi + 1e-12)

    def test_spacing_override(self, base_cfg):
        fine = ts.mtf_finite_exposure(base_cfg, 4.0, (64, 64), spacing=1 / 64)
        default = ts.mtf_finite_exposure(base_cfg, 4.0, (64, 64))
        assert np.array_equal(fine.data, default.data)
        assert fine.spacing == default.spacing == 1 / 64


class TestPsfFromMtf:
    def test_unit_sum_nonneg_symmetric(self, base_cfg):
        for w in (2.0, 5.0, 12.0):
            n = 1 + 2 * int(3 * w)
            psf = ts.psf_from_mtf(ts.mtf_finite_exposure(base_cfg, w, (n, n)))
            d = psf.data
            assert d.min() >= 0.0
            assert abs(d.sum() - 1.0) < 1e-12
            assert np.abs(d - d[::-1, ::-1]).max() < 1e-9

    def test_peak_at_center(self, base_cfg):
        psf = ts.psf_from_mtf(ts.mtf_finite_exposure(base_cfg, 4.0, (33, 33)))
        assert np.unravel_index(psf.data.argmax(), psf.data.shape) == (16, 16)

    def test_round_trip_without_clamp(self, base_cfg):
        """ifft2 then fft2 must be the identity to float precision, so the
        unclamped PSF reproduces its MTF within 1e-9 even at widths where
        the clamped one cannot."""
        for w in (1.5, 4.0, 10.0):
            n = 1 + 2 * int(3 * max(w, 4.0))
            mtf = ts.mtf_finite_exposure(base_cfg, w, (n, n))
            psf = ts.psf_from_mtf(mtf, clamp=False)
            back = np.fft.fft2(np.fft.ifftshift(psf.data))
            assert np.abs(back.real - mtf.data).max() < 1e-9
            assert np.abs(back.imag).max() < 1e-9

    def test_rejects_asymmetric_grid(self):
        d = np.full((8, 8), 0.5)
        d[0, 0] = 1.0
        d[1, 2] = 0.9
        with pytest.raises(ts.ValidationError):
            ts.psf_from_mtf(ts.SampledGrid(d, kind=ts.GridKind.MTF))

    def test_rejects_wrong_kind(self, base_cfg):
        g = ts.SampledGrid(np.ones((4, 4)), kind=ts.GridKind.IMAGE)
        with pytest.raises(ts.ValidationError):
            ts.psf_from_mtf(g)

    def test_rejects_bad_dc(self):
        d = np.zeros((8, 8))
        d[0, 0] = 0.5
        with pytest.raises(ts.ValidationError):
            ts.psf_from_mtf(ts.SampledGrid(d, kind=ts.GridKind.MTF))


class TestPsfFwhm:
    def test_gaussian_reference(self):
        """A discrete Gaussian's FWHM is 2 sqrt(2 ln 2) sigma."""
        n = 65
        y, x = np.mgrid[:n, :n] - n // 2
        sigma = 3.0
        g = np.exp(-(x * x + y * y) / (2 * sigma * sigma))
        # linear interpolation of the crossing biases by O(grid step^2)
        assert ts.psf_fwhm(g / g.sum()) == pytest.approx(
            2.0 * math.sqrt(2.0 * math.log(2.0)) * sigma, rel=5e-3)

    def test_delivered_width_tracks_request(self, base_cfg):
        """The synthesized PSF is narrower than the requested long-exposure
        width by roughly the short-exposure gain."""
        w = 6.0
        n = 1 + 2 * int(3 * w)
        psf = ts.psf_from_mtf(ts.mtf_finite_exposure(base_cfg, w, (n, n)))
        rho = ts.short_exposure_gain_from_width(
            base_cfg, w * base_cfg.pixel_pitch)
        assert ts.psf_fwhm(psf) == pytest.approx(0.95 * w / rho, rel=0.08)


class TestWidthMoments:
    def test_mean_monotone_in_exposure(self, base_cfg):
        taus = [0.0, 5e-4, 2e-3, 8e-3, 0.04, math.inf]
        means = [ts.mean_blur_width(base_cfg, tau=t).px for t in taus]
        assert all(b > a for a, b in zip(means, means[1:-1], strict=False))
        assert means[-1] >= means[-2]

    def test_std_monotone_in_exposure(self, base_cfg):
        taus = [0.0, 5e-4, 2e-3, 8e-3, 0.04]
        stds = [ts.std_blur_width(base_cfg, tau=t).px for t in taus]
        assert all(a > b for a, b in zip(stds, stds[1:]))
        assert ts.std_blur_width(base_cfg, tau=math.inf).px == 0.0

    def test_spread_stays_below_mean(self, base_cfg):
        for tau in (5e-4, 2e-3, 8e-3, 0.04, 0.1):
            mean = ts.mean_blur_width(base_cfg, tau=tau)
            std = ts.std_blur_width(base_cfg, tau=tau)
            assert 0.0 < std.px < mean.px

    def test_zero_exposure_mean_form(self, base_cfg):
        """At tau=0 the mean reduces to the frozen-turbulence form."""
        D = base_cfg.aperture
        q = (D / ts.fried_parameter(base_cfg)) ** (5 / 3)
        expected = (2.44 * base_cfg.wavelength / D) * math.sqrt(1 + 0.268 * q)
        assert ts.mean_blur_width(base_cfg, tau=0.0).angular == pytest.approx(
            expected, rel=1e-12)

    def test_px_conversion(self, base_cfg):
        w = ts.mean_blur_width(base_cfg)
        assert w.px == pytest.approx(
            w.angular * base_cfg.focal_length / base_cfg.pixel_pitch, rel=1e-15)

    def test_stats_bundle(self, base_cfg):
        st = ts.turbulence_stats(base_cfg)
        assert st.fried_r0 == ts.fried_parameter(base_cfg)
        assert st.short_exposure_gain == ts.short_exposure_gain(base_cfg)
        assert st.mean_blur_width_px == ts.mean_blur_width(base_cfg).px
        d = st.to_dict()
        assert d["std_blur_width_px"] == ts.std_blur_width(base_cfg).px
