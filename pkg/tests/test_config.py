import json

import pytest

import turbsynth as ts

from conftest import CN2_R0_20MM


def valid_dict():
    return {"focal_length": 0.3, "f_number": 8.0, "distance": 500.0,
            "cn2": CN2_R0_20MM, "wind_speed": 5.0, "exposure_ms": 40.0}


class TestOpticalConfig:
    def test_derived_properties(self, base_cfg):
        assert base_cfg.aperture == pytest.approx(0.0375)
        assert base_cfg.exposure_ms == pytest.approx(40.0)
        assert base_cfg.wave_shape_constant == 3.0 / 8.0
        assert base_cfg.field_regime_mu == 0.5

    def test_frozen(self, base_cfg):
        with pytest.raises(AttributeError):
            base_cfg.distance = 1.0

    def test_replace(self, base_cfg):
        other = base_cfg.replace(f_number=11.0)
        assert other.f_number == 11.0
        assert base_cfg.f_number == 8.0

    def test_dict_round_trip(self, base_cfg):
        again = ts.config_from_dict(base_cfg.to_dict())
        assert again == base_cfg


class TestValidation:
    def test_valid_config_clean(self, base_cfg):
        assert ts.validate_config(base_cfg) == []

    @pytest.mark.parametrize("field,value", [
        ("focal_length", 0.0), ("focal_length", -1.0),
        ("f_number", 0.0), ("distance", float("nan")),
        ("cn2", -1e-14), ("wind_speed", -0.1),
        ("pixel_pitch", 0.0), ("frame_rate", 0.0), ("height", -2.0),
        ("wave_shape", "conical"), ("field_regime", "mid"),
        ("wind_direction", (0.5, 0.5)),
    ])
    def test_violations_reported(self, base_cfg, field, value):
        bad = base_cfg.replace(**{field: value})
        assert ts.validate_config(bad)
        with pytest.raises(ts.ValidationError):
            ts.require_valid(bad)

    def test_exposure_window(self, base_cfg):
        assert ts.validate_config(base_cfg.replace(exposure_time=5e-5))
        assert ts.validate_config(base_cfg.replace(exposure_time=0.2))
        assert not ts.validate_config(base_cfg.replace(exposure_time=1e-4))
        assert not ts.validate_config(base_cfg.replace(exposure_time=0.1))

    def test_custom_window(self, base_cfg):
        wide = (1e-6, 10.0)
        assert not ts.validate_config(base_cfg.replace(exposure_time=1.0),
                                      exposure_window=wide)

    def test_unbuildable_blur_width_flagged(self, base_cfg):
        # strong enough turbulence pushes the mean width past any
        # practical kernel bank
        bad = base_cfg.replace(cn2=1e-10)
        msgs = ts.validate_config(bad)
        assert any("blur width" in m for m in msgs)


class TestConfigLoading:
    def test_exposure_ms_converted(self):
        cfg = ts.config_from_dict(valid_dict())
        assert cfg.exposure_time == pytest.approx(0.04)

    def test_both_exposure_keys_rejected(self):
        d = valid_dict()
        d["exposure_time"] = 0.04
        with pytest.raises(ts.ValidationError):
            ts.config_from_dict(d)

    def test_missing_key_rejected(self):
        d = valid_dict()
        del d["cn2"]
        with pytest.raises(ts.ValidationError):
            ts.config_from_dict(d)

    def test_unknown_key_rejected(self):
        d = valid_dict()
        d["apeture"] = 1.0
        with pytest.raises(ts.ValidationError, match="apeture"):
            ts.config_from_dict(d)

    def test_wind_direction_list_ok(self):
        d = valid_dict()
        d["wind_direction"] = [0.6, 0.8]
        cfg = ts.config_from_dict(d)
        assert cfg.wind_direction == (0.6, 0.8)

    def test_load_config_file(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(valid_dict()))
        cfg = ts.load_config(p)
        assert cfg.distance == 500.0
