from pathlib import Path

import pytest

from pseudoflat.config import Settings
from pseudoflat.errors import ConfigError
from pseudoflat.pointgen import dump_points, integer_grid


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("PSEUDOFLAT_OUT", raising=False)


def write(tmp_path, text, name="config.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults():
    settings = Settings.load()
    assert settings.scenario == "grid-lines"
    assert settings.pipeline == ["generate", "incidence", "diagnose", "certify"]
    assert settings.fit_k_min == 3
    assert settings.subset_cap == 10**6
    assert settings.c_hom is None


def test_nested_sections(tmp_path):
    settings = Settings.load(write(tmp_path, "fit:\n  k_min: 4\ncertify:\n  r: 3\n  c_bound: 0.5\n"))
    assert settings.fit_k_min == 4
    assert settings.r == 3
    assert settings.c_bound == 0.5


def test_point_and_bucket_sections_reach_the_experiment(tmp_path):
    text = "homogeneity:\n  c_hom: 3\n  c_vol: 0.5\nincidence:\n  bucket_t: null\n"
    cfg = Settings.load(write(tmp_path, text)).experiment()
    assert (cfg.c_hom, cfg.c_vol, cfg.bucket_t) == (3, 0.5, None)
    assert Settings.load().experiment().bucket_t == 4
    with pytest.raises(ConfigError, match="homogeneity.c_hom"):
        Settings.load(write(tmp_path, "homogeneity:\n  c_hom: 0\n"))


def test_json_document(grid_config):
    settings = Settings.load(grid_config)
    assert settings.k_values == [2, 3]
    assert settings.diagnose_k == [3]
    assert settings.theorem == "1.3"
    assert settings.svg is False


def test_errors_name_the_document_path(tmp_path):
    with pytest.raises(ConfigError, match="fit.k_min"):
        Settings.load(write(tmp_path, "fit:\n  k_min: 0\n"))
    with pytest.raises(ConfigError, match="pipeline"):
        Settings.load(write(tmp_path, "pipeline: [generate, plot]\n"))
    with pytest.raises(ConfigError, match="theorem"):
        Settings.load(write(tmp_path, "certify:\n  theorem: '2.0'\n"))


def test_experiment_errors_become_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        Settings.load(write(tmp_path, "scenario: grid-planes\nn: 2\n"))


@pytest.mark.parametrize("text", ["a: [1, 2\n", "- 1\n- 2\n"])
def test_malformed_documents(tmp_path, text):
    with pytest.raises(ConfigError):
        Settings.load(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        Settings.load(tmp_path / "absent.yaml")


def test_env_and_overrides(grid_config, monkeypatch, tmp_path):
    monkeypatch.setenv("PSEUDOFLAT_OUT", str(tmp_path / "env-out"))
    settings = Settings.load(grid_config, seed=7)
    assert settings.out == tmp_path / "env-out"
    assert settings.seed == 7
    assert Settings.load(grid_config, out=tmp_path / "cli-out").out == tmp_path / "cli-out"


def test_points_file_beside_config(tmp_path):
    dump_points(integer_grid(3, 2), tmp_path / "pts.txt")
    settings = Settings.load(write(tmp_path, "scenario: custom\npoints_file: pts.txt\n"))
    assert settings.points_file == tmp_path / "pts.txt"
    assert settings.experiment().kind == "lines"


def test_resolved_leaves_out_machine_fields(grid_config):
    resolved = Settings.load(grid_config, threads=3).resolved()
    assert "out" not in resolved and "threads" not in resolved
    assert resolved["scenario"] == "grid-lines"
