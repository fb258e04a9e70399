import json
from pathlib import Path

import pytest

from ndpos import __version__
from ndpos.cli import (
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_REJECTED,
    EXIT_USAGE,
    ConfigError,
    config_from_dict,
    list_catalog,
    main,
    read_table,
)

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def run_cli(*args):
    return main([str(a) for a in args])


def test_list_catalog(capsys):
    assert run_cli("list") == EXIT_OK
    out = capsys.readouterr().out
    line = next(ln for ln in out.splitlines() if ln.strip().startswith("disc "))
    assert "unit disc" in line
    slit = next(ln for ln in out.splitlines() if ln.strip().startswith("slit-disc"))
    assert "NEGATIVE_CONTROL" in slit
    assert out == list_catalog()
    for tid in ("exp-neg", "reciprocal", "rot:<angle>", "affine:<c>,<d>"):
        assert tid in out


def test_run_disc_weierstrass(tmp_path, capsys):
    out = tmp_path / "o"
    assert run_cli("run", CONFIGS / "disc_weierstrass.toml", "--out", out) == EXIT_OK
    certs = read_table(out / "certificates.csv")
    assert len(certs) == 16 and all(r["passed"] == "true" for r in certs)
    prof = read_table(out / "profile.csv")
    assert len(prof) == 16 * 6
    assert list(prof[0]) == ["z0_re", "z0_im", "piece", "k", "delta_k", "M_k", "argmax_re", "argmax_im"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["version"] == __version__ and manifest["seed"] == 0
    assert manifest["config"]["function"] == "weierstrass:0.5,13"
    for name in ("profile.csv", "certificates.csv", "en_test.csv"):
        assert (out / name).read_text().splitlines()[0].endswith(manifest["manifest"])
    for name in ("profiles.svg", "image_curve.svg"):
        assert manifest["manifest"] in (out / name).read_text()


def test_run_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli("run", CONFIGS / "disc_weierstrass.toml", "--out", a, "--workers", "1") == 0
    assert run_cli("run", CONFIGS / "disc_weierstrass.toml", "--out", b, "--workers", "3") == 0
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_rational_baseline(tmp_path):
    out = tmp_path / "r"
    assert run_cli("run", CONFIGS / "disc_rational.toml", "--out", out, "--no-plots") == EXIT_OK
    assert all(r["passed"] == "false" for r in read_table(out / "certificates.csv"))
    assert all(r["passed"] == "true" for r in read_table(out / "plateau.csv"))


@pytest.mark.parametrize("name", ["slit_disc", "half_plane_minus_ray"])
def test_negative_controls_need_expect_fail(tmp_path, name):
    cfg = CONFIGS / f"{name}.toml"
    assert run_cli("run", cfg, "--out", tmp_path / "x", "--no-plots") == EXIT_REJECTED
    assert not (tmp_path / "x").exists()
    out = tmp_path / "y"
    assert run_cli("run", cfg, "--out", out, "--no-plots", "--expect-fail") == EXIT_OK
    assert all(r["passed"] == "false" for r in read_table(out / "certificates.csv"))


def test_expectation_mismatch(tmp_path):
    cfg = CONFIGS / "disc_weierstrass.toml"
    assert run_cli("run", cfg, "--out", tmp_path, "--no-plots", "--expect-fail") == EXIT_MISMATCH


def test_underpowered_rejected(tmp_path):
    cfg = CONFIGS / "disc_weierstrass.toml"
    rc = run_cli("run", cfg, "--out", tmp_path, "--no-plots", "--ladder", "1e-3,1e-3,3,16")
    assert rc == EXIT_OK  # M_crit = 10 keeps the finest scale above the floor
    p = tmp_path / "weak.toml"
    p.write_text('[function]\nspec = "weierstrass:0.5,13"\n[analysis]\nladder = "1e-3,1e-3,3,16"\nM_crit = 0.005\n')
    assert run_cli("run", p, "--out", tmp_path / "w", "--no-plots") == EXIT_REJECTED


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        run_cli("frobnicate")
    assert e.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        run_cli("profile", "--domain", "disc")
    assert e.value.code == EXIT_USAGE
    bad = tmp_path / "bad.toml"
    bad.write_text('[domain]\nid = "annulus"\n')
    assert run_cli("run", bad, "--out", tmp_path / "o") == EXIT_USAGE
    bad.write_text('[domain]\nshape = "disc"\n')
    assert run_cli("run", bad) == EXIT_USAGE
    bad.write_text('[function]\nspec = "random:3,1.0"\n')
    assert run_cli("run", bad, "--out", tmp_path / "o") == EXIT_USAGE  # no seed
    assert run_cli("run", tmp_path / "missing.toml") == EXIT_USAGE


def test_config_parsing():
    cfg = config_from_dict({"seed": 4, "domain": {"id": "slit-disc", "j_interval": [0.1, 0.4]},
                            "analysis": {"en_n": 3}})
    assert cfg.j_interval == (0.1, 0.4) and cfg.en_n == (3,) and cfg.seed == 4
    with pytest.raises(ConfigError):
        config_from_dict({"analysis": {"expect": "maybe"}})


def test_unbounded_sections(tmp_path):
    out = tmp_path / "hp"
    assert run_cli("run", CONFIGS / "half_plane_J4.toml", "--out", out, "--no-plots") == EXIT_OK
    text = (out / "certificates.csv").read_text()
    labels = [ln for ln in text.splitlines() if ln.startswith("# exhaustion_radius")]
    assert [ln.split()[1] for ln in labels] == [f"exhaustion_radius={r}" for r in ("1.0", "2.0", "3.0", "4.0")]
    # sections are cumulative: X_1 inside X_2 inside ...
    sizes = []
    for ln in text.splitlines()[1:]:
        if ln.startswith("# exhaustion"):
            sizes.append(0)
        elif not ln.startswith("z0,"):
            sizes[-1] += 1
    assert sizes == sorted(sizes) and sizes[-1] == 16


def test_profile_command(capsys):
    assert run_cli("profile", "--domain", "disc", "--fn", "weierstrass:0.5,13", "--z0", "1",
                   "--ladder", "0.3,1/13,6,256") == EXIT_OK
    out = capsys.readouterr().out
    assert "certificate: passed=true" in out
    assert len([ln for ln in out.splitlines() if ln.startswith("1.0,0.0,")]) == 6
    rc = run_cli("profile", "--domain", "slit-disc", "--fn", "weierstrass:0.5,13", "--z0", "0.25",
                 "--j-interval", "0.1,0.4")
    assert rc == EXIT_REJECTED
    rc = run_cli("profile", "--domain", "slit-disc", "--fn", "weierstrass:0.5,13", "--z0", "0.25",
                 "--j-interval", "0.1,0.4", "--expect-fail")
    assert rc == EXIT_OK
    assert run_cli("profile", "--domain", "sector", "--fn", "weierstrass:0.5,13@auto",
                   "--z0", "1@0.5") == EXIT_OK


def test_fit_command(capsys):
    assert run_cli("fit", "--degree", "4", "8") == EXIT_OK
    rows = [ln.split(",") for ln in capsys.readouterr().out.splitlines() if ln[:1].isdigit()]
    assert [int(r[0]) for r in rows] == [4, 8]
    assert float(rows[1][4]) < float(rows[0][4])


def test_en_test_command(capsys):
    assert run_cli("en-test", "--fn", "poly:0,10", "--n", "2") == EXIT_OK
    assert "# E_2: 16/16" in capsys.readouterr().out
    assert run_cli("en-test", "--fn", "poly:0,1", "--n", "2") == EXIT_OK
    assert "# E_2: 0/16" in capsys.readouterr().out


def test_workers_env(monkeypatch):
    from ndpos.cli import worker_count
    monkeypatch.setenv("NDPOS_WORKERS", "3")
    assert worker_count(None) == 3
    assert worker_count(2) == 2
    monkeypatch.setenv("NDPOS_WORKERS", "x")
    assert worker_count(None) == 1
