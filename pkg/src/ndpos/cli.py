"""Experiment runner: compose a domain, a function and an analysis, write tables and plots.

Function specs
--------------
``weierstrass:a,b``        lacunary seed (``weierstrass:a,b,permissive`` relaxes ``ab``)
``pole:p[,c]``             ``c / (z - p)``
``poly:c0,c1,...``         polynomial, ascending coefficients
``random:k,scale[,order]`` seeded random rational on the domain's pole sites
``rational:<path>``        serialized rational function
``<spec>@<chain>``         pulled back along a transport chain (``exp-neg|rot:pi/2``);
                           ``@auto`` uses one per-piece chain for every piece of J
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .domains import (
    CATALOG,
    BoundarySet,
    DomainSpec,
    domain_from_id,
    grid_J,
    seminorm,
)
from .errors import NdposError
from .perturb import (
    RationalFunction,
    Sum,
    fit_fixed_poles,
    loads,
    random_rational,
)
from .quotient import (
    ScaleLadder,
    Underpowered,
    bounded_quotient_check,
    certify_blowup,
    default_thresholds,
    en_search,
    profile,
)
from .series import LacunarySeries
from .transport import (
    TRANSPORT_CATALOG,
    Transported,
    chain_from_ids,
    piece_chain,
    transport_function,
)

EXIT_OK, EXIT_USAGE, EXIT_REJECTED, EXIT_MISMATCH = 0, 1, 2, 3
WORKERS_ENV = "NDPOS_WORKERS"


class ConfigError(NdposError):
    tag = "ConfigError"


class Rejected(NdposError):
    tag = "Rejected"


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1, not argparse's 2 (reserved for analysis rejection)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- config


@dataclasses.dataclass
class ExperimentConfig:
    domain: str = "disc"
    n_max: int = 4
    r_max: float = 16.0
    half_side: float = 1.0
    j_interval: tuple | None = None
    function: str = "weierstrass:0.5,13"
    perturbation: str = ""
    grid: int = 16
    ladder: str = "0.3,1/13,6,256"
    certificate: bool = True
    slope_min: float | None = None
    M_crit: float | None = None
    rescale_by_deriv_floor: bool = True
    plateau: bool = False
    en_n: tuple = ()
    en_grid: int = 16
    en_samples: int = 64
    en_levels: int = 6
    en_rho: float = 0.1
    expect: str = "any"
    seed: int | None = None
    plots: bool = True
    out: str = "ndpos-out"

    def echo(self) -> dict:
        """Everything that determines artifact content (output location excluded)."""
        d = dataclasses.asdict(self)
        d.pop("out")
        if d["j_interval"] is not None:
            d["j_interval"] = list(d["j_interval"])
        d["en_n"] = list(d["en_n"])
        return d


_SECTIONS = {
    "domain": {"id": "domain", "n_max": "n_max", "r_max": "r_max", "half_side": "half_side",
               "j_interval": "j_interval"},
    "function": {"spec": "function", "perturbation": "perturbation"},
    "analysis": {k: k for k in ("grid", "ladder", "certificate", "slope_min", "M_crit",
                                "rescale_by_deriv_floor", "plateau", "en_n", "en_grid",
                                "en_samples", "en_levels", "en_rho", "expect")},
    "output": {"dir": "out", "plots": "plots"},
}


def config_from_dict(data: dict) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for key, value in data.items():
        if key == "seed":
            cfg.seed = int(value)
        elif key in _SECTIONS and isinstance(value, dict):
            fields = _SECTIONS[key]
            for k, v in value.items():
                if k not in fields:
                    raise ConfigError(f"unknown key {key}.{k}")
                setattr(cfg, fields[k], v)
        else:
            raise ConfigError(f"unknown config entry {key!r}")
    return normalize(cfg)


def normalize(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.j_interval is not None:
        cfg.j_interval = tuple(float(x) for x in cfg.j_interval)
        if len(cfg.j_interval) != 2:
            raise ConfigError("j_interval needs two numbers")
    cfg.en_n = tuple(int(n) for n in (cfg.en_n if not isinstance(cfg.en_n, int) else [cfg.en_n]))
    if cfg.expect not in ("any", "pass", "fail"):
        raise ConfigError(f"expect must be any, pass or fail, got {cfg.expect!r}")
    if cfg.grid < 1:
        raise ConfigError("grid must be >= 1")
    ScaleLadder.parse(cfg.ladder)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


# ---------------------------------------------------------------- building blocks


def build_domain(cfg: ExperimentConfig) -> DomainSpec:
    return domain_from_id(cfg.domain, n_max=cfg.n_max, r_max=cfg.r_max,
                          half_side=cfg.half_side, j_interval=cfg.j_interval)


def _floats(arg: str) -> list[str]:
    return [t.strip() for t in arg.split(",") if t.strip()]


def parse_base_function(spec: str, domain: DomainSpec, seed: int | None):
    name, _, arg = spec.strip().partition(":")
    args = _floats(arg)
    if name == "weierstrass":
        if len(args) not in (2, 3) or (len(args) == 3 and args[2] != "permissive"):
            raise ConfigError(f"weierstrass needs a,b: {spec!r}")
        return LacunarySeries.from_ab(float(args[0]), int(args[1]), permissive=len(args) == 3)
    if name == "pole":
        if len(args) not in (1, 2):
            raise ConfigError(f"pole needs p[,c]: {spec!r}")
        c = complex(args[1]) if len(args) == 2 else 1.0
        return RationalFunction.simple(complex(args[0]), c)
    if name == "poly":
        return RationalFunction(polynomial=tuple(complex(a) for a in args))
    if name == "random":
        if seed is None:
            raise ConfigError("random rational functions need a seed")
        if len(args) not in (2, 3):
            raise ConfigError(f"random needs k,scale[,order]: {spec!r}")
        order = int(args[2]) if len(args) == 3 else 1
        return random_rational(domain, int(args[0]), float(args[1]), seed, order)
    if name == "rational":
        return loads(Path(arg).read_text())
    raise ConfigError(f"unknown function spec {spec!r}")


def function_for_piece(spec: str, domain: DomainSpec, piece_index: int, seed: int | None):
    """Evaluable for one piece of J.  Returns ``(f, deriv_floor or None)``."""
    base_spec, at, chain_spec = spec.partition("@")
    f = parse_base_function(base_spec, domain, seed)
    if not at:
        return f, None
    J = BoundarySet((domain.boundary_J.pieces[piece_index],))
    chain = piece_chain(domain, piece_index) if chain_spec.strip() == "auto" else chain_from_ids(chain_spec)
    t = transport_function(f, chain, J)
    return t, t.deriv_floor


def _piece_domain(domain: DomainSpec, index: int) -> DomainSpec:
    if len(domain.boundary_J.pieces) == 1:
        return domain
    return domain.with_J(BoundarySet((domain.boundary_J.pieces[index],)))


def worker_count(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- analysis


@dataclasses.dataclass
class PieceJob:
    piece: int
    domain: DomainSpec
    f: object
    floor: float | None
    grid: list


def _piece_jobs(cfg: ExperimentConfig, domain: DomainSpec) -> list[PieceJob]:
    pieces = domain.boundary_J.pieces
    per_piece = "@" in cfg.function or len(pieces) > 1
    jobs = []
    if not per_piece:
        f, floor = function_for_piece(cfg.function, domain, 0, cfg.seed)
        f = _with_perturbation(f, cfg, domain)
        return [PieceJob(-1, domain, f, floor, grid_J(domain, cfg.grid))]
    # split the grid over pieces in proportion to length, then analyze each piece alone
    full = grid_J(domain, cfg.grid)
    for i in range(len(pieces)):
        sub = _piece_domain(domain, i)
        grid = [sub.sample(0, s.parameter) for s in full if s.piece_index == i]
        if not grid:
            continue
        f, floor = function_for_piece(cfg.function, domain, i, cfg.seed)
        f = _with_perturbation(f, cfg, domain)
        jobs.append(PieceJob(i, sub, f, floor, grid))
    return jobs


def _with_perturbation(f, cfg, domain):
    if not cfg.perturbation:
        return f
    q = parse_base_function(cfg.perturbation, domain, cfg.seed)
    if not isinstance(q, RationalFunction):
        raise ConfigError("perturbation must be a rational function spec")
    return Sum(f, q)


def thresholds(cfg: ExperimentConfig, job: PieceJob) -> tuple[float, float]:
    src = job.f
    # unwrap transports and sums down to the seed
    while isinstance(src, (Transported, Sum)):
        src = src.source if isinstance(src, Transported) else src.f
    if isinstance(src, LacunarySeries):
        slope_min, M_crit = default_thresholds(src.params)
    else:
        slope_min, M_crit = default_thresholds(LacunarySeries.from_ab(0.5, 13).params)
    if cfg.slope_min is not None:
        slope_min = float(cfg.slope_min)
    if cfg.M_crit is not None:
        M_crit = float(cfg.M_crit)
    if job.floor is not None and cfg.rescale_by_deriv_floor:
        M_crit *= job.floor
    return slope_min, M_crit


@dataclasses.dataclass
class RunResult:
    profiles: list
    certificates: list
    plateaus: list
    en_rows: list
    jobs: list
    domain: DomainSpec


def analyze(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    domain = build_domain(cfg)
    ladder = ScaleLadder.parse(cfg.ladder)
    jobs = _piece_jobs(cfg, domain)
    profiles, certs, plateaus, en_rows = [], [], [], []
    for job in jobs:
        profs = _pmap(lambda z0: profile(job.f, job.domain, z0, ladder), job.grid, workers)
        piece_ids = [job.piece if job.piece >= 0 else z0.piece_index for z0 in job.grid]
        profiles.extend(zip(piece_ids, profs))
        if cfg.certificate:
            slope_min, M_crit = thresholds(cfg, job)
            certs.extend(zip(piece_ids, [certify_blowup(p, slope_min, M_crit) for p in profs]))
        if cfg.plateau:
            reps = _pmap(lambda z0: bounded_quotient_check(job.f, job.domain, z0, ladder),
                         job.grid, workers)
            plateaus.extend(zip(piece_ids, reps))
        for n in cfg.en_n:
            grid = job.grid if cfg.en_grid == cfg.grid else _regrid(job, cfg.en_grid, domain, cfg.grid)
            found = _pmap(lambda z0: en_search(job.f, job.domain, z0, n, cfg.en_samples,
                                               cfg.en_levels, cfg.en_rho), grid, workers)
            ids = [job.piece if job.piece >= 0 else z0.piece_index for z0 in grid]
            en_rows.extend((n, i, w) for i, w in zip(ids, found))
    return RunResult(profiles, certs, plateaus, en_rows, jobs, domain)


def _regrid(job: PieceJob, count: int, domain: DomainSpec, _):
    if job.piece < 0:
        return grid_J(job.domain, count)
    full = grid_J(domain, count)
    return [job.domain.sample(0, s.parameter) for s in full if s.piece_index == job.piece]


# ---------------------------------------------------------------- output


def _num(x) -> str:
    return repr(float(x))


def manifest_hash(cfg: ExperimentConfig) -> str:
    payload = json.dumps({"tool": "ndpos", "version": __version__, "seed": cfg.seed,
                          "config": cfg.echo()}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def _sections(domain: DomainSpec, points):
    """``[(label, mask)]``: one cumulative section per exhaustion radius for unbounded domains."""
    if domain.bounded or not domain.exhaustion_radii:
        return [(None, [True] * len(points))]
    radii = list(domain.exhaustion_radii)
    mods = [abs(p) for p in points]
    if mods and max(mods) > radii[-1]:
        radii.append(domain.r_max)
    return [(R, [m <= R + 1e-12 for m in mods]) for R in radii]


def _seminorm_text(cfg, result, R) -> str:
    job = result.jobs[0]
    try:
        s = seminorm(result.domain, job.f, R)
        return f" seminorm={_num(s)}"
    except NdposError:
        return ""


def _write_table(header_line: str, columns, rows_by_section) -> str:
    out = io.StringIO()
    out.write(header_line + "\n")
    for label, rows in rows_by_section:
        if label is not None:
            out.write(label + "\n")
        out.write(",".join(columns) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")
    return out.getvalue()


def profile_rows(profiles):
    rows = []
    for piece, p in profiles:
        for k in range(p.ladder.depth):
            s = p.argmax[k]
            rows.append((p.z0.point, [
                _num(p.z0.point.real), _num(p.z0.point.imag), str(piece), str(k + 1),
                _num(p.deltas[k]), _num(p.M[k]),
                _num(s.point.real) if s is not None else "nan",
                _num(s.point.imag) if s is not None else "nan",
            ]))
    return rows


PROFILE_COLUMNS = ("z0_re", "z0_im", "piece", "k", "delta_k", "M_k", "argmax_re", "argmax_im")
CERT_COLUMNS = ("z0", "piece", "growth_slope", "final_M", "slope_min", "M_crit", "passed", "crossings")
EN_COLUMNS = ("n", "z0_re", "z0_im", "piece", "found", "witness_re", "witness_im", "distance", "quotient")
PLATEAU_COLUMNS = ("z0_re", "z0_im", "piece", "derivative_modulus", "finest_M",
                   "finest_relative_error", "bounded", "passed")


def _z(z: complex) -> str:
    return f"{complex(z)!r}".strip("()")


def cert_rows(certs):
    return [(c.z0.point, [_z(c.z0.point), str(piece), _num(c.growth_slope), _num(c.final_M),
                          _num(c.slope_min), _num(c.M_crit), str(c.passed).lower(),
                          c.crossings_text()]) for piece, c in certs]


def en_table_rows(en_rows):
    rows = []
    for n, piece, w in en_rows:
        z = w.z0.point
        if w.found:
            tail = [_num(w.witness.point.real), _num(w.witness.point.imag), _num(w.distance), _num(w.quotient)]
        else:
            tail = ["nan"] * 4
        rows.append((z, [str(n), _num(z.real), _num(z.imag), str(piece), str(w.found).lower()] + tail))
    return rows


def plateau_rows(plateaus):
    rows = []
    for piece, r in plateaus:
        z = r.z0.point
        finest = [m for m in r.M if math.isfinite(m)][-1]
        rows.append((z, [_num(z.real), _num(z.imag), str(piece), _num(r.derivative_modulus),
                         _num(finest), _num(r.finest_relative_error),
                         str(r.bounded_ok).lower(), str(r.passed).lower()]))
    return rows


def _sectioned(cfg, result, rows):
    out = []
    secs = _sections(result.domain, [z for z, _ in rows])
    for R, mask in secs:
        label = None
        if R is not None:
            label = f"# exhaustion_radius={_num(R)}{_seminorm_text(cfg, result, R)}"
        out.append((label, [r for (_, r), keep in zip(rows, mask) if keep]))
    return out


def _svg(fig, path: Path, digest: str):
    import matplotlib

    matplotlib.rcParams["svg.hashsalt"] = digest
    fig.savefig(path, format="svg",
                metadata={"Date": None, "Creator": f"ndpos {__version__}",
                          "Description": f"manifest={digest}"})


def write_plots(cfg, result: RunResult, outdir: Path, digest: str) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = []
    if result.profiles:
        fig, ax = plt.subplots(figsize=(6, 4))
        for _, p in result.profiles:
            ks = np.arange(1, p.ladder.depth + 1)
            ax.plot(ks, np.log(np.maximum(p.as_array(), 1e-300)), marker="o", lw=0.8)
        ax.set_xlabel("k")
        ax.set_ylabel("ln M_k")
        ax.set_title(f"{cfg.function} on {result.domain.id}")
        _svg(fig, outdir / "profiles.svg", digest)
        plt.close(fig)
        names.append("profiles.svg")
    fig, ax = plt.subplots(figsize=(5, 5))
    for job in result.jobs:
        pts = np.array([s.point for s in grid_J(job.domain, 4000)])
        vals = np.asarray(job.f(pts))
        ax.plot(vals.real, vals.imag, lw=0.3, color="k")
    ax.set_aspect("equal")
    ax.set_title("image of J")
    _svg(fig, outdir / "image_curve.svg", digest)
    plt.close(fig)
    names.append("image_curve.svg")
    return names


def write_artifacts(cfg: ExperimentConfig, result: RunResult, outdir) -> dict:
    """Write tables, plots and manifest; returns the manifest dict."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    digest = manifest_hash(cfg)
    head = f"# ndpos {__version__} manifest={digest}"
    files = {}
    tables = [("profile.csv", PROFILE_COLUMNS, profile_rows(result.profiles))]
    if cfg.certificate:
        tables.append(("certificates.csv", CERT_COLUMNS, cert_rows(result.certificates)))
    if cfg.en_n:
        tables.append(("en_test.csv", EN_COLUMNS, en_table_rows(result.en_rows)))
    if cfg.plateau:
        tables.append(("plateau.csv", PLATEAU_COLUMNS, plateau_rows(result.plateaus)))
    for name, cols, rows in tables:
        text = _write_table(head, cols, _sectioned(cfg, result, rows))
        (outdir / name).write_text(text)
        files[name] = hashlib.sha256(text.encode()).hexdigest()
    if cfg.plots:
        for name in write_plots(cfg, result, outdir, digest):
            files[name] = None
    manifest = {"tool": "ndpos", "version": __version__, "seed": cfg.seed,
                "manifest": digest, "config": cfg.echo(),
                "domain_notes": list(result.domain.notes), "artifacts": files}
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def read_table(path) -> list[dict]:
    """Rows of an artifact table as dicts (all sections, comment lines dropped)."""
    rows, header = [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or not line:
            continue
        cells = line.split(",")
        if header is None or cells == header:
            header = cells
            continue
        rows.append(dict(zip(header, cells)))
    return rows


# ---------------------------------------------------------------- commands


def run(cfg: ExperimentConfig, *, expect_fail: bool = False, workers: int = 1, stdout=None) -> int:
    """Execute an experiment; returns the exit status."""
    stdout = stdout or sys.stdout
    domain = build_domain(cfg)
    expect = "fail" if expect_fail else cfg.expect
    if domain.negative_control and cfg.certificate and not expect_fail:
        print(f"rejected: {domain.id} is a NEGATIVE_CONTROL domain; blowup-certificate "
              "analysis requires --expect-fail", file=sys.stderr)
        return EXIT_REJECTED
    try:
        result = analyze(cfg, workers)
    except Underpowered as exc:
        print(f"rejected: {exc.tag}: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    manifest = write_artifacts(cfg, result, cfg.out)
    passed = [c.passed for _, c in result.certificates]
    print(f"{len(passed)} certificates, {sum(passed)} passed; manifest {manifest['manifest'][:12]} "
          f"-> {cfg.out}", file=stdout)
    if result.plateaus:
        ok = sum(r.passed for _, r in result.plateaus)
        print(f"plateau check: {ok}/{len(result.plateaus)} passed", file=stdout)
    for n in cfg.en_n:
        found = [w.found for m, _, w in result.en_rows if m == n]
        print(f"E_{n}: witnesses at {sum(found)}/{len(found)} base points", file=stdout)
    if cfg.certificate and passed:
        if expect == "fail" and any(passed):
            print("expectation mismatch: a certificate passed under expect-fail", file=sys.stderr)
            return EXIT_MISMATCH
        if expect == "pass" and not all(passed):
            print("expectation mismatch: a certificate failed under expect=pass", file=sys.stderr)
            return EXIT_MISMATCH
    return EXIT_OK


def list_catalog() -> str:
    lines = ["domains:"]
    for key, (text, negative) in CATALOG.items():
        tag = "  NEGATIVE_CONTROL" if negative else ""
        lines.append(f"  {key:<24}{text}{tag}")
    lines.append("transports:")
    for key, text in TRANSPORT_CATALOG.items():
        lines.append(f"  {key:<24}{text}")
    lines.append("functions:")
    for key in ("weierstrass:a,b", "pole:p[,c]", "poly:c0,c1,...", "random:k,scale[,order]",
                "rational:<path>", "<spec>@<chain>|auto"):
        lines.append(f"  {key}")
    return "\n".join(lines) + "\n"


def _locate(domain: DomainSpec, text: str):
    if "@" in text:
        piece, _, t = text.partition("@")
        return domain.sample(int(piece), float(t))
    return domain.locate(complex(text.replace(" ", "")), tol=1e-3)


def _overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    for name in ("seed", "grid", "ladder", "out"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "no_plots", False):
        cfg.plots = False
    return normalize(cfg)


def cmd_run(args) -> int:
    cfg = _overrides(load_config(args.config), args)
    return run(cfg, expect_fail=args.expect_fail, workers=worker_count(args.workers))


def cmd_list(args) -> int:
    sys.stdout.write(list_catalog())
    return EXIT_OK


def cmd_profile(args) -> int:
    cfg = ExperimentConfig(domain=args.domain, function=args.fn, ladder=args.ladder,
                           seed=args.seed, j_interval=args.j_interval, n_max=args.n_max)
    domain = build_domain(normalize(cfg))
    z0 = _locate(domain, args.z0)
    job_dom = _piece_domain(domain, z0.piece_index)
    z0_local = job_dom.sample(0, z0.parameter) if job_dom is not domain else z0
    f, floor = function_for_piece(args.fn, domain, z0.piece_index, args.seed)
    ladder = ScaleLadder.parse(args.ladder)
    p = profile(f, job_dom, z0_local, ladder)
    job = PieceJob(z0.piece_index, job_dom, f, floor, [z0_local])
    cfg.slope_min, cfg.M_crit = args.slope_min, args.m_crit
    slope_min, M_crit = thresholds(cfg, job)
    out = sys.stdout
    out.write(",".join(PROFILE_COLUMNS) + "\n")
    for _, row in profile_rows([(z0.piece_index, p)]):
        out.write(",".join(row) + "\n")
    if domain.negative_control and not args.expect_fail:
        print(f"rejected: {domain.id} is a NEGATIVE_CONTROL domain; pass --expect-fail "
              "to certify", file=sys.stderr)
        return EXIT_REJECTED
    try:
        c = certify_blowup(p, slope_min, M_crit)
    except Underpowered as exc:
        print(f"rejected: {exc.tag}: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    out.write(f"certificate: passed={str(c.passed).lower()} growth_slope={c.growth_slope:.6g} "
              f"final_M={c.final_M:.6g} slope_min={slope_min:.6g} M_crit={M_crit:.6g}\n")
    if args.expect_fail and c.passed:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_fit(args) -> int:
    domain = domain_from_id(args.domain)
    f, _ = function_for_piece(args.target, domain, 0, args.seed)
    pts = np.array([s.point for s in grid_J(domain, args.samples)])
    vals = np.asarray(f(pts))
    if args.poles == "sites":
        poles = list(domain.pole_sites)
    elif args.poles == "ring":
        poles = [2.0 * np.exp(2j * np.pi * k / 8) for k in range(8)]
    elif args.poles in ("", "none"):
        poles = []
    else:
        poles = [complex(t) for t in args.poles.split(",")]
    print("degree,columns,max_error,rms_error,residual_norm")
    for deg in args.degree:
        r = fit_fixed_poles(pts, vals, poles, deg, args.orders)
        print(f"{deg},{r.columns},{r.max_error!r},{r.rms_error!r},{r.residual_norm!r}")
    print(f"# {r.note}")
    return EXIT_OK


def cmd_en_test(args) -> int:
    cfg = normalize(ExperimentConfig(domain=args.domain, function=args.fn, seed=args.seed,
                                     j_interval=args.j_interval, n_max=args.n_max,
                                     grid=args.grid, en_n=tuple(args.n), en_grid=args.grid,
                                     en_samples=args.samples, en_levels=args.levels,
                                     en_rho=args.rho, certificate=False))
    result = analyze(cfg, worker_count(args.workers))
    out = sys.stdout
    out.write(",".join(EN_COLUMNS) + "\n")
    for _, row in en_table_rows(result.en_rows):
        out.write(",".join(row) + "\n")
    for n in cfg.en_n:
        found = [w.found for m, _, w in result.en_rows if m == n]
        out.write(f"# E_{n}: {sum(found)}/{len(found)}\n")
    return EXIT_OK


def _j_interval(text: str):
    a, _, b = text.partition(",")
    return (float(a), float(b))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ndpos", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ndpos {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out")
    r.add_argument("--seed", type=int)
    r.add_argument("--grid", type=int)
    r.add_argument("--ladder")
    r.add_argument("--workers", type=int, help=f"worker threads (default ${WORKERS_ENV} or 1)")
    r.add_argument("--expect-fail", action="store_true")
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=cmd_run)

    ls = sub.add_parser("list", help="list catalog ids")
    ls.set_defaults(func=cmd_list)

    pr = sub.add_parser("profile", help="one-shot quotient profile")
    pr.add_argument("--domain", required=True)
    pr.add_argument("--fn", required=True)
    pr.add_argument("--z0", required=True, help="point near J, or piece@t")
    pr.add_argument("--ladder", default="0.3,1/13,6,256")
    pr.add_argument("--slope-min", type=float)
    pr.add_argument("--m-crit", type=float)
    pr.add_argument("--seed", type=int)
    pr.add_argument("--n-max", type=int, default=4)
    pr.add_argument("--j-interval", type=_j_interval)
    pr.add_argument("--expect-fail", action="store_true")
    pr.set_defaults(func=cmd_profile)

    ft = sub.add_parser("fit", help="fixed-pole least-squares density demonstrator")
    ft.add_argument("--domain", default="disc")
    ft.add_argument("--target", default="weierstrass:0.5,13")
    ft.add_argument("--samples", type=int, default=256)
    ft.add_argument("--poles", default="ring", help="ring, sites, none or a comma list")
    ft.add_argument("--degree", type=int, nargs="+", default=[4, 8])
    ft.add_argument("--orders", type=int, default=3)
    ft.add_argument("--seed", type=int)
    ft.set_defaults(func=cmd_fit)

    en = sub.add_parser("en-test", help="finite-scale E_n membership test")
    en.add_argument("--domain", default="disc")
    en.add_argument("--fn", required=True)
    en.add_argument("--n", type=int, nargs="+", required=True)
    en.add_argument("--grid", type=int, default=16)
    en.add_argument("--samples", type=int, default=64)
    en.add_argument("--levels", type=int, default=6)
    en.add_argument("--rho", type=float, default=0.1)
    en.add_argument("--seed", type=int)
    en.add_argument("--n-max", type=int, default=4)
    en.add_argument("--j-interval", type=_j_interval)
    en.add_argument("--workers", type=int)
    en.set_defaults(func=cmd_en_test)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NdposError, OSError) as exc:
        tag = getattr(exc, "tag", type(exc).__name__)
        print(f"ndpos: {tag}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
