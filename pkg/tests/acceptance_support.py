"""Run cache for the acceptance suite.

Full-size runs take minutes each, so their flat records are cached as JSON
under ``.acceptance-cache`` (override with ``MWFZP_ACCEPTANCE_CACHE``).
The key hashes the canonical config together with the package source
(docstrings and comments removed), so any code change forces a rerun.

``python tests/acceptance_support.py`` computes every record the suite
needs, which is the way to warm the cache ahead of ``pytest``.
"""
import ast
import hashlib
import json
import os
import pathlib
import sys
import tempfile

import mwfzp
from mwfzp.config import from_dict, preset
from mwfzp.runner import run_single, run_sweep, sweep_points

ROOT = pathlib.Path(__file__).resolve().parent.parent
CACHE = pathlib.Path(os.environ.get("MWFZP_ACCEPTANCE_CACHE", ROOT / ".acceptance-cache"))


def _strip_docstrings(tree):
    for node in ast.walk(tree):
        body = getattr(node, "body", None)
        if (isinstance(body, list) and body and isinstance(body[0], ast.Expr)
                and isinstance(body[0].value, ast.Constant) and isinstance(body[0].value.value, str)):
            node.body = body[1:] or [ast.Pass()]
    return tree


def source_hash():
    h = hashlib.sha256()
    pkg = pathlib.Path(mwfzp.__file__).parent
    for path in sorted(pkg.glob("*.py")):
        tree = _strip_docstrings(ast.parse(path.read_text()))
        h.update(path.name.encode())
        h.update(ast.dump(tree).encode())
    return h.hexdigest()


def canonical(cfg):
    d = cfg.to_dict()
    d.pop("sweep", None)
    d.pop("output", None)
    b = d["bias"]
    if b["scheme"] == "unbiased" or b["V1"] == 0:
        b.update(scheme="unbiased", V1=0.0, k_E=0.0)
    if b["scheme"] != "sinusoidal":
        b["k_E"] = 0.0
    return d


def cache_key(kind, payload):
    text = json.dumps({"kind": kind, "payload": payload, "source": source_hash()},
                      sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:24]


def _cached(kind, payload, compute):
    CACHE.mkdir(parents=True, exist_ok=True)
    path = CACHE / f"{kind}-{cache_key(kind, payload)}.json"
    if path.exists():
        return json.loads(path.read_text())
    value = compute()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(value, sort_keys=True, default=str))
    os.replace(tmp, path)
    return value


def _clean(record):
    return json.loads(json.dumps(record, default=str))


def record(cfg):
    """Flat run record of ``cfg`` (its sweep block is ignored)."""
    payload = canonical(cfg)
    return _cached("run", payload, lambda: _clean(run_single(from_dict(payload)).record))


def sweep_records(cfg):
    """``[(values, record), ...]`` for every point of a sweep config."""
    return [(values, record(pcfg)) for values, pcfg in sweep_points(cfg)]


def preset_records(name):
    return sweep_records(preset(name))


def sweep_csv(name):
    """Text of ``sweep.csv`` from one fresh run of preset ``name``."""
    with tempfile.TemporaryDirectory() as tmp:
        run_sweep(preset(name), threads=1, out_dir=tmp)
        return (pathlib.Path(tmp) / "sweep.csv").read_bytes().decode()


def first_sweep_csv(name):
    """Cached ``sweep.csv`` text of the first run of preset ``name``."""
    return _cached("csv", {"preset": name}, lambda: sweep_csv(name))


# ------------------------------------------------------------ convergence

def convergence_configs():
    """Baseline plus its halved-step and refined-grid variants."""
    base = preset("baseline-50nm")
    d = base.to_dict()
    d.pop("sweep", None)
    half = json.loads(json.dumps(d))
    half["solver"]["dT"] = d["solver"]["dT"] / 2
    fine = json.loads(json.dumps(d))
    g = d["grid"]
    fine["grid"].update(nx=2 * g["nx"] - 1, ny=2 * g["ny"] - 1, dx=g["dx"] / 2)
    fine["solver"]["absorber_band"] = 2 * d["solver"]["absorber_band"]
    return {"base": base, "half_dT": from_dict(half), "fine_grid": from_dict(fine)}


THIN_DETERMINISM_PRESET = "benchmark-thin"
SWEEP_PRESETS = ("benchmark-thin", "baseline-50nm", "uniform-sweep", "sqrtn-sweep",
                 "sin-grid", "temperature-sweep")


def warm(names=None):
    for name in names or SWEEP_PRESETS:
        for values, rec in preset_records(name):
            print(name, values, "Tc", rec["Tc"], flush=True)
    for label, cfg in convergence_configs().items():
        print("convergence", label, "Tc", record(cfg)["Tc"], flush=True)
    first_sweep_csv(THIN_DETERMINISM_PRESET)
    print("determinism csv cached", flush=True)


if __name__ == "__main__":
    warm(sys.argv[1:] or None)
