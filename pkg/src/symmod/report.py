"""Trial orchestration, report assembly and matrix file I/O."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import theorems as th
from .matcore import DEFAULT_TOL, MatrixError, Tolerance
from .probe import SearchTarget, frobenius_bound, search
from .sampler import EnsembleSpec, sample, seed_stream

SEED_ENV = "SYMMOD_SEED"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass
class RunConfig:
    suite: str = "all"
    trials: int = 100
    dims: list[int] = field(default_factory=lambda: list(range(1, 9)))
    m_values: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    seed: int = 0
    tol: float = 1e-8
    out: str | None = None
    format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be a nonempty list of positive integers")
        if not self.m_values or any(m < 1 for m in self.m_values):
            raise ValueError("m values must be positive")
        if self.format not in ("json", "csv-summary"):
            raise ValueError(f"unknown format {self.format!r}")


# -- input generators --------------------------------------------------------

def _independent(kind):
    def gen(seed, n, m):
        return [sample(EnsembleSpec(kind, n, seed_stream(seed, k))) for k in range(m)]
    return gen


def _split_of(base):
    def gen(seed, n, m):
        return sample(EnsembleSpec("split", n, seed, m=m, base=base))
    return gen


def _pair(kind):
    def gen(seed, n, m):
        return [sample(EnsembleSpec(kind, n, seed_stream(seed, k))) for k in range(2)]
    return gen


def _single(kind):
    def gen(seed, n, m):
        return [sample(EnsembleSpec(kind, n, seed))]
    return gen


GENERAL = {"ginibre": _independent("ginibre"), "normal": _independent("normal"),
           "involution-split": _split_of("involution")}
POLAR_HERMITIAN = {"polar-hermitian-split": _split_of("polar_hermitian"),
                   "involution-split": _split_of("involution"),
                   "hermitian-unitary-split": _split_of("hermitian_unitary")}


@dataclass(frozen=True)
class Suite:
    ensembles: dict[str, Callable]
    verify: Callable[[list[np.ndarray], Tolerance, int], th.WitnessReport]
    # the default tolerance for this statement when the run uses 1e-8
    tol_override: float | None = None


def _tol(tol, override):
    return Tolerance(rel=max(tol.rel, override)) if override else tol


SUITES: dict[str, Suite] = {
    "thm-2.1": Suite(GENERAL, lambda X, t, s: th.verify_thm_2_1(X, tol=t)),
    "cor-2.2": Suite(GENERAL, lambda X, t, s: th.verify_cor_2_2(X, tol=t)),
    "cor-2.3": Suite(GENERAL, lambda X, t, s: th.verify_cor_2_3(X, tol=t)),
    "cor-2.4": Suite(GENERAL, lambda X, t, s: th.verify_cor_2_4(X, tol=t)),
    "cor-2.5": Suite(GENERAL, lambda X, t, s: th.verify_cor_2_5(X, tol=t)),
    "proof-blocks": Suite({"ginibre": _pair("ginibre")},
                          lambda X, t, s: th.verify_proof_blocks(X[0], X[1], tol=t)),
    "thm-3.4": Suite(POLAR_HERMITIAN, lambda X, t, s: th.verify_thm_3_4(X, tol=t)),
    "cor-3.5": Suite(POLAR_HERMITIAN, lambda X, t, s: th.verify_cor_3_5(X, tol=t)),
    "cor-3.6": Suite({"hermitian-unitary-split": _split_of("hermitian_unitary")},
                     lambda X, t, s: th.verify_cor_3_6(X, tol=t)),
    "cor-3.7": Suite(POLAR_HERMITIAN, lambda X, t, s: th.verify_cor_3_7(X, tol=t)),
    "cor-4.2": Suite({"normal": _pair("normal")},
                     lambda X, t, s: th.verify_cor_4_2(X[0], X[1], tol=t)),
    "eq-schur": Suite({"normal": _pair("normal")},
                      lambda X, t, s: th.verify_eq_schur(X[0], X[1], tol=t)),
    "cor-1.2-1.4": Suite({"ginibre": _single("ginibre")},
                         lambda X, t, s: th.verify_cor_1_2_1_4(X[0], tol=t)),
    "cor-5.1": Suite({"ginibre": _pair("ginibre")},
                     lambda X, t, s: th.verify_cor_5_1(X[0], X[1], seed=s, tol=t)),
    "eqc2": Suite({"ginibre": _independent("ginibre")}, lambda X, t, s: th.verify_eqc2(X, tol=t)),
    "thm-6.2": Suite(POLAR_HERMITIAN, lambda X, t, s: th.verify_thm_6_2(X, tol=t),
                     tol_override=th.GEOMEAN_TOL.rel),
    "cor-6.3": Suite(POLAR_HERMITIAN, lambda X, t, s: th.verify_cor_6_3(X, tol=t)),
}

# statements that only make sense on user-supplied matrices
INPUT_ONLY: dict[str, Callable] = {
    "opnorm-triangle": lambda X, t: th.verify_opnorm_triangle_failure(X[0], X[1], tol=t),
    "question-6.4": lambda X, t: th.verify_question_6_4_probe(X, tol=t),
}


def suite_names(suite: str) -> list[str]:
    if suite == "all":
        return list(SUITES)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    return [suite]


# -- JSON helpers ------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return matrix_to_json(x)
    return x


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"n": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixError(f"malformed matrix object: {exc}") from exc
    if re.size != n * n or im.size != n * n:
        raise MatrixError(f"matrix data does not match n={n}")
    M = (re + 1j * im).reshape(n, n)
    if not np.all(np.isfinite(M)):
        raise MatrixError("matrix file contains non-finite values")
    return M


def load_matrix_file(path: str | os.PathLike) -> list[np.ndarray]:
    """Read matrices from JSON.

    Accepts a single ``{"n", "re", "im"}`` object, a list of them, an object
    with a ``"matrices"`` list, or a search report (its ``argmax``).
    """
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(data, dict):
        if "n" in data:
            data = [data]
        elif "matrices" in data:
            data = data["matrices"]
        elif "result" in data and "argmax" in data["result"]:
            data = data["result"]["argmax"]
        else:
            raise MatrixError(f"{path}: no matrices found")
    if not isinstance(data, list) or not data:
        raise MatrixError(f"{path}: expected a nonempty list of matrices")
    return [matrix_from_json(obj) for obj in data]


def save_matrix_file(path: str | os.PathLike, mats: list[np.ndarray]) -> None:
    Path(path).write_text(json.dumps({"matrices": [matrix_to_json(M) for M in mats]}, indent=1))


# -- verify ------------------------------------------------------------------

def _grid(cfg: RunConfig, t: int) -> tuple[int, int]:
    nd = len(cfg.dims)
    return cfg.dims[t % nd], cfg.m_values[(t // nd) % len(cfg.m_values)]


def _run_trial(args) -> dict:
    sid, t, seed, n, m, ens, rel = args
    suite = SUITES[sid]
    tol = _tol(Tolerance(rel=rel), suite.tol_override)
    rec = {"statement_id": sid, "trial": t, "seed": seed, "n": n, "m": m, "ensemble": ens}
    try:
        mats = suite.ensembles[ens](seed, n, m)
        rep = suite.verify(mats, tol, seed)
    except Exception as exc:  # recorded, turns the run red
        rec.update(kind="error", value=None, bound=None, passed=False,
                   error=f"{type(exc).__name__}: {exc}")
        return rec
    rec.update(kind=rep.kind, value=rep.value, bound=rep.bound, passed=rep.passed,
               digest=rep.inputs_digest, extras=_clean(rep.extras))
    return rec


def _trial_args(cfg: RunConfig):
    for sid in suite_names(cfg.suite):
        root = seed_stream(cfg.seed, zlib.crc32(sid.encode()))
        names = list(SUITES[sid].ensembles)
        for t in range(cfg.trials):
            n, m = _grid(cfg, t)
            yield sid, t, seed_stream(root, t), n, m, names[t % len(names)], cfg.tol


def replay_inputs(record: dict) -> list[np.ndarray]:
    """Regenerate the matrices of a report record."""
    return SUITES[record["statement_id"]].ensembles[record["ensemble"]](
        record["seed"], record["n"], record["m"])


def aggregate(records: list[dict]) -> dict:
    out: dict[str, dict] = {}
    for rec in records:
        a = out.setdefault(rec["statement_id"], {"trials": 0, "passed": 0, "errors": 0,
                                                 "worst_margin": None, "max_ratio": None,
                                                 "argext_trial": None, "argext_seed": None})
        a["trials"] += 1
        a["passed"] += bool(rec["passed"])
        if rec["kind"] == "error":
            a["errors"] += 1
            continue
        v = rec["value"]
        if rec["kind"] == "ratio":
            if a["max_ratio"] is None or v > a["max_ratio"]:
                a["max_ratio"], a["argext_trial"], a["argext_seed"] = v, rec["trial"], rec["seed"]
        elif rec["kind"] == "margin":
            if a["worst_margin"] is None or v < a["worst_margin"]:
                a["worst_margin"], a["argext_trial"], a["argext_seed"] = v, rec["trial"], rec["seed"]
    for a in out.values():
        a["pass_rate"] = a["passed"] / a["trials"]
    return out


def run_verify(cfg: RunConfig) -> dict:
    start = time.perf_counter()
    args = list(_trial_args(cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            records = list(pool.map(_run_trial, args, chunksize=64))
    else:
        records = [_run_trial(a) for a in args]
    aggs = aggregate(records)
    return {
        "tool": "symmod",
        "version": __version__,
        "command": "verify",
        "config": _clean(asdict(cfg)),
        "records": records,
        "aggregates": aggs,
        "pass_rate": sum(r["passed"] for r in records) / len(records),
        "ok": all(r["passed"] for r in records),
        "wall_time": time.perf_counter() - start,
    }


def verify_matrices(suite: str, mats: list[np.ndarray], tol: float = DEFAULT_TOL.rel,
                    seed: int = 0) -> dict:
    """Run one statement on user-supplied matrices."""
    if suite in INPUT_ONLY:
        rep = INPUT_ONLY[suite](mats, Tolerance(rel=tol))
    elif suite in SUITES:
        s = SUITES[suite]
        rep = s.verify(mats, _tol(Tolerance(rel=tol), s.tol_override), seed)
    else:
        raise ValueError(f"unknown statement {suite!r}")
    rec = {"statement_id": rep.statement_id, "trial": 0, "seed": None,
           "n": int(mats[0].shape[0]), "m": len(mats), "ensemble": "file",
           "kind": rep.kind, "value": rep.value, "bound": rep.bound, "passed": rep.passed,
           "digest": rep.inputs_digest, "extras": _clean(rep.extras)}
    return {"tool": "symmod", "version": __version__, "command": "verify",
            "config": {"suite": suite, "tol": tol, "input": True},
            "records": [rec], "aggregates": aggregate([rec]),
            "pass_rate": float(rep.passed), "ok": bool(rep.passed), "wall_time": 0.0}


# -- search ------------------------------------------------------------------

def proven_bound(target: SearchTarget) -> float | None:
    return {
        "cor25-best-constant": float(np.sqrt(2)),
        "cor24-best-constant": float(np.sqrt(2)),
        "quarter-sharpness-m3": 0.25,
        "frobenius-constant": frobenius_bound(target.m),
    }.get(target.id)


def run_search(target_id: str, budget: int, dim: int, m: int = 2, seed: int = 0) -> dict:
    start = time.perf_counter()
    target = SearchTarget(target_id, dim, m)
    res = search(target, budget, seed)
    bound = proven_bound(target)
    passed = True if bound is None else bool(res.best_value <= bound + 1e-6)
    rec = {"statement_id": target_id, "trial": 0, "seed": seed, "n": dim, "m": target.count,
           "ensemble": "search", "kind": "ratio" if bound is not None else "measurement",
           "value": res.best_value, "bound": bound, "passed": passed}
    return {
        "tool": "symmod",
        "version": __version__,
        "command": "search",
        "config": {"target": target_id, "budget": budget, "dim": dim, "m": m, "seed": seed},
        "result": {
            "target": target_id,
            "objective": target.objective,
            "best_value": res.best_value,
            "argmax": [matrix_to_json(M) for M in res.argmax],
            "restart_trace": res.restart_trace,
            "budget_used": res.budget_used,
            "proven_bound": bound,
        },
        "records": [rec],
        "aggregates": aggregate([rec]),
        "ok": passed,
        "wall_time": time.perf_counter() - start,
    }


# -- output ------------------------------------------------------------------

def csv_summary(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["statement_id", "trials", "pass_rate", "worst_margin", "max_ratio"])
    for sid, a in report["aggregates"].items():
        w.writerow([sid, a["trials"], a["pass_rate"], a["worst_margin"], a["max_ratio"]])
    return buf.getvalue()


def render(report: dict, fmt: str = "json") -> str:
    if fmt == "csv-summary":
        return csv_summary(report)
    return json.dumps(_clean(report), indent=1, sort_keys=True)
