"""Aggregate verification suite (quick smoke scale and full desk scale).

Each criterion wraps one or more experiments at a level-dependent scale.
Statistical criteria run at significance 0.01 and are granted one reseeded
retry, which keeps the false-failure rate of the suite below ~1e-4 per
criterion. All reports are byte-deterministic under a fixed seed.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .experiments import ExperimentSpec, run_experiment
from .rng import derive_seed, replication_rng
from .samplers import SimConfig, sample_poisson_hyperplanes
from .serialize import dumps_json

DEFAULT_VERIFY_SEED = 101


@dataclass
class CriterionResult:
    cid: str
    name: str
    verdict: bool
    retried: bool
    detail: str


def _run_with_retry(builder, seed: int, statistical: bool = True):
    """builder(seed) -> (verdict, detail); one reseeded retry if statistical."""
    verdict, detail = builder(seed)
    retried = False
    if not verdict and statistical:
        retried = True
        verdict, detail = builder(seed + 1)
    return bool(verdict), retried, detail


def _experiment_builder(name, config_kwargs, options, out_dir=None, tag=""):
    def build(seed):
        config = SimConfig(master_seed=seed, **config_kwargs)
        spec = ExperimentSpec(name, config, output_dir=out_dir, options=options)
        report = run_experiment(spec)
        failing = [c["name"] for c in report.checks if not c["passed"]] + [
            t["name"] for t in report.tests if not t["passed"]
        ]
        detail = "ok" if report.verdict else f"failing: {', '.join(failing)}"
        return report.verdict, detail

    return build


def _plane_count_builder(dims, t, reps):
    def build(seed):
        details = []
        ok = True
        for d in dims:
            radius = t ** (-d / (d + 1.0))
            sub = derive_seed(seed, f"plane-count-d{d}")
            counts = np.array(
                [
                    len(sample_poisson_hyperplanes(t, radius, d, replication_rng(sub, i)))
                    for i in range(reps)
                ],
                dtype=float,
            )
            expect = 2.0 * t * radius
            tol = 3.0 * math.sqrt(expect / reps)
            good = abs(counts.mean() - expect) <= tol
            ok = ok and good
            details.append(f"d={d}: mean {counts.mean():.3f} vs {expect:.3f} (tol {tol:.3f})")
        return ok, "; ".join(details)

    return build


def _criteria(level: str, out_dir):
    """Criterion table: (id, name, statistical, builder)."""
    full = level == "full"
    rep_scale = 1.0 if full else 0.15
    ncons = 1_000_000 if full else 200_000
    out = str(out_dir) if out_dir else None

    crits = [
        (
            "C01",
            "planar limit constant within 1% of closed form",
            True,
            _experiment_builder("constants", {"dim": 2}, {"n": ncons}, out),
        ),
        (
            "C02",
            "restricted plane count matches hit-measure mean",
            True,
            _plane_count_builder((2, 3), 1e3, 10_000 if full else 2_000),
        ),
        (
            "C03",
            "intersection-norm law matches analytic CDF (KS)",
            True,
            _experiment_builder(
                "cross-norm-law", {"dim": 2}, {"n": 100_000 if full else 20_000}, out
            ),
        ),
        (
            "C04",
            "ball-hit moment: small-ratio scaling and flat region",
            True,
            _experiment_builder(
                "hit-moment",
                {"dim": 2},
                {"n_small": 10_000_000 if full else 1_000_000, "n_flat": 1_000_000 if full else 200_000},
                out,
                tag="d2",
            ),
        ),
        (
            "C05",
            "restricted intensity matches annulus masses; binned TV shrinks",
            True,
            _experiment_builder(
                "intensity",
                {"dim": 2, "intensity": 1e5},
                {
                    "reps": 2000 if full else 300,
                    "t_list": [1e3, 1e4, 1e5] if full else [1e3, 1e4],
                },
                out,
            ),
        ),
        (
            "C06",
            "restricted vs limit annulus counts (chi-square)",
            True,
            _experiment_builder(
                "limit-law",
                {"dim": 2, "intensity": 1e5 if full else 1e4},
                {"reps": 2000 if full else 400},
                out,
            ),
        ),
        (
            "C07",
            "limit-hull f-vector means match closed forms",
            True,
            _experiment_builder(
                "fvector",
                {"dim": 2, "r_min": 0.01, "intensity": 1e3},
                {
                    "reps": 100_000 if full else 4_000,
                    "max_halfwidth_frac": 0.02 if full else 0.0,
                },
                out,
            ),
        ),
        (
            "C08",
            "hull / zero-cell duality (f0 distribution)",
            True,
            _experiment_builder(
                "duality",
                {"dim": 2, "r_min": 0.01, "intensity": 1e3},
                {"reps": 10_000 if full else 2_000},
                out,
            ),
        ),
        (
            "C09",
            "binomial variant of the limit law",
            True,
            _experiment_builder(
                "limit-law",
                {"dim": 2, "intensity": 1e5 if full else 1e4},
                {"reps": 2000 if full else 400, "process": "binomial"},
                out,
            ),
        ),
        (
            "C10",
            "scaling equivariance and tuple accounting (deterministic)",
            False,
            _experiment_builder(
                "scaling", {"dim": 2, "intensity": 2e4}, {"alpha": 3.7}, out
            ),
        ),
    ]
    if full:
        crits.insert(
            7,
            (
                "C07b",
                "limit-hull f-vector means match closed forms (d=3)",
                True,
                _experiment_builder(
                    "fvector",
                    {"dim": 3, "r_min": 0.02, "intensity": 1e3},
                    {"reps": 20_000, "max_halfwidth_frac": 0.03},
                    out,
                ),
            ),
        )
        crits.insert(
            9,
            (
                "C08b",
                "hull / zero-cell duality via polar duals (d=3)",
                True,
                _experiment_builder(
                    "duality",
                    {"dim": 3, "r_min": 0.02, "intensity": 1e3},
                    {"reps": 10_000},
                    out,
                ),
            ),
        )
    return crits


def run_verify(level: str = "quick", seed: int = DEFAULT_VERIFY_SEED, out_dir=None) -> dict:
    """Run the verification suite; returns the aggregate report dict.

    Writes ``verify_<level>.json`` (byte-deterministic for a fixed seed)
    plus per-experiment reports when ``out_dir`` is given.
    """
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    results = []
    for cid, name, statistical, builder in _criteria(level, out_dir):
        verdict, retried, detail = _run_with_retry(
            builder, derive_seed(seed, cid), statistical
        )
        results.append(CriterionResult(cid, name, verdict, retried, detail))
        status = "PASS" if verdict else "FAIL"
        retry_note = " (after reseeded retry)" if retried and verdict else ""
        print(f"[{cid}] {status}{retry_note} {name}: {detail}")
    aggregate = {
        "reportVersion": 1,
        "suite": "verify",
        "level": level,
        "seed": seed,
        "criteria": [
            {
                "id": r.cid,
                "name": r.name,
                "verdict": r.verdict,
                "retried": r.retried,
                "detail": r.detail,
            }
            for r in results
        ],
        "verdict": all(r.verdict for r in results),
    }
    if out_dir is not None:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        with open(path / f"verify_{level}.json", "w", encoding="utf-8") as fh:
            fh.write(dumps_json(aggregate))
    return aggregate
