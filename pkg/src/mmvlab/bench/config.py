"""Benchmark configuration: schema, validation, YAML round-trip."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

EXPERIMENTS = ("phase_m", "phase_k", "local_minima", "fourier")
ALGORITHMS = ("spl", "msbl", "music", "somp", "samusic", "oracle")

# sweep variable each experiment is allowed to vary
_SWEEP_FOR = {
    "phase_m": ("m",),
    "phase_k": ("k",),
    "local_minima": ("snr_db",),
    "fourier": ("m", "k"),
}

_SWEEPABLE = ("m", "k", "snr_db", "N", "tau")

_ALLOWED_OVERRIDES = {
    "spl": {
        "p", "lam", "lam_scale", "max_iters", "gamma_tol", "denom_tol", "gamma_cap",
        "psd_rel_tol", "anneal", "anneal_every", "anneal_factor", "anneal_floor",
        "rank_mode", "fixed_r", "gap_threshold",
    },
    "msbl": {"lam", "lam_scale", "max_iters", "gamma_tol", "gamma_floor", "prune_tol"},
    "music": {"rank_mode", "fixed_r", "gap_threshold"},
    "somp": set(),
    "samusic": {"rank_mode", "fixed_r", "gap_threshold"},
    "oracle": {"max_supports"},
}

_TOP_LEVEL_KEYS = {
    "experiment", "n", "r", "matrix_kind", "m", "k", "snr_db", "N", "tau",
    "algorithms", "trials", "base_seed", "s", "overrides",
}


def _as_tuple(value, name, cast):
    if isinstance(value, (list, tuple)):
        items = tuple(cast(v) for v in value)
    else:
        items = (cast(value),)
    if not items:
        raise ValueError(f"sweep list {name!r} must be nonempty")
    return items


def _cast_snr(v):
    if isinstance(v, str) and v.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(v)


@dataclass(frozen=True)
class BenchConfig:
    """One Monte-Carlo sweep: fixed dimensions, per-variable value lists
    (exactly one of which may hold more than one value — the sweep
    variable), the algorithm roster, and trial/seed bookkeeping."""

    experiment: str
    n: int
    r: int
    m: tuple[int, ...]
    k: tuple[int, ...]
    snr_db: tuple[float, ...]
    N: tuple[int, ...]
    tau: tuple[float, ...]
    matrix_kind: str = "gaussian"
    algorithms: tuple[str, ...] = ("spl", "msbl")
    trials: int = 200
    base_seed: int = 0
    s: int | None = None
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.matrix_kind not in ("gaussian", "fourier"):
            raise ValueError(f"unknown matrix_kind {self.matrix_kind!r}")
        if self.experiment == "fourier" and self.matrix_kind != "fourier":
            raise ValueError("experiment 'fourier' requires matrix_kind 'fourier'")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ValueError(f"unknown or empty algorithms: {bad}")
        if self.s is not None and self.experiment != "local_minima":
            raise ValueError("overlap s is only valid for the local_minima experiment")
        if self.experiment == "local_minima" and self.s is None:
            raise ValueError("local_minima experiment requires the overlap s")

        multi = [name for name in _SWEEPABLE if len(getattr(self, name)) > 1]
        if len(multi) > 1:
            raise ValueError(f"only one variable may sweep, got {multi}")
        sweep = multi[0] if multi else _SWEEP_FOR[self.experiment][0]
        if sweep not in _SWEEP_FOR[self.experiment]:
            raise ValueError(f"experiment {self.experiment!r} cannot sweep {sweep!r}")
        object.__setattr__(self, "_sweep_var", sweep)

        for alg, sub in self.overrides.items():
            if alg not in ALGORITHMS:
                raise ValueError(f"override for unknown algorithm {alg!r}")
            unknown = set(sub) - _ALLOWED_OVERRIDES[alg]
            if unknown:
                raise ValueError(f"unknown override keys for {alg}: {sorted(unknown)}")

    @property
    def sweep_var(self) -> str:
        return self._sweep_var

    @property
    def sweep_values(self) -> tuple:
        return getattr(self, self.sweep_var)

    def fixed_value(self, name: str, sweep_value):
        """Value of ``name`` at a given sweep point."""
        if name == self.sweep_var:
            return sweep_value
        values = getattr(self, name)
        return values[0]

    def to_dict(self) -> dict:
        out = {
            "experiment": self.experiment,
            "n": self.n,
            "r": self.r,
            "matrix_kind": self.matrix_kind,
            "m": list(self.m),
            "k": list(self.k),
            "snr_db": [("inf" if math.isinf(v) else v) for v in self.snr_db],
            "N": list(self.N),
            "tau": list(self.tau),
            "algorithms": list(self.algorithms),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "overrides": self.overrides,
        }
        if self.s is not None:
            out["s"] = self.s
        return out


def config_from_dict(raw: dict) -> BenchConfig:
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    missing = {"experiment", "n", "r", "m", "k", "snr_db", "N", "tau"} - set(raw)
    if missing:
        raise ValueError(f"missing config keys: {sorted(missing)}")
    return BenchConfig(
        experiment=str(raw["experiment"]),
        n=int(raw["n"]),
        r=int(raw["r"]),
        m=_as_tuple(raw["m"], "m", int),
        k=_as_tuple(raw["k"], "k", int),
        snr_db=_as_tuple(raw["snr_db"], "snr_db", _cast_snr),
        N=_as_tuple(raw["N"], "N", int),
        tau=_as_tuple(raw["tau"], "tau", float),
        matrix_kind=str(raw.get("matrix_kind", "gaussian")),
        algorithms=tuple(raw.get("algorithms", ("spl", "msbl"))),
        trials=int(raw.get("trials", 200)),
        base_seed=int(raw.get("base_seed", 0)),
        s=None if raw.get("s") is None else int(raw["s"]),
        overrides={str(a): dict(v) for a, v in (raw.get("overrides") or {}).items()},
    )


def load_config(path) -> BenchConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return config_from_dict(raw)
