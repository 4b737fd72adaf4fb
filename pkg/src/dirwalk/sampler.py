"""Seeded samplers for Dirichlet walks and their stick-breaking limits.

Randomness comes from ``RngStream``: a master seed plus a stream index,
mapped onto numpy's counter-based Philox generator through a
``SeedSequence`` spawn key.  Distinct streams are independent by
construction and a given ``(seed, stream)`` reproduces bit-exactly.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, DomainError
from .exactlaw import WalkConfig
from .laws import BetaLaw, fmt_number

__all__ = [
    "RngStream",
    "SampleBatch",
    "StickConfig",
    "sample_sphere",
    "sample_spheres",
    "sample_dirichlet",
    "sample_dirichlet_batch",
    "sample_beta",
    "sample_walk",
    "sample_stick_breaking",
    "sample_radial",
    "compose_semigroup",
    "format_batch_csv",
    "write_batch_csv",
    "read_batch_csv",
]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: tuple = (0,)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        stream = self.stream if isinstance(self.stream, tuple) else (int(self.stream),)
        object.__setattr__(self, "stream", tuple(int(s) for s in stream))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream + (int(index),))

    def label(self) -> str:
        return ".".join(str(s) for s in self.stream)


@dataclass
class SampleBatch:
    d: int
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, self.d)
        self.meta.setdefault("count", len(self.points))

    def __len__(self):
        return len(self.points)

    def squared_radii(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.points, self.points)


@dataclass(frozen=True)
class StickConfig:
    Q: float
    d: int
    epsilon: float = 1e-12

    def __post_init__(self):
        if not self.Q > 0:
            raise DomainError(f"Q must be positive, got {self.Q}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d}")
        if not 0 < self.epsilon < 1:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def describe(self) -> str:
        return f"stick;Q={fmt_number(self.Q)};d={self.d};eps={self.epsilon!r}"


def _gen(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def sample_spheres(d: int, count: int, rng) -> np.ndarray:
    """``count`` uniform points on the unit sphere of R^d, shape ``(count, d)``."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    gen = _gen(rng)
    if d == 1:
        return (2.0 * gen.integers(0, 2, size=(count, 1)) - 1.0)
    z = gen.standard_normal((count, d))
    norms = np.linalg.norm(z, axis=1)
    bad = norms == 0.0
    while np.any(bad):
        z[bad] = gen.standard_normal((int(bad.sum()), d))
        norms[bad] = np.linalg.norm(z[bad], axis=1)
        bad = norms == 0.0
    return z / norms[:, None]


def sample_sphere(d: int, rng) -> np.ndarray:
    return sample_spheres(d, 1, rng)[0]


def _log_gamma_variates(shapes, count: int, gen: np.random.Generator) -> np.ndarray:
    """``log`` of independent gamma variates, columns following ``shapes``.

    Shapes below one use ``gamma(q) ~ gamma(q+1) * U^(1/q)`` in log space, so
    tiny shapes underflow nothing.
    """
    shapes = np.asarray(shapes, dtype=float)
    small = shapes < 1.0
    g = gen.standard_gamma(np.where(small, shapes + 1.0, shapes), size=(count, len(shapes)))
    out = np.log(g)
    if np.any(small):
        u = gen.random(size=(count, int(small.sum())))
        out[:, small] += np.log1p(-u) / shapes[small]
    return out


def sample_dirichlet_batch(qs, count: int, rng) -> np.ndarray:
    qs = [float(q) for q in qs]
    if any(q <= 0 for q in qs):
        raise DomainError(f"Dirichlet parameters must be positive, got {qs}")
    logs = _log_gamma_variates(qs, count, _gen(rng))
    logs -= logs.max(axis=1, keepdims=True)
    w = np.exp(logs)
    return w / w.sum(axis=1, keepdims=True)


def sample_dirichlet(qs, rng) -> np.ndarray:
    return sample_dirichlet_batch(qs, 1, rng)[0]


def sample_beta(p: float, q: float, count: int, rng) -> np.ndarray:
    return sample_dirichlet_batch([p, q], count, rng)[:, 0]


def _walk_chunk(config: WalkConfig, count: int, gen) -> np.ndarray:
    out = np.empty((count, config.d))
    for start in range(0, count, _CHUNK):
        m = min(_CHUNK, count - start)
        x = sample_dirichlet_batch(config.qs, m, gen)
        theta = sample_spheres(config.d, m * config.n, gen).reshape(m, config.n, config.d)
        out[start:start + m] = np.einsum("ij,ijk->ik", x, theta)
    return out


def _split(count: int, workers: int):
    base, extra = divmod(count, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _run_workers(fn, count: int, rng: RngStream, workers: int) -> np.ndarray:
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        return fn(count, rng.generator())
    sizes = _split(count, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda i: fn(sizes[i], rng.child(i).generator()), range(workers)))
    return np.concatenate(parts, axis=0)


def _meta(rng: RngStream, description: str, count: int, workers: int) -> dict:
    return {"seed": rng.seed, "stream": rng.label(), "config": description,
            "count": count, "workers": workers}


def sample_walk(config: WalkConfig, count: int, rng: RngStream, workers: int = 1) -> SampleBatch:
    """``count`` independent draws of ``sum X_i Theta_i``.

    With ``workers > 1`` worker ``i`` draws from ``rng.child(i)``; output is
    deterministic given ``(seed, stream, workers)``.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    points = _run_workers(lambda m, g: _walk_chunk(config, m, g), count, rng, workers)
    return SampleBatch(config.d, points, _meta(rng, config.describe(), count, workers))


def _stick_chunk(cfg: StickConfig, count: int, gen) -> np.ndarray:
    Q, d = float(cfg.Q), cfg.d
    out = np.zeros((count, d))
    log_eps = math.log(cfg.epsilon)
    log_rest = np.zeros(count)  # log of the unbroken stick
    active = np.arange(count)
    while active.size:
        m = active.size
        # Y ~ beta(1, Q) via 1 - Y = U^(1/Q)
        log_keep = np.log1p(-gen.random(m)) / Q
        weight = np.exp(log_rest[active]) * -np.expm1(log_keep)
        out[active] += weight[:, None] * sample_spheres(d, m, gen)
        log_rest[active] += log_keep
        active = active[log_rest[active] >= log_eps]
    return out


def sample_stick_breaking(cfg: StickConfig, count: int, rng: RngStream, workers: int = 1) -> SampleBatch:
    """Truncated draws of ``sum Pi_i Theta_i`` with ``beta(1, Q)`` sticks.

    Breaking stops once the unbroken stick is below ``epsilon``; the residual
    is dropped, so each point is within ``epsilon`` of the untruncated sum.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    points = _run_workers(lambda m, g: _stick_chunk(cfg, m, g), count, rng, workers)
    return SampleBatch(cfg.d, points, _meta(rng, cfg.describe(), count, workers))


def sample_radial(law: BetaLaw, d: int, count: int, rng: RngStream) -> SampleBatch:
    """Rotation-invariant draws ``R Theta`` with ``R^2`` following a beta law."""
    gen = rng.generator()
    r = np.sqrt(sample_beta(float(law.p), float(law.q), count, gen))
    points = r[:, None] * sample_spheres(d, count, gen)
    desc = f"radial;d={d};beta({fmt_number(law.p)},{fmt_number(law.q)})"
    return SampleBatch(d, points, _meta(rng, desc, count, 1))


def compose_semigroup(batch_a: SampleBatch, batch_b: SampleBatch, q1, q2, rng: RngStream) -> SampleBatch:
    """Pair points and mix them with fresh ``(Y1, Y2) ~ D(q1, q2)`` weights."""
    if batch_a.d != batch_b.d:
        raise DimensionMismatch(f"dimensions differ: {batch_a.d} vs {batch_b.d}")
    if len(batch_a) != len(batch_b):
        raise DimensionMismatch(f"counts differ: {len(batch_a)} vs {len(batch_b)}")
    y = sample_dirichlet_batch([q1, q2], len(batch_a), rng)
    points = y[:, :1] * batch_a.points + y[:, 1:] * batch_b.points
    desc = f"compose;q1={fmt_number(q1)};q2={fmt_number(q2)}"
    return SampleBatch(batch_a.d, points, _meta(rng, desc, len(batch_a), 1))


def format_batch_csv(batch: SampleBatch, extra_header: Optional[dict] = None) -> str:
    """CSV with ``# key=value`` header lines and one row of coordinates per point."""
    meta = batch.meta
    lines = [f"# seed={meta.get('seed', '')}", f"# stream={meta.get('stream', '')}",
             f"# d={batch.d}", f"# config={meta.get('config', '')}"]
    for key, value in (extra_header or {}).items():
        lines.append(f"# {key}={value}")
    # repr gives the shortest round-tripping decimal
    lines.extend(",".join(repr(float(x)) for x in row) for row in batch.points)
    return "\n".join(lines) + "\n"


def write_batch_csv(batch: SampleBatch, path, extra_header: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_batch_csv(batch, extra_header))


def read_batch_csv(path) -> SampleBatch:
    meta, rows, d = {}, [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key == "d":
                    d = int(value)
                elif key == "seed" and value:
                    meta[key] = int(value)
                else:
                    meta[key] = value
                continue
            rows.append([float(x) for x in line.split(",")])
    if d is None:
        raise DomainError(f"{path}: missing '# d=' header")
    meta.pop("count", None)
    return SampleBatch(d, np.array(rows, dtype=float).reshape(-1, d), meta)
