"""Monte-Carlo harness: signal generation, trials, grids, CSV output.

Reproducibility contract: every random quantity in a trial derives from
the trial seed through the splitmix64 finalizer with a per-role salt
('U', 'V', 'W'), so adding a new consumer never shifts existing streams,
and per-trial seeds derive from (base_seed, cell identity, trial index)
rather than enumeration order.  Re-running a config reproduces its CSV
byte for byte; the wall_ms column is therefore pinned to 0 in the file
(measured timings live on the in-memory records).
"""

from __future__ import annotations

import dataclasses
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimator import DenoiserParams, baseline_estimate, default_params, denoise
from .kde import KdeSettings
from .linalg import op_norm, subspace_overlap
from .noise import Gaussian, GaussianMixture, NoiseModel

__all__ = [
    "mix64",
    "derive_seed",
    "haar_orthonormal",
    "SignalSpec",
    "make_signal",
    "TrialRecord",
    "run_trial",
    "ExperimentConfig",
    "parse_grid",
    "load_config",
    "ConfigError",
    "run_grid",
    "write_records_csv",
]

_MASK = (1 << 64) - 1

ROLE_U = 0x55  # left factor
ROLE_V = 0x56  # right factor
ROLE_W = 0x57  # noise matrix


def mix64(z: int) -> int:
    """splitmix64 finalizer; a documented, platform-independent 64-bit mix."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, role: int) -> int:
    """Sub-seed for one named consumer of a trial seed."""
    return mix64((seed & _MASK) ^ (role & _MASK))


def _float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def haar_orthonormal(dim: int, k: int, seed: int) -> np.ndarray:
    """dim x k frame with Haar-uniform orthonormal columns.

    QR of an i.i.d. standard normal matrix, with each column of Q scaled
    by the sign of the matching diagonal entry of R; without the sign
    fix the distribution would depend on the QR routine's conventions.
    """
    if not (1 <= k <= dim):
        raise ValueError("need 1 <= k <= dim")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, k))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass(frozen=True)
class SignalSpec:
    """Shape and scaled spectrum of the planted signal."""

    m: int
    n: int
    r: int
    sigmas: tuple[float, ...]

    def __post_init__(self):
        if min(self.m, self.n) < 2:
            raise ValueError("need m, n >= 2")
        if not (1 <= self.r <= min(self.m, self.n)):
            raise ValueError("need 1 <= r <= min(m, n)")
        if len(self.sigmas) != self.r:
            raise ValueError("need exactly r singular values")
        if any(s <= 0 for s in self.sigmas):
            raise ValueError("singular values must be positive")
        if any(a < b for a, b in zip(self.sigmas, self.sigmas[1:])):
            raise ValueError("singular values must be descending")


def make_signal(spec: SignalSpec, seed: int):
    """Random low-rank signal (m n)^{1/4} * U diag(sigmas) V^T.

    U and V are independent Haar frames drawn from sub-seeds of `seed`.
    Returns (x, u, v).
    """
    u = haar_orthonormal(spec.m, spec.r, derive_seed(seed, ROLE_U))
    v = haar_orthonormal(spec.n, spec.r, derive_seed(seed, ROLE_V))
    scale = (spec.m * spec.n) ** 0.25
    x = scale * (u * np.asarray(spec.sigmas)) @ v.T
    return x, u, v


@dataclass(frozen=True)
class TrialRecord:
    """Metrics of one Monte-Carlo trial, ready for CSV emission.

    `wall_ms` is measurement metadata: it is excluded from equality
    comparisons and pinned to 0 in CSV output, so identical seeds give
    records and files that compare identical.
    """

    n: int
    m: int
    r: int
    sigma1: float
    trial: int
    seed: int
    i_hat: float
    k_hat: int
    overlaps_adaptive: tuple[float, ...]
    overlaps_baseline: tuple[float, ...]
    err_adaptive: float
    err_baseline: float
    err_star: float
    wall_ms: float = field(compare=False, default=0.0)


def run_trial(spec: SignalSpec, model: NoiseModel,
              params: DenoiserParams | None, gamma: float,
              seed: int) -> TrialRecord:
    """One observation Y = X + W, both estimators, all metrics.

    The baseline gets the model's true noise standard deviation.
    Overlaps are recorded for every leading block 1..r using the SVD
    factors regardless of how many values survived thresholding.
    """
    t_start = time.perf_counter()
    if params is None:
        params = default_params(spec.m, spec.n)
    x, u, _v = make_signal(spec, seed)
    w = model.sample(spec.m, spec.n, derive_seed(seed, ROLE_W))
    y = x + w

    res = denoise(y, params, gamma)
    base = baseline_estimate(y, noise_sd=float(np.sqrt(model.variance())),
                             delta=params.delta, gamma=gamma)

    scale = (spec.m * spec.n) ** 0.25
    ov_a = tuple(subspace_overlap(res.u_hat[:, :i], u[:, :i])
                 for i in range(1, spec.r + 1))
    ov_b = tuple(subspace_overlap(base.u_hat[:, :i], u[:, :i])
                 for i in range(1, spec.r + 1))
    err_a = op_norm(res.x_hat - x) / scale
    err_b = op_norm(base.x_hat - x) / scale
    err_s = op_norm(res.x_star - x) / scale
    wall_ms = (time.perf_counter() - t_start) * 1e3
    return TrialRecord(n=spec.n, m=spec.m, r=spec.r, sigma1=spec.sigmas[0],
                       trial=-1, seed=seed, i_hat=res.i_hat, k_hat=res.k_hat,
                       overlaps_adaptive=ov_a, overlaps_baseline=ov_b,
                       err_adaptive=err_a, err_baseline=err_b, err_star=err_s,
                       wall_ms=wall_ms)


class ConfigError(ValueError):
    """Raised for malformed experiment config files."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid definition for :func:`run_grid`."""

    ns: tuple[int, ...]
    ranks: tuple[int, ...]
    sigma1_grid: tuple[float, ...]
    sigma_ratios: tuple[float, ...] = (1.0, 0.8, 0.6)
    noise: NoiseModel = field(default_factory=lambda: GaussianMixture(2.0))
    eps: float = 1e-3
    delta: float = 0.01
    h: float | None = None          # None: 1.2 (mn)^{-1/5}
    h_prime: float | None = None    # None: (mn)^{-1/7}
    kde_mode: str = "binned"
    kde_bins: int = 4096
    trials: int = 50
    base_seed: int = 0
    gamma: float = 1.0
    output: str = "results.csv"
    workers: int = 1

    def __post_init__(self):
        if not self.ns or any(n < 2 for n in self.ns):
            raise ConfigError("n must list integers >= 2")
        if not self.ranks or any(r < 1 for r in self.ranks):
            raise ConfigError("rank must list integers >= 1")
        if not self.sigma1_grid or any(s <= 0 for s in self.sigma1_grid):
            raise ConfigError("sigma1 grid must be positive")
        if any(b <= a for a, b in zip(self.sigma1_grid, self.sigma1_grid[1:])):
            raise ConfigError("sigma1 grid must be strictly increasing")
        if len(self.sigma_ratios) < max(self.ranks):
            raise ConfigError("sigma_ratios must cover the largest rank")
        if self.sigma_ratios[0] != 1.0:
            raise ConfigError("sigma_ratios must start at 1.0")
        if any(b > a for a, b in zip(self.sigma_ratios, self.sigma_ratios[1:])):
            raise ConfigError("sigma_ratios must be non-increasing")
        if any(r <= 0 for r in self.sigma_ratios):
            raise ConfigError("sigma_ratios must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not (self.gamma > 0):
            raise ConfigError("gamma must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def params_for(self, m: int, n: int) -> DenoiserParams:
        kde = KdeSettings(h=1.0, mode=self.kde_mode, bins=self.kde_bins)
        base = default_params(m, n, eps=self.eps, delta=self.delta, kde=kde)
        h = self.h if self.h is not None else base.h
        hp = self.h_prime if self.h_prime is not None else base.h_prime
        return DenoiserParams(h=h, h_prime=hp, eps=self.eps,
                              delta=self.delta, kde=kde)

    def cells(self):
        """Deterministic cell enumeration: n outer, rank middle, sigma inner."""
        for n in self.ns:
            m = round(self.gamma * n)
            for r in self.ranks:
                for sigma1 in self.sigma1_grid:
                    sigmas = tuple(sigma1 * x for x in self.sigma_ratios[:r])
                    yield SignalSpec(m=m, n=n, r=r, sigmas=sigmas)

    def trial_seed(self, spec: SignalSpec, trial: int) -> int:
        s = self.base_seed & _MASK
        for v in (spec.n, spec.m, spec.r, _float_bits(spec.sigmas[0]), trial):
            s = mix64(s ^ (v & _MASK))
        return s


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse '2.0', '1,2,3' or 'start:stop:step' (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad grid spec {text!r}: want start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"bad grid spec {text!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"bad grid spec {text!r}")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 12) for i in range(count)
                     if start + i * step <= stop + 1e-9)
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ConfigError(f"bad grid spec {text!r}") from None


_CONFIG_KEYS = {
    "n", "rank", "sigma1", "sigma_ratios", "noise", "noise_mu",
    "noise_variance", "eps", "delta", "h", "h_prime", "kde_mode",
    "kde_bins", "trials", "base_seed", "gamma", "output", "workers",
}


def load_config(path) -> ExperimentConfig:
    """Read a flat `key = value` config file.

    Blank lines and '#' comments are ignored; unknown keys are errors.
    """
    raw: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in raw:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value

    for required in ("n", "sigma1", "trials", "output"):
        if required not in raw:
            raise ConfigError(f"{path}: missing required key {required!r}")

    def geti(key, default=None):
        try:
            return int(raw[key]) if key in raw else default
        except ValueError:
            raise ConfigError(f"{path}: key {key!r} must be an integer") from None

    def getf(key, default=None):
        try:
            return float(raw[key]) if key in raw else default
        except ValueError:
            raise ConfigError(f"{path}: key {key!r} must be a number") from None

    try:
        ns = tuple(int(tok) for tok in raw["n"].split(","))
        ranks = tuple(int(tok) for tok in raw.get("rank", "1").split(","))
    except ValueError:
        raise ConfigError(f"{path}: 'n' and 'rank' must be integer lists") from None

    kind = raw.get("noise", "mixture")
    if kind == "mixture":
        noise: NoiseModel = GaussianMixture(getf("noise_mu", 2.0))
        if "noise_variance" in raw:
            raise ConfigError(f"{path}: 'noise_variance' only applies to gaussian noise")
    elif kind == "gaussian":
        noise = Gaussian(getf("noise_variance", 1.0))
        if "noise_mu" in raw:
            raise ConfigError(f"{path}: 'noise_mu' only applies to mixture noise")
    else:
        raise ConfigError(f"{path}: unknown noise kind {kind!r}")

    ratios_text = raw.get("sigma_ratios", "1.0,0.8,0.6")
    try:
        ratios = tuple(float(tok) for tok in ratios_text.split(","))
    except ValueError:
        raise ConfigError(f"{path}: 'sigma_ratios' must be a float list") from None

    try:
        return ExperimentConfig(
            ns=ns, ranks=ranks, sigma1_grid=parse_grid(raw["sigma1"]),
            sigma_ratios=ratios, noise=noise,
            eps=getf("eps", 1e-3), delta=getf("delta", 0.01),
            h=getf("h"), h_prime=getf("h_prime"),
            kde_mode=raw.get("kde_mode", "binned"),
            kde_bins=geti("kde_bins", 4096),
            trials=geti("trials"), base_seed=geti("base_seed", 0),
            gamma=getf("gamma", 1.0), output=raw["output"],
            workers=geti("workers", 1),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _trial_task(args):
    spec, model, params, gamma, seed = args
    return run_trial(spec, model, params, gamma, seed)


def run_grid(config: ExperimentConfig, progress=None) -> list[TrialRecord]:
    """Run the full cells x trials cross product and write the CSV.

    Trials are pure functions of (cell, trial seed), so they may run in
    any order or in parallel; records are emitted in deterministic
    (cell, trial) order either way.
    """
    tasks = []
    order = []
    for spec in config.cells():
        params = config.params_for(spec.m, spec.n)
        for trial in range(config.trials):
            seed = config.trial_seed(spec, trial)
            tasks.append((spec, config.noise, params, config.gamma, seed))
            order.append(trial)

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = []
            for i, rec in enumerate(pool.map(_trial_task, tasks, chunksize=4)):
                results.append(rec)
                if progress is not None:
                    progress(i + 1, len(tasks))
    else:
        results = []
        for i, task in enumerate(tasks):
            results.append(_trial_task(task))
            if progress is not None:
                progress(i + 1, len(tasks))

    records = [dataclasses.replace(rec, trial=trial)
               for rec, trial in zip(results, order)]
    write_records_csv(records, config.output, max_rank=max(config.ranks))
    return records


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def write_records_csv(records, path, max_rank: int) -> None:
    """Emit records with the stable column schema.

    Rows with r < max_rank leave the unused overlap columns empty.  The
    wall_ms column is written as 0 so that identical configs reproduce
    identical files.
    """
    ov_a_cols = [f"ov_a_{i}" for i in range(1, max_rank + 1)]
    ov_b_cols = [f"ov_b_{i}" for i in range(1, max_rank + 1)]
    header = (["n", "m", "r", "sigma1", "trial", "seed", "i_hat", "k_hat"]
              + ov_a_cols + ov_b_cols
              + ["err_a", "err_b", "err_star", "wall_ms"])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for rec in records:
            ov_a = [_fmt(v) for v in rec.overlaps_adaptive]
            ov_a += [""] * (max_rank - len(ov_a))
            ov_b = [_fmt(v) for v in rec.overlaps_baseline]
            ov_b += [""] * (max_rank - len(ov_b))
            row = ([str(rec.n), str(rec.m), str(rec.r), _fmt(rec.sigma1),
                    str(rec.trial), str(rec.seed), _fmt(rec.i_hat),
                    str(rec.k_hat)]
                   + ov_a + ov_b
                   + [_fmt(rec.err_adaptive), _fmt(rec.err_baseline),
                      _fmt(rec.err_star), "0"])
            fh.write(",".join(row) + "\n")
