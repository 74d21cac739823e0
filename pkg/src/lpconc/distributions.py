"""Component laws and their absolute-moment machinery.

Every distribution here models one coordinate x of a product vector; all
derived quantities (moments, MGFs, CDFs) refer to |x|.  The MGF evaluation
is the numerical backbone of the rate engine, so it is organized to stay
accurate for exponents p anywhere between 1e-6 and a few hundred:

* discrete laws evaluate log E[exp(s*t*|x|^p)] by logsumexp,
* continuous laws integrate a peak-shifted integrand, switching to the
  u = x^p coordinate for p < 1 where the x-domain integrand degenerates
  into a boundary spike.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp, ndtr

from .seeding import generator

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8

# switch the MGF integral to the u = x^p coordinate below this p
_POWER_COORD_P = 1.0
# drop integrand contributions this far (in log) below the peak
_LOG_TRUNC = 80.0


def as_sign(sign) -> int:
    """Normalize '+'/'-' (or +1/-1) to an integer sign."""
    if sign in ("+", 1):
        return 1
    if sign in ("-", -1):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _log_integral(log_weight, lo: float, hi: float, probes: np.ndarray) -> float:
    """log of the integral of exp(log_weight(u)) over (lo, hi).

    The integrand is shifted by its probed peak so quadrature only ever
    sees well-scaled values; the probe grid must already resolve the
    peak's location to within the adaptive scheme's reach.
    """
    vals = np.asarray(log_weight(probes), dtype=float)
    finite = np.isfinite(vals)
    if not finite.any():
        return -math.inf
    shift = float(vals[finite].max())
    peak = float(probes[finite][int(np.argmax(vals[finite]))])

    def f(u: float) -> float:
        v = float(log_weight(np.asarray([u]))[0]) - shift
        if v < -745.0:
            return 0.0
        return math.exp(min(v, 60.0))

    inner = [peak] if lo < peak < hi else None
    val, _ = integrate.quad(
        f, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200, points=inner
    )
    if val <= 0.0:
        return -math.inf
    return shift + math.log(val)


def _probe_grid(lo: float, hi: float, extra: Sequence[float] = ()) -> np.ndarray:
    pts = np.concatenate(
        [
            np.linspace(lo, hi, 241)[1:],
            lo + (hi - lo) * np.geomspace(1e-12, 1.0, 97),
            np.asarray([x for x in extra if lo < x < hi], dtype=float),
        ]
    )
    return np.unique(pts)


class Distribution:
    """Base class for component laws (the |x| view)."""

    atom_at_zero: float = 0.0
    has_abs_atoms: bool = False

    # --- family facts -------------------------------------------------
    @property
    def ess_sup(self) -> float:
        raise NotImplementedError

    @property
    def ess_inf_abs(self) -> float:
        return 0.0

    @property
    def exp_moment_order(self) -> float:
        """Largest p0 such that E[exp(t*|x|^p0)] is finite for some t > 0."""
        return math.inf

    def mgf_t_bound(self, p: float) -> float:
        """Supremum of t with E[exp(t*|x|^p)] < inf."""
        return math.inf

    # --- moments --------------------------------------------------------
    def abs_moment(self, q: float) -> float:
        """E[|x|^q] for real q (negative q allowed); +inf on divergence."""
        raise NotImplementedError

    def mu_p(self, p: float) -> float:
        if not (p > 0):
            raise ValueError("mu_p requires p > 0; the p = 0 endpoint is a limit")
        return self.abs_moment(p)

    def neg_moment(self, y: float) -> float:
        if y < 0:
            raise ValueError("neg_moment requires y >= 0")
        if y == 0:
            return 1.0
        if self.atom_at_zero > 0:
            return math.inf
        return self.abs_moment(-y)

    def log_moments(self) -> tuple[float, float]:
        """(E[log|x|], Var[log|x|]); undefined with an atom at zero."""
        if self.atom_at_zero > 0:
            raise ValueError("log moments undefined for a law with P(x=0) > 0")
        return self._log_moments()

    def _log_moments(self) -> tuple[float, float]:
        raise NotImplementedError

    # --- MGF of |x|^p ----------------------------------------------------
    def log_mgf_abs_p(self, t: float, p: float, sign) -> float:
        """log E[exp(s*t*|x|^p)]; +inf when the integral diverges."""
        s = as_sign(sign)
        if not (p > 0):
            raise ValueError("log_mgf_abs_p requires p > 0")
        if t < 0:
            raise ValueError("log_mgf_abs_p requires t >= 0")
        if t == 0:
            return 0.0
        if s > 0 and t >= self.mgf_t_bound(p):
            return math.inf
        return self._log_mgf(t, p, s)

    def mgf_abs_p(self, t: float, p: float, sign) -> float:
        lm = self.log_mgf_abs_p(t, p, sign)
        if lm == math.inf:
            return math.inf
        try:
            return math.exp(lm)
        except OverflowError:
            return math.inf

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        raise NotImplementedError

    # --- CDF of |x| -------------------------------------------------------
    def cdf_abs(self, x: float) -> float:
        """P(|x| <= x)."""
        raise NotImplementedError

    def cdf_abs_left(self, x: float) -> float:
        """P(|x| < x)."""
        return self.cdf_abs(x)

    # --- sampling ----------------------------------------------------------
    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec_string()!r})"


class _ContinuousLaw(Distribution):
    """Density-specified law of |x| on (0, B); no atoms anywhere."""

    def _abs_logpdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _tail_cut(self) -> float:
        """x beyond which the density is numerically zero (inf support only)."""
        return self.ess_sup

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        if p < _POWER_COORD_P:
            return self._log_mgf_power_coord(t, p, s)
        return self._log_mgf_plain(t, p, s)

    def _log_mgf_plain(self, t: float, p: float, s: int) -> float:
        hi = min(self.ess_sup, self._tail_cut())

        def log_weight(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return s * t * np.power(x, p) + self._abs_logpdf(x)

        extra = self._stationary_points(t, p, s)
        if not math.isfinite(self.ess_sup):
            hi = self._expand_upper(log_weight, hi)
        probes = _probe_grid(0.0, hi, extra)
        return _log_integral(log_weight, 0.0, hi, probes)

    def _log_mgf_power_coord(self, t: float, p: float, s: int) -> float:
        # u = x^p; du = p x^{p-1} dx keeps the small-p integrand a smooth bump
        hi = min(self.ess_sup, self._tail_cut()) ** p

        def log_weight(u):
            u = np.asarray(u, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                x = np.power(u, 1.0 / p)
                return (
                    s * t * u
                    + (1.0 / p - 1.0) * np.log(u)
                    + self._abs_logpdf(x)
                    - math.log(p)
                )

        extra = []
        if s < 0 and t > 0:
            extra.append((1.0 / p - 1.0) / t)
        if not math.isfinite(self.ess_sup):
            hi = self._expand_upper(log_weight, hi)
        probes = _probe_grid(0.0, hi, extra)
        return _log_integral(log_weight, 0.0, hi, probes)

    def _stationary_points(self, t: float, p: float, s: int) -> list[float]:
        return []

    @staticmethod
    def _expand_upper(log_weight, hi: float) -> float:
        for _ in range(200):
            probes = _probe_grid(0.0, hi)
            vals = np.asarray(log_weight(probes), dtype=float)
            peak = np.nanmax(np.where(np.isfinite(vals), vals, -np.inf))
            edge = float(log_weight(np.asarray([hi]))[0])
            if not math.isfinite(edge) or edge < peak - _LOG_TRUNC:
                return hi
            hi *= 2.0
        return hi


@dataclass(frozen=True, repr=False)
class UniformSymmetric(_ContinuousLaw):
    """Uniform on [-b, b]; |x| is uniform on [0, b]."""

    b: float = 1.0

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError("uniform halfwidth b must be positive and finite")

    @property
    def ess_sup(self) -> float:
        return self.b

    def abs_moment(self, q: float) -> float:
        if q <= -1:
            return math.inf
        return self.b**q / (1.0 + q)

    def _log_moments(self) -> tuple[float, float]:
        return math.log(self.b) - 1.0, 1.0

    def _abs_logpdf(self, x):
        out = np.full_like(x, -np.inf, dtype=float)
        inside = (x > 0) & (x < self.b)
        out[inside] = -math.log(self.b)
        return out

    def cdf_abs(self, x: float) -> float:
        return float(np.clip(x / self.b, 0.0, 1.0))

    def draw(self, rng, size):
        return rng.uniform(-self.b, self.b, size)

    def spec_string(self) -> str:
        return f"uniform:b={self.b:g}"


@dataclass(frozen=True, repr=False)
class UniformUnit(_ContinuousLaw):
    """Uniform on [0, 1]."""

    @property
    def ess_sup(self) -> float:
        return 1.0

    def abs_moment(self, q: float) -> float:
        if q <= -1:
            return math.inf
        return 1.0 / (1.0 + q)

    def _log_moments(self) -> tuple[float, float]:
        return -1.0, 1.0

    def _abs_logpdf(self, x):
        out = np.full_like(x, -np.inf, dtype=float)
        out[(x > 0) & (x < 1)] = 0.0
        return out

    def cdf_abs(self, x: float) -> float:
        return float(np.clip(x, 0.0, 1.0))

    def draw(self, rng, size):
        return rng.random(size)

    def spec_string(self) -> str:
        return "uniform01"


@dataclass(frozen=True, repr=False)
class DiffUniform(_ContinuousLaw):
    """|y - z| for independent y, z uniform on [-1, 1]; density 1 - x/2 on [0, 2]."""

    @property
    def ess_sup(self) -> float:
        return 2.0

    def abs_moment(self, q: float) -> float:
        if q <= -1:
            return math.inf
        return 2.0 ** (1.0 + q) / ((1.0 + q) * (2.0 + q))

    def _log_moments(self) -> tuple[float, float]:
        return math.log(2.0) - 1.5, 1.25

    def _abs_logpdf(self, x):
        out = np.full_like(x, -np.inf, dtype=float)
        inside = (x > 0) & (x < 2)
        out[inside] = np.log1p(-x[inside] / 2.0)
        return out

    def cdf_abs(self, x: float) -> float:
        x = float(np.clip(x, 0.0, 2.0))
        return x - x * x / 4.0

    def draw(self, rng, size):
        return rng.uniform(-1.0, 1.0, size) - rng.uniform(-1.0, 1.0, size)

    def spec_string(self) -> str:
        return "diffuniform"


@dataclass(frozen=True, repr=False)
class StandardNormal(_ContinuousLaw):
    """Standard normal; |x| is half-normal."""

    @property
    def ess_sup(self) -> float:
        return math.inf

    @property
    def exp_moment_order(self) -> float:
        return 2.0

    def mgf_t_bound(self, p: float) -> float:
        if p < 2.0:
            return math.inf
        if p == 2.0:
            return 0.5
        return 0.0

    def abs_moment(self, q: float) -> float:
        if q <= -1:
            return math.inf
        return math.exp(
            (q / 2.0) * math.log(2.0) + gammaln((q + 1.0) / 2.0) - 0.5 * math.log(math.pi)
        )

    def _log_moments(self) -> tuple[float, float]:
        return -(np.euler_gamma + math.log(2.0)) / 2.0, math.pi**2 / 8.0

    def _abs_logpdf(self, x):
        out = np.full_like(x, -np.inf, dtype=float)
        inside = x > 0
        out[inside] = 0.5 * math.log(2.0 / math.pi) - x[inside] ** 2 / 2.0
        return out

    def _tail_cut(self) -> float:
        return 42.0

    def _stationary_points(self, t, p, s):
        if s > 0 and p < 2.0:
            return [(t * p) ** (1.0 / (2.0 - p))]
        return []

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        if p == 2.0:
            # E[exp(s t x^2)] = (1 - 2 s t)^{-1/2}
            return -0.5 * math.log1p(-2.0 * s * t)
        if p > 2.0 and s > 0:
            return math.inf
        return super()._log_mgf(t, p, s)

    def cdf_abs(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return float(2.0 * ndtr(x) - 1.0)

    def draw(self, rng, size):
        return rng.standard_normal(size)

    def spec_string(self) -> str:
        return "normal"


@dataclass(frozen=True, repr=False)
class TwoPoint(Distribution):
    """P(x=0) = a, P(x=r) = 1-a."""

    a: float
    r: float = 1.0
    has_abs_atoms = True

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError("atom probability a must lie strictly in (0, 1)")
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError("spike location r must be positive and finite")

    @property
    def atom_at_zero(self) -> float:  # type: ignore[override]
        return self.a

    @property
    def ess_sup(self) -> float:
        return self.r

    @property
    def abs_two_point(self) -> tuple[float, float]:
        """(atom probability, spike) of the |x| law."""
        return self.a, self.r

    def abs_moment(self, q: float) -> float:
        if q == 0:
            return 1.0
        if q < 0:
            return math.inf
        return self.r**q * (1.0 - self.a)

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        return float(
            np.logaddexp(math.log(self.a), math.log1p(-self.a) + s * t * self.r**p)
        )

    def cdf_abs(self, x: float) -> float:
        if x < 0:
            return 0.0
        return self.a if x < self.r else 1.0

    def cdf_abs_left(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return self.a if x <= self.r else 1.0

    def draw(self, rng, size):
        return np.where(rng.random(size) < self.a, 0.0, self.r)

    def spec_string(self) -> str:
        return f"twopoint:a={self.a:g},r={self.r:g}"


@dataclass(frozen=True, repr=False)
class ThreePointSymmetric(Distribution):
    """P(x=0) = a, P(x=r) = P(x=-r) = (1-a)/2; |x| matches TwoPoint(a, r)."""

    a: float
    r: float = 1.0
    has_abs_atoms = True

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError("atom probability a must lie strictly in (0, 1)")
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError("spike location r must be positive and finite")

    @property
    def atom_at_zero(self) -> float:  # type: ignore[override]
        return self.a

    @property
    def ess_sup(self) -> float:
        return self.r

    @property
    def abs_two_point(self) -> tuple[float, float]:
        return self.a, self.r

    def abs_moment(self, q: float) -> float:
        if q == 0:
            return 1.0
        if q < 0:
            return math.inf
        return self.r**q * (1.0 - self.a)

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        return float(
            np.logaddexp(math.log(self.a), math.log1p(-self.a) + s * t * self.r**p)
        )

    def cdf_abs(self, x: float) -> float:
        if x < 0:
            return 0.0
        return self.a if x < self.r else 1.0

    def cdf_abs_left(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return self.a if x <= self.r else 1.0

    def draw(self, rng, size):
        u = rng.random(size)
        signs = np.where(rng.random(size) < 0.5, -1.0, 1.0)
        return np.where(u < self.a, 0.0, self.r * signs)

    def spec_string(self) -> str:
        return f"threepoint:a={self.a:g},r={self.r:g}"


@dataclass(frozen=True, repr=False)
class ZeroInflated(Distribution):
    """x = 0 with probability a, else a draw from an atom-free base law."""

    a: float
    base: Distribution
    has_abs_atoms = True

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError("atom probability a must lie strictly in (0, 1)")
        if self.base.atom_at_zero > 0:
            raise ValueError("zero-inflated base law must not carry its own atom at zero")

    @property
    def atom_at_zero(self) -> float:  # type: ignore[override]
        return self.a

    @property
    def ess_sup(self) -> float:
        return self.base.ess_sup

    @property
    def exp_moment_order(self) -> float:
        return self.base.exp_moment_order

    def mgf_t_bound(self, p: float) -> float:
        return self.base.mgf_t_bound(p)

    def abs_moment(self, q: float) -> float:
        if q == 0:
            return 1.0
        if q < 0:
            return math.inf
        return (1.0 - self.a) * self.base.abs_moment(q)

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        base = self.base.log_mgf_abs_p(t, p, "+" if s > 0 else "-")
        if base == math.inf:
            return math.inf
        return float(np.logaddexp(math.log(self.a), math.log1p(-self.a) + base))

    def cdf_abs(self, x: float) -> float:
        if x < 0:
            return 0.0
        return self.a + (1.0 - self.a) * self.base.cdf_abs(x)

    def cdf_abs_left(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return self.a + (1.0 - self.a) * self.base.cdf_abs_left(x)

    def draw(self, rng, size):
        keep = rng.random(size) >= self.a
        vals = self.base.draw(rng, size)
        return np.where(keep, vals, 0.0)

    def spec_string(self) -> str:
        return f"zeroinflated:a={self.a:g},base={self.base.spec_string()}"


class Empirical(Distribution):
    """Law of a finite sample; every statistic is the sample statistic."""

    has_abs_atoms = True

    def __init__(self, samples: Sequence[float], label: str | None = None):
        values = np.asarray(samples, dtype=float)
        if values.size == 0:
            raise ValueError("empirical law needs at least one sample")
        if not np.all(np.isfinite(values)):
            raise ValueError("empirical samples must all be finite")
        self.values = values
        self.label = label
        self._abs_sorted = np.sort(np.abs(values))

    @property
    def atom_at_zero(self) -> float:  # type: ignore[override]
        return float(np.mean(self.values == 0.0))

    @property
    def ess_sup(self) -> float:
        return float(self._abs_sorted[-1])

    @property
    def ess_inf_abs(self) -> float:
        return float(self._abs_sorted[0])

    def abs_moment(self, q: float) -> float:
        av = self._abs_sorted
        if q < 0 and av[0] == 0.0:
            return math.inf
        with np.errstate(divide="ignore"):
            powered = np.power(av, q)
        if not np.all(np.isfinite(powered)):
            return math.inf
        return float(np.mean(powered))

    def _log_moments(self) -> tuple[float, float]:
        logs = np.log(self._abs_sorted)
        return float(np.mean(logs)), float(np.var(logs))

    def _log_mgf(self, t: float, p: float, s: int) -> float:
        exponents = s * t * np.power(self._abs_sorted, p)
        return float(logsumexp(exponents) - math.log(exponents.size))

    def cdf_abs(self, x: float) -> float:
        return float(np.searchsorted(self._abs_sorted, x, side="right")) / self._abs_sorted.size

    def cdf_abs_left(self, x: float) -> float:
        return float(np.searchsorted(self._abs_sorted, x, side="left")) / self._abs_sorted.size

    def draw(self, rng, size):
        idx = rng.integers(0, self.values.size, size)
        return self.values[idx]

    def spec_string(self) -> str:
        return self.label or f"empirical:n={self.values.size}"

    def __repr__(self) -> str:
        return f"Empirical(n={self.values.size})"


# ---------------------------------------------------------------------------
# reports and module-level operation surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentReport:
    p: float
    mu_p: float
    log_mean: float | None
    log_var: float | None
    ess_sup: float
    atom_at_zero: float


@dataclass(frozen=True)
class AssumptionReport:
    a1_holds: bool
    a2_holds: bool
    p0: float | None
    t0: float | None
    a3_holds: bool
    y0: float | None
    a4_holds: bool
    p1: float | None
    atom_at_zero: float


def mu_p(dist: Distribution, p: float) -> float:
    return dist.mu_p(p)


def mgf_abs_p(dist: Distribution, t: float, p: float, sign) -> float:
    return dist.mgf_abs_p(t, p, sign)


def neg_moment(dist: Distribution, y: float) -> float:
    return dist.neg_moment(y)


def log_moments(dist: Distribution) -> tuple[float, float]:
    return dist.log_moments()


def moment_report(dist: Distribution, p: float) -> MomentReport:
    if dist.atom_at_zero > 0:
        log_mean = log_var = None
    else:
        log_mean, log_var = dist.log_moments()
    return MomentReport(
        p=p,
        mu_p=dist.mu_p(p),
        log_mean=log_mean,
        log_var=log_var,
        ess_sup=dist.ess_sup,
        atom_at_zero=dist.atom_at_zero,
    )


def validate_assumptions(dist: Distribution) -> AssumptionReport:
    """Check the working hypotheses: i.i.d. non-degeneracy, an exponential
    moment for |x|^p0, a finite inverse moment, and an exact atom at zero."""
    atom = dist.atom_at_zero

    if isinstance(dist, Empirical):
        a1 = np.unique(dist._abs_sorted).size > 1
    else:
        a1 = True

    bounded = math.isfinite(dist.ess_sup)
    if bounded:
        a2, p0, t0 = True, math.inf, 1.0
    elif dist.exp_moment_order > 0:
        p0 = dist.exp_moment_order
        cap = dist.mgf_t_bound(p0)
        t0 = 1.0 if cap == math.inf else cap / 2.0
        a2 = True
    else:
        a2, p0, t0 = False, None, None

    if atom > 0:
        a3, y0 = False, None
    elif isinstance(dist, Empirical):
        a3, y0 = True, 1.0
    else:
        y0 = 0.5
        a3 = dist.neg_moment(y0) < math.inf

    if atom > 0:
        a4, p1 = True, 1.0
    else:
        a4, p1 = False, None

    return AssumptionReport(
        a1_holds=a1,
        a2_holds=a2,
        p0=p0,
        t0=t0,
        a3_holds=a3,
        y0=y0 if a3 else None,
        a4_holds=a4,
        p1=p1,
        atom_at_zero=atom,
    )


def sample(dist: Distribution, count: int, seed: int) -> np.ndarray:
    """Deterministic draw of `count` values for a given seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return dist.draw(generator(seed), count)


# ---------------------------------------------------------------------------
# canonical textual form
# ---------------------------------------------------------------------------


def _parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, eq, val = part.partition("=")
        if not eq:
            raise ValueError(f"malformed distribution parameter {part!r}")
        out[key.strip()] = val.strip()
    return out


def _kv_float(kv: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in kv:
        if default is None:
            raise ValueError(f"missing distribution parameter {key!r}")
        return default
    try:
        return float(kv[key])
    except ValueError as exc:
        raise ValueError(f"parameter {key!r} is not a number: {kv[key]!r}") from exc


def load_empirical_column(path: str, col: int) -> Empirical:
    """Read one numeric column from a CSV file (header row tolerated)."""
    values: list[float] = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            if col >= len(row):
                raise ValueError(f"{path}: row {i + 1} has no column {col}")
            cell = row[col].strip()
            try:
                values.append(float(cell))
            except ValueError:
                if i == 0:
                    continue  # header
                raise ValueError(f"{path}: row {i + 1}, column {col}: {cell!r} is not numeric")
    if not values:
        raise ValueError(f"{path}: column {col} contains no numeric data")
    return Empirical(values, label=f"empirical:path={path},col={col}")


def parse_spec(text: str) -> Distribution:
    """Parse the CLI textual form, e.g. 'uniform:b=1' or 'twopoint:a=0.5,r=1'."""
    head, _, rest = text.strip().partition(":")
    name = head.strip().lower()

    if name in ("uniform", "uniformsymmetric"):
        kv = _parse_kv(rest)
        return UniformSymmetric(b=_kv_float(kv, "b", 1.0))
    if name in ("uniform01", "uniformunit"):
        return UniformUnit()
    if name == "diffuniform":
        return DiffUniform()
    if name in ("normal", "standardnormal"):
        return StandardNormal()
    if name == "twopoint":
        kv = _parse_kv(rest)
        return TwoPoint(a=_kv_float(kv, "a"), r=_kv_float(kv, "r", 1.0))
    if name in ("threepoint", "threepointsymmetric"):
        kv = _parse_kv(rest)
        return ThreePointSymmetric(a=_kv_float(kv, "a"), r=_kv_float(kv, "r", 1.0))
    if name == "zeroinflated":
        marker = "base="
        idx = rest.find(marker)
        if idx < 0:
            raise ValueError("zeroinflated needs a base=... parameter")
        base = parse_spec(rest[idx + len(marker):])
        kv = _parse_kv(rest[:idx].rstrip(","))
        return ZeroInflated(a=_kv_float(kv, "a"), base=base)
    if name == "empirical":
        kv = _parse_kv(rest)
        if "path" not in kv:
            raise ValueError("empirical needs a path=FILE.csv parameter")
        col = int(_kv_float(kv, "col", 0.0))
        return load_empirical_column(kv["path"], col)
    raise ValueError(f"unknown distribution {name!r}")
