"""Domain-family sweeps onto the (lambda1, lambda2) plane.

Each record normalizes a domain to unit measure omega_N and carries grid
eigenvalues (raw per level, extrapolated, normalized) plus, for dumbbells,
the normalized quadrature bounds from the two trial-field constructions.
Region checks test the sharp inclusions satisfied by every unit-measure
domain: lambda1 >= lambda1(ball) (ball minimizes lambda1), lambda2 >=
lambda2(two half balls) (that pair minimizes lambda2), and
1 <= lambda2/lambda1 <= lambda2(ball)/lambda1(ball).
"""

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import ball_spectrum, theta_spectrum, unit_ball_volume
from .geometry import (
    Ball, DisjointUnion, Dumbbell, Ellipse, Rectangle, Scaled,
    bounding_ball, measure,
)
from .pipeline import solve_domain
from .testfn import QuadConfig, lemma1_rayleigh, lemma2_rayleigh

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "RegionReport",
    "ConeConstruction",
    "DEFAULT_EPS_GRID",
    "DEFAULT_FAMILIES",
    "CSV_HEADER",
    "sweep",
    "default_sweep",
    "region_check",
    "cone_construction",
    "lower_boundary",
    "records_to_csv",
]

# half-decade (factor sqrt(2)) grid from 5e-3 to 0.2; rates are fitted on
# the sub-decade [5e-3, 0.1]
DEFAULT_EPS_GRID = tuple(0.005 * 2.0 ** (k / 2.0) for k in range(11)) + (0.2,)
RATE_FIT_WINDOW = (0.005, 0.1)

DEFAULT_FAMILIES = {
    "ball": (1.0,),
    "two_balls_ratio": (0.8, 1.0),
    "rectangles": (1.0, 2.0, 3.0),
    "ellipses": (1.5, 2.0),
    "dumbbell": DEFAULT_EPS_GRID,
}

CSV_HEADER = ("family,param,h_list,lambda1_raw,lambda2_raw,lambda1_x,lambda2_x,"
              "measure,t,lambda1_norm,lambda2_norm,bound1,bound2,err")


@dataclass(frozen=True)
class SweepConfig:
    h_list: tuple = (1 / 32, 1 / 64, 1 / 128)
    tol: float = 1e-6
    seed: int | None = None
    grid_eps_min: float = 0.1  # dumbbells below this carry bounds only
    quad: QuadConfig = field(default_factory=QuadConfig)
    jobs: int = 1

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("solver tolerance must be > 0")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class SweepRecord:
    """One normalized point of the attainable cloud."""

    family: str
    param: float
    h_list: tuple = ()
    lambda1_raw: tuple = ()
    lambda2_raw: tuple = ()
    lambda1_x: float | None = None
    lambda2_x: float | None = None
    measure: float = float("nan")
    t_factor: float = float("nan")
    lambda1_norm: float | None = None
    lambda2_norm: float | None = None
    bound1: float | None = None
    bound2: float | None = None
    error_est: float = 0.0
    failure: str | None = None

    def normalized_pair(self):
        """(lambda1, lambda2) of the unit-measure copy: the grid pair when
        available, otherwise the quadrature bound pair."""
        if self.lambda1_norm is not None and self.lambda2_norm is not None:
            return self.lambda1_norm, self.lambda2_norm
        if self.bound1 is not None and self.bound2 is not None:
            return self.bound1, self.bound2
        return None


def _family_domain(family: str, param: float):
    if family == "ball":
        return Ball(radius=param)
    if family == "dumbbell":
        return Dumbbell(epsilon=param)
    if family == "two_balls_ratio":
        if not 0 < param <= 1:
            raise ValueError(f"radius ratio must be in (0, 1], got {param}")
        gap = 2.0
        half = 0.5 * (1.0 + param + gap)
        return DisjointUnion(parts=(
            Ball(center=(-half, 0.0), radius=1.0),
            Ball(center=(half, 0.0), radius=param),
        ))
    if family == "rectangles":
        if param <= 0:
            raise ValueError(f"aspect ratio must be > 0, got {param}")
        return Rectangle(width=param, height=1.0)
    if family == "ellipses":
        if param <= 0:
            raise ValueError(f"aspect ratio must be > 0, got {param}")
        return Ellipse(semi_x=param, semi_y=1.0)
    raise ValueError(f"unknown sweep family {family!r}")


def _solve_one(family: str, param: float, config: SweepConfig) -> SweepRecord:
    domain = _family_domain(family, param)
    vol = measure(domain)
    omega = unit_ball_volume(domain.dim)
    t = (omega / vol) ** (1.0 / domain.dim)
    norm_factor = (vol / omega) ** (2.0 / domain.dim)
    record = SweepRecord(family=family, param=param, measure=vol, t_factor=t)

    if family == "dumbbell":
        b1 = lemma1_rayleigh(param, dim=domain.dim, quad=config.quad)
        b2 = lemma2_rayleigh(param, dim=domain.dim, quad=config.quad)
        quad_err = (b1.error_est + b2.error_est) * norm_factor
        record = replace(record,
                         bound1=b1.quotient * norm_factor,
                         bound2=b2.quotient * norm_factor,
                         error_est=record.error_est + quad_err)
        if param < config.grid_eps_min:
            return record

    solve = solve_domain(domain, config.h_list, tol=config.tol, seed=config.seed)
    return replace(
        record,
        h_list=solve.h_list,
        lambda1_raw=tuple(solve.raw(0)),
        lambda2_raw=tuple(solve.raw(1)),
        lambda1_x=float(solve.lambda_x[0]),
        lambda2_x=float(solve.lambda_x[1]),
        lambda1_norm=float(solve.lambda_norm[0]),
        lambda2_norm=float(solve.lambda_norm[1]),
        error_est=record.error_est + float(np.max(solve.error_est)),
    )


def _solve_one_guarded(args):
    family, param, config = args
    try:
        return _solve_one(family, param, config)
    except Exception as exc:  # record inline, sweep continues
        return SweepRecord(family=family, param=param, failure=f"{type(exc).__name__}: {exc}")


def sweep(family: str, params, config: SweepConfig = SweepConfig()) -> list:
    """Compute one SweepRecord per parameter; failures are recorded inline.

    Records are deterministic for a fixed config and are returned sorted by
    parameter regardless of the number of worker processes.  An unknown
    family is a configuration error and raises instead.
    """
    if family not in DEFAULT_FAMILIES:
        raise ValueError(f"unknown sweep family {family!r}; known: "
                         f"{sorted(DEFAULT_FAMILIES)}")
    tasks = [(family, float(p), config) for p in params]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_solve_one_guarded, tasks))
    else:
        records = [_solve_one_guarded(t) for t in tasks]
    return sorted(records, key=lambda r: r.param)


def default_sweep(config: SweepConfig = SweepConfig(), families=None) -> list:
    """The full default suite over all families, concatenated."""
    chosen = DEFAULT_FAMILIES if families is None else {
        f: DEFAULT_FAMILIES[f] for f in families
    }
    records = []
    for family, params in chosen.items():
        records.extend(sweep(family, params, config))
    return records


# ---------------------------------------------------------------------------
# region inclusion checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionReport:
    """Margins of the three sharp inclusions, each with its pass flag.

    Margins are signed distances into the admissible region; the tolerance
    is the record's own error budget.
    """

    faber_krahn_margin: float
    faber_krahn_ok: bool
    krahn_szego_margin: float
    krahn_szego_ok: bool
    ratio: float
    ratio_low_margin: float
    ratio_high_margin: float
    ashbaugh_benguria_ok: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.faber_krahn_ok and self.krahn_szego_ok and self.ashbaugh_benguria_ok


def region_check(record: SweepRecord, dim: int = 2) -> RegionReport:
    """Check a normalized record against the universal inclusions."""
    pair = record.normalized_pair()
    if pair is None:
        raise ValueError(f"record for {record.family}({record.param}) has no usable values: "
                         f"{record.failure}")
    lam1, lam2 = pair
    spec = ball_spectrum(dim)
    lam_theta = theta_spectrum(dim)[0]
    ab_limit = spec.lambda2 / spec.lambda1
    tol = record.error_est
    ratio = lam2 / lam1
    ratio_tol = 2.0 * tol / lam1
    return RegionReport(
        faber_krahn_margin=lam1 - spec.lambda1,
        faber_krahn_ok=lam1 >= spec.lambda1 - tol,
        krahn_szego_margin=lam2 - lam_theta,
        krahn_szego_ok=lam2 >= lam_theta - tol,
        ratio=ratio,
        ratio_low_margin=ratio - 1.0,
        ratio_high_margin=ab_limit - ratio,
        ashbaugh_benguria_ok=(1.0 - ratio_tol <= ratio <= ab_limit + ratio_tol),
        tolerance=tol,
    )


# ---------------------------------------------------------------------------
# scaling construction: (lam1, lam2) attainable implies (t lam1, t lam2) is
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeConstruction:
    """Shrunken base plus a far filler ball realizing (t lam1, t lam2)."""

    domain: object
    t: float
    filler_radius: float
    filler_lambda1: float
    target_lambda2: float

    @property
    def dominance_margin(self) -> float:
        return self.filler_lambda1 - self.target_lambda2


def cone_construction(base, t: float, base_lambda2: float | None = None) -> ConeConstruction:
    """Shrink a unit-measure base by t^(-1/2) and restore the measure with a
    far small ball, so the normalized pair becomes (t lam1, t lam2).

    Requires the filler ball's first eigenvalue to exceed t * lambda2(base);
    with a single filler this bounds t from above, and violations raise with
    the admissible range.  ``base_lambda2`` defaults to the exact value when
    the base is a unit ball.
    """
    if t < 1:
        raise ValueError(f"scaling factor must be >= 1, got {t}")
    omega = unit_ball_volume(base.dim)
    vol = measure(base)
    if abs(vol - omega) > 1e-9 * omega:
        raise ValueError(f"base must have unit measure {omega:.12g}, got {vol:.12g}")
    if base_lambda2 is None:
        if isinstance(base, Ball) and base.radius == 1.0:
            base_lambda2 = ball_spectrum(base.dim).lambda2
        else:
            raise ValueError("base_lambda2 is required for non-ball bases")
    if t == 1:
        return ConeConstruction(domain=base, t=1.0, filler_radius=0.0,
                                filler_lambda1=math.inf, target_lambda2=base_lambda2)
    n = base.dim
    shrink = Scaled(factor=t ** (-0.5), inner=base)
    filler_radius = (1.0 - t ** (-n / 2.0)) ** (1.0 / n)
    filler_lambda1 = ball_spectrum(n).lambda1 / filler_radius**2
    target = t * base_lambda2
    if filler_lambda1 <= target:
        t_max = _max_dominated_t(base_lambda2, n)
        raise ValueError(
            f"single filler ball cannot dominate: lambda1(filler) = "
            f"{filler_lambda1:.6g} <= t lambda2(base) = {target:.6g}; "
            f"construction valid for 1 <= t <= {t_max:.6g}"
        )
    c_shrink, r_shrink = bounding_ball(shrink)
    distance = 10.0 * (2.0 * r_shrink + 2.0 * filler_radius)
    filler_center = (distance,) + (0.0,) * (n - 1)
    domain = DisjointUnion(parts=(shrink, Ball(center=filler_center,
                                               radius=filler_radius, dim=n)))
    return ConeConstruction(domain=domain, t=t, filler_radius=filler_radius,
                            filler_lambda1=filler_lambda1, target_lambda2=target)


def _max_dominated_t(base_lambda2: float, n: int) -> float:
    lam1 = ball_spectrum(n).lambda1

    def dominates(t):
        radius_sq = (1.0 - t ** (-n / 2.0)) ** (2.0 / n)
        return lam1 / radius_sq > t * base_lambda2

    lo, hi = 1.0 + 1e-9, 2.0
    while dominates(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e9:
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dominates(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# empirical lower boundary
# ---------------------------------------------------------------------------

def lower_boundary(records: list) -> list:
    """Records not radially dominated toward the origin by any other record.

    A record dies when another has both coordinates smaller by one common
    factor s < 1; survivors are returned sorted by lambda1.  A finite cloud
    only approximates the true boundary, so treat this as empirical.
    """
    pairs = []
    for rec in records:
        pair = rec.normalized_pair() if isinstance(rec, SweepRecord) else tuple(rec)
        if pair is not None:
            pairs.append((pair, rec))
    survivors = []
    for i, ((l1, l2), rec) in enumerate(pairs):
        dominated = any(
            max(m1 / l1, m2 / l2) < 1.0
            for j, ((m1, m2), _) in enumerate(pairs) if j != i
        )
        if not dominated:
            survivors.append(((l1, l2), rec))
    survivors.sort(key=lambda item: item[0][0])
    return [rec for _, rec in survivors]


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (tuple, list)):
        return ";".join(_fmt(v) for v in x)
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.12g}"


def records_to_csv(records: list) -> str:
    """Render records in the fixed sweep schema with 12 significant digits."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        row = [r.family, _fmt(r.param), _fmt(r.h_list), _fmt(r.lambda1_raw),
               _fmt(r.lambda2_raw), _fmt(r.lambda1_x), _fmt(r.lambda2_x),
               _fmt(r.measure), _fmt(r.t_factor), _fmt(r.lambda1_norm),
               _fmt(r.lambda2_norm), _fmt(r.bound1), _fmt(r.bound2),
               _fmt(r.error_est)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()
