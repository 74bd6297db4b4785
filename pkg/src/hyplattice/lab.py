"""Experiment harness: covolumes, T-sweeps, error-exponent fits, config and CSV I/O."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import zeta as hurwitz_zeta

from .errors import DegenerateFit, EmptyGrid, ParseError, UnsupportedField, ValidationError
from .field import EUCLIDEAN_M, FieldSpec
from .geometry import multipoint, u_from_dist
from .orbit import BoxSpec, StripSpec, sample_orbit
from .reduction import height_components
from .selberg import main_term_box, main_term_hypercube, main_term_strip

CSV_HEADER = ["T", "count", "main_term", "ratio", "excess", "n_of_z", "near_boundary", "wall_s"]

# zeta_F(-1) for the supported real quadratic fields, checked against
# covolume_from_lseries in the tests.
_ZETA_MINUS_ONE = {2: 1 / 12, 3: 1 / 6, 5: 1 / 30, 13: 1 / 6}


# ---------------------------------------------------------------------------
# covolumes


def covolume(spec):
    """Volume of Gamma \\ H^d for PSL_2(Z) or PSL_2(O_F) in the measure prod dx dy / y^2."""
    if spec.degree == 1:
        return math.pi / 3
    if spec.m not in _ZETA_MINUS_ONE:
        raise UnsupportedField(f"no covolume for m={spec.m}")
    return 8 * math.pi ** 2 * _ZETA_MINUS_ONE[spec.m]


def covolume_modular_integral():
    """Area of {|x| <= 1/2, x^2 + y^2 >= 1} by direct double integration."""
    val, _ = integrate.dblquad(lambda y, x: 1.0 / (y * y), -0.5, 0.5,
                               lambda x: math.sqrt(1.0 - x * x), lambda x: math.inf,
                               epsabs=1e-12, epsrel=1e-12)
    return val


def kronecker(D, n):
    """Kronecker symbol (D / n) for n >= 1."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D / n) for odd n
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def fundamental_discriminant(m):
    return m if m % 4 == 1 else 4 * m


def l_value_2(D):
    """L(2, chi_D) = D^-2 sum_{a=1}^{D} chi_D(a) zeta(2, a / D)."""
    return sum(kronecker(D, a) * hurwitz_zeta(2.0, a / D) for a in range(1, D + 1)) / D ** 2


def covolume_from_lseries(m):
    """2 D^(3/2) zeta_F(2) / pi^2 with zeta_F(2) = zeta(2) L(2, chi_D)."""
    D = fundamental_discriminant(m)
    zeta_f2 = math.pi ** 2 / 6 * l_value_2(D)
    return 2 * D ** 1.5 * zeta_f2 / math.pi ** 2


# ---------------------------------------------------------------------------
# configuration


KINDS = ("hypercube", "box", "strip", "transform-suite")


@dataclass
class ExperimentConfig:
    group_kind: str = "modular"
    m: int | None = None
    z: tuple = ((0.0, 1.0),)
    kind: str = "hypercube"
    grid: tuple = (1.0, 2.0, 1.0)
    box_mode: str = "zero"
    strip_E: tuple = ()
    strip_A: tuple = ()
    strip_B: tuple = ()
    q_hat: float | None = None
    tau_hat: float = 0.0
    out_path: str | None = None
    threads: int = 1

    def field_spec(self):
        if self.group_kind == "modular":
            return FieldSpec.rational()
        if self.group_kind == "hilbert":
            if self.m is None:
                raise ValidationError("group.m is required for hilbert groups")
            if self.m not in EUCLIDEAN_M:
                raise UnsupportedField(f"m={self.m}; supported: {EUCLIDEAN_M}")
            return FieldSpec.quadratic(self.m)
        raise ValidationError(f"group.kind must be modular or hilbert, got {self.group_kind!r}")

    def point(self):
        return multipoint(*[complex(x, y) for x, y in self.z])

    def grid_values(self):
        lo, hi, step = self.grid
        if step <= 0 or hi < lo:
            raise EmptyGrid(f"grid min={lo} max={hi} step={step} is empty")
        n = math.floor((hi - lo) / step + 1e-9) + 1
        return [lo + k * step for k in range(n)]

    def strip(self, T):
        return StripSpec(self.strip_E, self.strip_A, self.strip_B, T)

    def q_count(self, d):
        return d - len(self.strip_E) if self.kind == "strip" else d

    def validate(self):
        spec = self.field_spec()
        if self.kind not in KINDS:
            raise ValidationError(f"experiment.kind must be one of {KINDS}")
        if len(self.z) != spec.degree:
            raise ValidationError(f"z needs {spec.degree} coordinates, got {len(self.z)}")
        self.point()
        if self.kind == "transform-suite":
            return spec
        self.grid_values()
        if self.box_mode not in ("zero", "half"):
            raise ValidationError("box.mode must be zero or half")
        if self.kind == "strip":
            self.strip(0.0).validate(spec.degree)
        q = self.q_count(spec.degree)
        if self.q_hat is not None and self.q_hat < q:
            raise ValidationError(f"predict.q_hat={self.q_hat} < #Q={q}")
        if not 0 <= self.tau_hat <= 0.5:
            raise ValidationError("predict.tau_hat must lie in [0, 1/2]")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")
        return spec


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


_SCALAR_KEYS = {
    "group.kind": ("group_kind", str),
    "group.m": ("m", int),
    "experiment.kind": ("kind", str),
    "box.mode": ("box_mode", str),
    "strip.E": ("strip_E", lambda s: tuple(int(v) for v in s.split(",") if v.strip())),
    "strip.A": ("strip_A", _floats),
    "strip.B": ("strip_B", _floats),
    "predict.q_hat": ("q_hat", float),
    "predict.tau_hat": ("tau_hat", float),
    "out.path": ("out_path", str),
    "threads": ("threads", int),
}
_GRID_KEYS = ("grid.min", "grid.max", "grid.step")


def parse_config(path):
    """Read a key=value config with dotted keys; '#' starts a comment."""
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def parse_config_text(text):
    values = {}
    coords = {}
    grid = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key = value", line=lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", line=lineno, key=key)
        seen.add(key)
        try:
            if key in _SCALAR_KEYS:
                name, conv = _SCALAR_KEYS[key]
                values[name] = conv(val)
            elif key in _GRID_KEYS:
                grid[key] = float(val)
            elif key.startswith("z."):
                parts = key.split(".")
                if len(parts) != 3 or not parts[1].isdigit() or parts[2] not in ("x", "y"):
                    raise ParseError(f"unknown key {key!r}", line=lineno, key=key)
                coords[(int(parts[1]), parts[2])] = float(val)
            else:
                raise ParseError(f"unknown key {key!r}", line=lineno, key=key)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad value for {key!r}: {val!r}", line=lineno, key=key) from None
    if "group_kind" not in values:
        raise ParseError("missing required key 'group.kind'", key="group.kind")
    if coords:
        n = max(i for i, _ in coords) + 1
        z = []
        for i in range(n):
            if (i, "x") not in coords or (i, "y") not in coords:
                raise ParseError(f"z.{i} needs both x and y", key=f"z.{i}")
            z.append((coords[(i, "x")], coords[(i, "y")]))
        values["z"] = tuple(z)
    if grid:
        missing = [k for k in _GRID_KEYS if k not in grid]
        if missing:
            raise ParseError(f"missing required key {missing[0]!r}", key=missing[0])
        values["grid"] = tuple(grid[k] for k in _GRID_KEYS)
    return ExperimentConfig(**values)


def format_config(cfg):
    lines = [f"group.kind = {cfg.group_kind}"]
    if cfg.m is not None:
        lines.append(f"group.m = {cfg.m}")
    for i, (x, y) in enumerate(cfg.z):
        lines += [f"z.{i}.x = {x!r}", f"z.{i}.y = {y!r}"]
    lines.append(f"experiment.kind = {cfg.kind}")
    for key, v in zip(_GRID_KEYS, cfg.grid):
        lines.append(f"{key} = {v!r}")
    lines.append(f"box.mode = {cfg.box_mode}")
    if cfg.strip_E:
        lines.append("strip.E = " + ",".join(str(j) for j in cfg.strip_E))
        lines.append("strip.A = " + ",".join(repr(float(a)) for a in cfg.strip_A))
        lines.append("strip.B = " + ",".join(repr(float(b)) for b in cfg.strip_B))
    if cfg.q_hat is not None:
        lines.append(f"predict.q_hat = {cfg.q_hat!r}")
    lines.append(f"predict.tau_hat = {cfg.tau_hat!r}")
    if cfg.out_path is not None:
        lines.append(f"out.path = {cfg.out_path}")
    lines.append(f"threads = {cfg.threads}")
    return "\n".join(lines) + "\n"


def write_config(cfg, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(cfg))


# ---------------------------------------------------------------------------
# experiments


@dataclass
class CountReport:
    T: float
    count: int
    main_term: float
    ratio: float
    excess: float
    n_of_z: float
    near_boundary: int
    wall_s: float
    candidates: int = field(default=0, compare=False)

    def row(self):
        return [repr(float(self.T)), str(self.count), repr(self.main_term), repr(self.ratio),
                repr(self.excess), repr(self.n_of_z), str(self.near_boundary),
                f"{self.wall_s:.6f}"]


@dataclass
class Prediction:
    e: int
    q: int
    q_hat: float
    tau_hat: float
    regime: str
    exponent: float

    def describe(self):
        return (f"e={self.e} q={self.q} q_hat={self.q_hat:g} tau_hat={self.tau_hat:g} "
                f"regime={self.regime} predicted error ~ exp({self.exponent:.6g} T)")


def predicted_exponent(cfg, d):
    """Predicted error growth rate in T, following the large/small spectral gap split."""
    q = cfg.q_count(d)
    e = d - q
    qh = float(cfg.q_hat) if cfg.q_hat is not None else float(q)
    th = cfg.tau_hat
    if cfg.kind == "strip":
        threshold = qh / (2 * (d + 2))
        if th <= threshold:
            return Prediction(e, q, qh, th, "large-gap", (d + 1) / (d + 2) * qh)
        return Prediction(e, q, qh, th, "small-gap", (1 + 2 * th + e) / (2 + e) * qh)
    threshold = qh / (2 * (qh + 2))
    if th <= threshold:
        return Prediction(e, q, qh, th, "large-gap", d * (qh + 1) / (qh + 2))
    return Prediction(e, q, qh, th, "small-gap", d * (2 * (th + 1) / 3 - 2 * th / (3 * qh)))


def _region(cfg, T, d):
    """(lower, upper, closed, main-term function) for one grid value."""
    v = u_from_dist(T)
    if cfg.kind == "hypercube":
        return (0.0,) * d, (v,) * d, (True,) * d, lambda vol: main_term_hypercube(T, vol, d)
    if cfg.kind == "box":
        lo = 0.0 if cfg.box_mode == "zero" else v / 2
        box = BoxSpec((lo,) * d, (v,) * d)
        return box.U, box.V, (False,) * d, lambda vol: main_term_box(box, vol, d)
    strip = cfg.strip(T)
    lower, upper, closed = [0.0] * d, [v] * d, [True] * d
    for j, a, b in zip(strip.E, strip.A, strip.B):
        lower[j - 1], upper[j - 1], closed[j - 1] = u_from_dist(a), u_from_dist(b), False
    return tuple(lower), tuple(upper), tuple(closed), lambda vol: main_term_strip(strip, vol, d)


def run_count_experiment(cfg, on_row=None):
    """Run the sweep; ``on_row`` receives each report as soon as it is computed.

    The orbit is enumerated once, at the largest region of the grid, and
    every grid value is counted from that sample.
    """
    spec = cfg.validate()
    if cfg.kind == "transform-suite":
        raise ValidationError("transform-suite is not a counting experiment")
    d = spec.degree
    z = cfg.point()
    Ts = cfg.grid_values()
    vol = covolume(spec)
    n_z = height_components(z, spec).n
    regions = [_region(cfg, T, d) for T in Ts]
    top = [max(max(r[1][j] for r in regions), 1e-12) for j in range(d)]
    sample = sample_orbit(z, top, spec, threads=cfg.threads)
    reports = []
    for T, (lower, upper, closed, main) in zip(Ts, regions):
        t0 = time.perf_counter()
        res = sample.count(lower, upper, closed)
        mt = main(vol)
        rep = CountReport(T=T, count=res.count, main_term=mt,
                          ratio=res.count / mt if mt > 0 else math.inf,
                          excess=res.count - mt, n_of_z=n_z,
                          near_boundary=res.near_boundary,
                          wall_s=time.perf_counter() - t0 + (sample.wall_s if not reports else 0.0),
                          candidates=res.candidates)
        reports.append(rep)
        if on_row is not None:
            on_row(rep)
    return reports


@dataclass
class FitResult:
    slope: float
    intercept: float
    r2: float
    sign_changes: bool


def fit_error_exponent(reports):
    """Least-squares fit of log|excess| against T."""
    rows = [(r.T, r.excess) for r in reports if r.excess != 0]
    if not rows:
        raise DegenerateFit("all excesses are zero")
    if len(rows) < 4:
        raise DegenerateFit(f"need at least 4 rows with nonzero excess, got {len(rows)}")
    T = np.array([t for t, _ in rows])
    ex = np.array([e for _, e in rows])
    y = np.log(np.abs(ex))
    slope, intercept = np.polyfit(T, y, 1)
    resid = y - (slope * T + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    signs = np.sign(ex)
    return FitResult(float(slope), float(intercept), r2, bool(np.any(signs[1:] != signs[:-1])))


class CsvSink:
    """Writes the header at once and flushes every row, so aborted runs keep their rows."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(CSV_HEADER)
        self._fh.flush()

    def __call__(self, report):
        self._w.writerow(report.row())
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_csv(reports, path):
    with CsvSink(path) as sink:
        for r in reports:
            sink(r)


# ---------------------------------------------------------------------------
# transform property suite


@dataclass
class SuiteCheck:
    name: str
    passed: bool
    detail: str


def run_transform_suite(envelope_points=24):
    """Property checks of the numerical Selberg transform on fixed bumps."""
    from .selberg import BumpSpec, SelbergTransform, build_bump, profile_integral

    checks = []
    four_pi = 4 * math.pi

    k = build_bump(BumpSpec(0.5, 1.5, 0.25, "outer"))
    S = SelbergTransform(k)
    h_half = S(0.5).h.real
    target = four_pi * profile_integral(k)
    rel = abs(h_half - target) / target
    checks.append(SuiteCheck("h(1/2) = 4 pi int k", rel <= 1e-7, f"relative error {rel:.2e}"))

    Y = 1e-3
    tol = 1e-9 * four_pi
    h_out = SelbergTransform(build_bump(BumpSpec(0.0, 1.0, Y, "outer")))(0.5).h.real
    h_in = SelbergTransform(build_bump(BumpSpec(0.0, 1.0, Y, "inner")))(0.5).h.real
    ok = (four_pi - tol <= h_out <= four_pi * (1 + 2 * Y) + tol
          and four_pi * (1 - 2 * Y) - tol <= h_in <= four_pi + tol)
    checks.append(SuiteCheck("h(1/2) sandwich for inner/outer bumps", ok,
                             f"inner {h_in:.12g}, outer {h_out:.12g}, 4 pi {four_pi:.12g}"))

    h0 = S(0.0).h.real
    vals = [abs(S(1j * t).h) for t in (0.3, 1.0, 3.0, 10.0)]
    checks.append(SuiteCheck("|h(it)| <= h(0)", all(v <= h0 * (1 + 1e-9) for v in vals),
                             f"h(0)={h0:.6g}, |h(it)|={[round(v, 6) for v in vals]}"))

    taus = [0.1 * i for i in range(6)]
    hs = [S(t).h.real for t in taus]
    checks.append(SuiteCheck("h increasing on [0, 1/2]",
                             all(b > a for a, b in zip(hs, hs[1:])),
                             "h = " + ", ".join(f"{v:.6g}" for v in hs)))

    E = SelbergTransform(build_bump(BumpSpec(1.0, 3.0, 0.5, "outer")))
    ts = np.geomspace(10.0, 200.0, envelope_points)
    mags = np.array([abs(E(1j * t).h) for t in ts])
    slope = float(np.polyfit(np.log(ts), np.log(mags), 1)[0])
    checks.append(SuiteCheck("decay slope of |h(it)| on [10, 200] <= -1.2", slope <= -1.2,
                             f"slope {slope:.3f}"))
    return checks
