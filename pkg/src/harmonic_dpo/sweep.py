"""Parameter sweeps over the down-conversion coupling and figure tables."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import closedform as cf
from . import oracle
from .closedform import Form
from .errors import AllPointsSingular, DPOError, FormMismatch, InvalidParams, SingularRegime, Unstable
from .model import SystemParams, WorkingPoint, down_conversion_fraction, solve_steady_state, working_point_from_eps1

SWEEP_HEADER = ("kappa", "eps1", "duan_sum", "var_plus", "var_minus", "nbar", "delta_I", "fraction", "entangled", "regime")
OBSERVABLE_NAMES = ("duan_sum", "var_plus", "var_minus", "nbar", "delta_I", "fraction")

# kappa set is a default choice; override per call or on the command line
DEFAULT_FIGURE_KAPPAS = (0.1, 0.3, 0.5)
DEFAULT_FIGURE_LAMBDA = 0.5
FIGURE_QUANTITY = {1: "duan_sum", 2: "var_minus", 3: "nbar", 4: "delta_I"}
FIGURE_TITLE = {
    1: "sum of EPR-type variances vs eps1",
    2: "minus quadrature variance of the superposed mode vs eps1",
    3: "mean photon number of the superposed mode vs eps1",
    4: "mean intensity difference vs eps1",
}
POLE_RATIO = 0.25


def fmt(value) -> str:
    """Render a CSV cell: floats at full double precision, booleans lower-case."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise InvalidParams(f"grid count must be an integer >= 2, got {self.count!r}")
        if not self.start < self.stop:
            raise InvalidParams(f"grid start must be < stop, got [{self.start}, {self.stop}]")
        if self.spacing not in ("linear", "log"):
            raise InvalidParams(f"grid spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and self.start <= 0:
            raise InvalidParams("log spacing needs a positive start")

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, int(self.count))
        return np.linspace(self.start, self.stop, int(self.count))


@dataclass(frozen=True)
class SweepSpec:
    """Sweep configuration; the JSON config mirrors these fields.

    Exactly one of ``eps1_grid`` (down-conversion coupling, above threshold)
    and ``drive_grid`` (drive amplitude, any regime) must be given.
    """

    kappa_values: tuple[float, ...]
    lambda_c: float
    eps1_grid: GridSpec | None = None
    guard: float = cf.DEFAULT_GUARD
    forms: frozenset[Form] = frozenset({Form.REDUCED})
    observables: frozenset[str] = frozenset(OBSERVABLE_NAMES)
    drive_grid: GridSpec | None = None

    def __post_init__(self):
        if not self.kappa_values:
            raise InvalidParams("kappa_values must not be empty")
        for k in self.kappa_values:
            SystemParams(k, self.lambda_c)
        if (self.eps1_grid is None) == (self.drive_grid is None):
            raise InvalidParams("give exactly one of eps1_grid and drive_grid")
        if self.drive_grid is not None and self.drive_grid.start < 0:
            raise InvalidParams("drive grid must be non-negative")
        if not (self.guard >= 0 and math.isfinite(self.guard)):
            raise InvalidParams(f"guard must be a finite non-negative number, got {self.guard!r}")
        if not self.forms:
            raise InvalidParams("forms must not be empty")
        unknown = set(self.observables) - set(OBSERVABLE_NAMES)
        if unknown or not self.observables:
            raise InvalidParams(f"unknown or empty observables: {sorted(unknown)}")

    @property
    def grid(self) -> GridSpec:
        return self.eps1_grid if self.eps1_grid is not None else self.drive_grid

    @property
    def primary_form(self) -> Form:
        return Form.REDUCED if Form.REDUCED in self.forms else Form.GENERAL

    def working_points(self) -> list[tuple[float, float, WorkingPoint]]:
        """``(kappa, grid value, working point)`` in deterministic sweep order."""
        out = []
        for kappa in sorted(self.kappa_values):
            for x in self.grid.points():
                x = float(x)
                if self.eps1_grid is not None:
                    wp = working_point_from_eps1(kappa, self.lambda_c, x)
                else:
                    wp = solve_steady_state(SystemParams(kappa, self.lambda_c, x))
                out.append((kappa, x, wp))
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        if not isinstance(data, dict):
            raise InvalidParams("sweep config must be a JSON object")
        known = {"kappa_values", "lambda_c", "eps1_grid", "drive_grid", "guard", "forms", "observables"}
        extra = set(data) - known
        if extra:
            raise InvalidParams(f"unknown config fields: {sorted(extra)}")
        try:
            kw = {
                "kappa_values": tuple(float(k) for k in data["kappa_values"]),
                "lambda_c": float(data["lambda_c"]),
            }
            for key in ("eps1_grid", "drive_grid"):
                if data.get(key) is not None:
                    kw[key] = GridSpec(**data[key])
            if "guard" in data:
                kw["guard"] = float(data["guard"])
            if "forms" in data:
                kw["forms"] = frozenset(Form(f) for f in data["forms"])
            if "observables" in data:
                kw["observables"] = frozenset(data["observables"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParams):
                raise
            raise InvalidParams(f"malformed sweep config: {exc}") from exc
        return cls(**kw)

    @classmethod
    def from_json(cls, path) -> "SweepSpec":
        text = Path(path).read_text()
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidParams(f"config is not valid JSON: {exc}") from exc

    def to_dict(self) -> dict:
        out = {
            "kappa_values": list(self.kappa_values),
            "lambda_c": self.lambda_c,
            "guard": self.guard,
            "forms": sorted(f.value for f in self.forms),
            "observables": sorted(self.observables),
        }
        for key in ("eps1_grid", "drive_grid"):
            grid = getattr(self, key)
            if grid is not None:
                out[key] = asdict(grid)
        return out


@dataclass(frozen=True)
class SweepRow:
    kappa: float
    eps1: float
    duan_sum: float | None
    var_plus: float | None
    var_minus: float | None
    nbar: float | None
    delta_I: float | None
    fraction: float | None
    entangled: bool | None
    regime: str

    def cells(self) -> list[str]:
        return [fmt(getattr(self, name)) for name in SWEEP_HEADER]


@dataclass
class SweepResult:
    rows: list[SweepRow]
    skipped: list[dict] = field(default_factory=list)

    @property
    def grid_size(self) -> int:
        return len(self.rows) + len(self.skipped)


_SKIPPABLE = (SingularRegime, Unstable, FormMismatch)


def evaluate_point(wp: WorkingPoint, form: Form, wanted: Iterable[str], guard: float) -> SweepRow:
    """One sweep row; raises a guard-band error if any requested quantity is singular."""
    wanted = set(wanted)
    values = dict.fromkeys(OBSERVABLE_NAMES)
    if "duan_sum" in wanted:
        values["duan_sum"] = cf.duan_sum(wp, form, guard)
    if wanted & {"var_plus", "var_minus"}:
        vp, vm = cf.quadrature_variances(wp, form, guard)
        values["var_plus"] = vp if "var_plus" in wanted else None
        values["var_minus"] = vm if "var_minus" in wanted else None
    if "nbar" in wanted:
        values["nbar"] = cf.mean_photon_number(wp, form, guard)
    if "delta_I" in wanted:
        values["delta_I"] = cf.intensity_difference(wp, form, guard)
    if "fraction" in wanted:
        values["fraction"] = down_conversion_fraction(wp) if wp.params.epsilon_d > 0 else 0.0
    entangled = None if values["duan_sum"] is None else values["duan_sum"] < 2.0
    return SweepRow(kappa=wp.kappa, eps1=wp.eps1, entangled=entangled, regime=wp.regime.value, **values)


def _map(fn: Callable, items: list, workers: int | None):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate the primary closed form on every grid point.

    Points inside a guard band (or off the reduced form's domain) are
    skipped and listed in ``SweepResult.skipped`` so that rows plus skips
    always equal the grid size.
    """
    form = spec.primary_form

    def one(item):
        kappa, x, wp = item
        try:
            return evaluate_point(wp, form, spec.observables, spec.guard)
        except _SKIPPABLE as exc:
            return {"kappa": kappa, "value": x, "eps1": wp.eps1, "reason": type(exc).__name__, "detail": str(exc)}

    result = SweepResult(rows=[])
    for out in _map(one, spec.working_points(), workers):
        (result.rows if isinstance(out, SweepRow) else result.skipped).append(out)
    if not result.rows:
        raise AllPointsSingular(f"all {len(result.skipped)} grid points fall inside guard bands")
    return result


def write_sweep_csv(rows: Iterable[SweepRow], out) -> None:
    """Write rows with the fixed sweep header to a path or text stream."""
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(row.cells())


def sweep_csv_text(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


def _figure_value(quantity: str, wp: WorkingPoint, form, guard: float):
    try:
        if form == "oracle":
            obs = oracle.observables_from_moments(wp, oracle.steady_moments(wp))
        else:
            obs = None
        if quantity == "duan_sum":
            return obs.duan_sum if obs else cf.duan_sum(wp, form, guard)
        if quantity == "var_minus":
            return obs.var_minus if obs else cf.quadrature_variances(wp, form, guard)[1]
        if quantity == "nbar":
            return obs.mean_photon if obs else cf.mean_photon_number(wp, form, guard)
        return obs.intensity_diff if obs else cf.intensity_difference(wp, form, guard)
    except DPOError:
        return None


@dataclass
class FigureTable:
    number: int
    quantity: str
    kappas: tuple[float, ...]
    lambda_c: float
    header: tuple[str, ...]
    rows: list[tuple]

    def metadata(self) -> list[str]:
        return [
            f"figure {self.number}: {FIGURE_TITLE[self.number]}",
            f"kappa values {list(self.kappas)} (default set, not a fitted choice)",
            f"lambda_c = {self.lambda_c}",
            f"points with eps1 <= {POLE_RATIO} kappa are excluded",
            "columns: reduced closed form, general closed form, moment-equation oracle",
        ]


def figure_table(
    n: int,
    kappas: Iterable[float] = DEFAULT_FIGURE_KAPPAS,
    lambda_c: float = DEFAULT_FIGURE_LAMBDA,
    eps1_max: float = 2.0,
    count: int = 400,
    guard: float = cf.DEFAULT_GUARD,
) -> FigureTable:
    """Curves of one figure quantity vs ``eps1`` for each ``kappa``.

    Each ``kappa`` gets ``count`` points spread evenly over
    ``(kappa/4, eps1_max]``; the reduced expressions diverge at ``kappa/4``.
    """
    if n not in FIGURE_QUANTITY:
        raise InvalidParams(f"figure number must be 1-4, got {n!r}")
    kappas = tuple(sorted(float(k) for k in kappas))
    if count < 2:
        raise InvalidParams("count must be >= 2")
    quantity = FIGURE_QUANTITY[n]
    rows = []
    for kappa in kappas:
        SystemParams(kappa, lambda_c)
        lo = POLE_RATIO * kappa
        if eps1_max <= lo:
            raise InvalidParams(f"eps1_max={eps1_max} must exceed kappa/4={lo}")
        step = (eps1_max - lo) / count
        for i in range(1, count + 1):
            eps1 = lo + i * step
            wp = working_point_from_eps1(kappa, lambda_c, eps1)
            rows.append(
                (
                    kappa,
                    eps1,
                    _figure_value(quantity, wp, Form.REDUCED, guard),
                    _figure_value(quantity, wp, Form.GENERAL, guard),
                    _figure_value(quantity, wp, "oracle", guard),
                )
            )
    header = ("kappa", "eps1", f"{quantity}_reduced", f"{quantity}_general", f"{quantity}_oracle")
    return FigureTable(n, quantity, kappas, lambda_c, header, rows)


def reproduce_figure(n: int, out_path, **kwargs) -> FigureTable:
    """Write the table for figure ``n`` as CSV, with ``#`` metadata lines first."""
    table = figure_table(n, **kwargs)
    with open(out_path, "w", newline="") as fh:
        for line in table.metadata():
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([fmt(v) for v in row])
    return table
