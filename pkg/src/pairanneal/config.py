"""JSON scenario files and two-axis sweep specifications.

Scenario document layout::

    {
      "instance": {"h": [1.0, 0.25], "J": [[1, 2, 0.125]]},
      "schedule": {"form": "linear-standard", "a": 10.0},
      "driver":   {"kind": "ancilla", "c": -0.5},
      "bath":     {"beta": 0.637, "eta": 0.2, "omega_c": 25.13, "gz": 0.1, "gx": 0.0},
      "run":      {"dt": 0.01, "gap_tol": 1e-8, "snapshots": 201, "T": 1000.0}
    }

Every key is optional; missing ones take the defaults of the reference
scenario.  Per-site couplings may be given as lists instead of scalars.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bath import BathConfig
from .errors import ConfigError
from .model import Ancilla, AnnealSchedule, Conventional, Driver, ProblemInstance, reference_instance
from .operators import DEFAULT_GAP_TOL
from .propagation import DEFAULT_DT, DEFAULT_SNAPSHOTS

SWEEP_DT = 0.02
AXIS_NAMES = ("c", "gz", "gx", "theta", "g")


@dataclass(frozen=True)
class Scenario:
    instance: ProblemInstance = dataclasses.field(default_factory=reference_instance)
    schedule: AnnealSchedule = AnnealSchedule()
    driver: Driver = Ancilla()
    bath: BathConfig = BathConfig()
    dt: float = DEFAULT_DT
    gap_tol: float = DEFAULT_GAP_TOL
    snapshots: int = DEFAULT_SNAPSHOTS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"run.dt must be positive, got {self.dt!r}")
        if not (math.isfinite(self.gap_tol) and self.gap_tol > 0):
            raise ConfigError(f"run.gap_tol must be positive, got {self.gap_tol!r}")
        if int(self.snapshots) != self.snapshots or self.snapshots < 2:
            raise ConfigError("run.snapshots must be an integer >= 2")

    def replace(self, **changes) -> Scenario:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        driver = {"kind": self.driver.kind}
        if isinstance(self.driver, Ancilla):
            driver["c"] = self.driver.c
        return {
            "instance": {"h": list(self.instance.h),
                         "J": [[i, j, v] for (i, j), v in self.instance.J.items()]},
            "schedule": {"form": self.schedule.form, "a": self.schedule.a},
            "driver": driver,
            "bath": {"beta": self.bath.beta, "eta": self.bath.eta, "omega_c": self.bath.omega_c,
                     "gz": _plain(self.bath.gz), "gx": _plain(self.bath.gx)},
            "run": {"dt": self.dt, "gap_tol": self.gap_tol, "snapshots": self.snapshots,
                    "T": self.schedule.T},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> Scenario:
        if not isinstance(doc, dict):
            raise ConfigError("scenario document must be a JSON object")
        unknown = set(doc) - {"instance", "schedule", "driver", "bath", "run"}
        if unknown:
            raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
        base = cls()
        try:
            inst_doc = doc.get("instance", {})
            instance = base.instance
            if inst_doc:
                couplings = {}
                for entry in inst_doc.get("J", []):
                    i, j, v = entry
                    couplings[(int(i), int(j))] = float(v)
                instance = ProblemInstance(h=tuple(inst_doc["h"]), J=couplings)
            sch = doc.get("schedule", {})
            run = doc.get("run", {})
            schedule = AnnealSchedule(a=float(sch.get("a", base.schedule.a)),
                                      T=float(run.get("T", base.schedule.T)),
                                      form=sch.get("form", base.schedule.form))
            drv = doc.get("driver", {})
            kind = drv.get("kind", "ancilla")
            if kind == "ancilla":
                driver: Driver = Ancilla(float(drv.get("c", -0.5)))
            elif kind == "conventional":
                driver = Conventional()
            else:
                raise ConfigError(f"unknown driver kind {kind!r}")
            b = doc.get("bath", {})
            bath = BathConfig(beta=float(b.get("beta", base.bath.beta)),
                              eta=float(b.get("eta", base.bath.eta)),
                              omega_c=float(b.get("omega_c", base.bath.omega_c)),
                              gz=_coupling(b.get("gz", 0.0)), gx=_coupling(b.get("gx", 0.0)))
            return cls(instance, schedule, driver, bath,
                       dt=float(run.get("dt", DEFAULT_DT)),
                       gap_tol=float(run.get("gap_tol", DEFAULT_GAP_TOL)),
                       snapshots=int(run.get("snapshots", DEFAULT_SNAPSHOTS)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed scenario: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> Scenario:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        return cls.from_json(text)


def _plain(g):
    return list(g) if isinstance(g, tuple) else g


def _coupling(g):
    return tuple(float(x) for x in g) if isinstance(g, list) else float(g)


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    num: int

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown sweep axis {self.name!r}; choose from {AXIS_NAMES}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError(f"axis {self.name} range must be finite")
        if self.num < 1:
            raise ConfigError(f"axis {self.name} needs at least one point")
        lo, hi = min(self.start, self.stop), max(self.start, self.stop)
        if self.name == "theta" and (lo < 0 or hi > math.pi / 2 + 1e-12):
            raise ConfigError("theta must lie in [0, pi/2]")
        if self.name in ("g", "gz", "gx") and lo < 0:
            raise ConfigError(f"{self.name} must be non-negative")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class SweepSpec:
    """Two named axes plus fixed values for any other sweep parameter.

    Polar noise (g, theta) maps to gx = g sin(theta), gz = g cos(theta).
    Parameters neither swept nor fixed come from the template scenario.
    """

    axis1: Axis
    axis2: Axis
    fixed: dict[str, float] = dataclasses.field(default_factory=dict)
    dt: float = SWEEP_DT

    def __post_init__(self) -> None:
        if self.axis1.name == self.axis2.name:
            raise ConfigError("sweep axes must differ")
        fixed = {str(k): float(v) for k, v in self.fixed.items()}
        object.__setattr__(self, "fixed", fixed)
        unknown = set(fixed) - set(AXIS_NAMES)
        if unknown:
            raise ConfigError(f"unknown fixed parameters {sorted(unknown)}")
        names = {self.axis1.name, self.axis2.name} | set(fixed)
        if names & {"g", "theta"} and names & {"gz", "gx"}:
            raise ConfigError("cannot mix polar (g, theta) and Cartesian (gz, gx) noise parameters")
        if fixed.get("g", 0.0) < 0 or fixed.get("gz", 0.0) < 0 or fixed.get("gx", 0.0) < 0:
            raise ConfigError("noise strengths must be non-negative")
        if not 0 <= fixed.get("theta", 0.0) <= math.pi / 2:
            raise ConfigError("theta must lie in [0, pi/2]")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("sweep dt must be positive")

    def points(self) -> list[tuple[float, float]]:
        return [(float(u), float(v)) for u in self.axis1.values() for v in self.axis2.values()]

    def assign(self, template: Scenario, u: float, v: float) -> dict[str, float]:
        """Resolved (c, gz, gx) for one grid point."""
        values = {**self.fixed, self.axis1.name: u, self.axis2.name: v}
        c = values.get("c", template.driver.c if isinstance(template.driver, Ancilla) else -0.5)
        gz0, gx0 = _uniform(template.bath.gz), _uniform(template.bath.gx)
        if "g" in values or "theta" in values:
            g = values.get("g", math.hypot(gz0, gx0))
            theta = values.get("theta", math.atan2(gx0, gz0))
            gz, gx = g * math.cos(theta), g * math.sin(theta)
            gz = 0.0 if abs(gz) < 1e-15 * max(g, 1.0) else gz
        else:
            gz, gx = values.get("gz", gz0), values.get("gx", gx0)
        return {"c": float(c), "gz": float(gz), "gx": float(gx)}

    def scenarios(self, template: Scenario, u: float, v: float) -> tuple[Scenario, Scenario]:
        """(ancilla, conventional) scenarios for one grid point."""
        p = self.assign(template, u, v)
        bath = dataclasses.replace(template.bath, gz=p["gz"], gx=p["gx"])
        anc = template.replace(driver=Ancilla(p["c"]), bath=bath, dt=self.dt)
        return anc, anc.replace(driver=Conventional())

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> SweepSpec:
        try:
            return cls(Axis(**doc["axis1"]), Axis(**doc["axis2"]), fixed=doc.get("fixed", {}),
                       dt=float(doc.get("dt", SWEEP_DT)))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed sweep spec: {exc}") from exc


def _uniform(g) -> float:
    if isinstance(g, tuple):
        if len(set(g)) > 1:
            raise ConfigError("sweeps need uniform couplings")
        return g[0] if g else 0.0
    return g


def preset(name: str) -> SweepSpec:
    """Default grids for the three sweep figures (artifact choices, not published ranges)."""
    c_axis = Axis("c", -2.0, -0.1, 20)
    if name == "fig2":
        return SweepSpec(c_axis, Axis("gz", 0.0, 0.2, 11))
    if name == "fig3":
        return SweepSpec(c_axis, Axis("theta", 0.0, math.pi / 2, 11), fixed={"g": 0.1})
    if name == "fig4":
        return SweepSpec(c_axis, Axis("gx", 0.0, 0.1, 11), fixed={"gz": 0.1})
    raise ConfigError(f"unknown preset {name!r}; choose fig2, fig3 or fig4")

