"""Time-varying density fields over the plane.

A density is a positive floor plus a mixture of anisotropic Gaussians whose
centers move along closed-form or waypoint paths. Every path is smooth in
time, so the exact time derivative of the density is available analytically,
which the time-varying controllers require.

Builtins: `phi1` and `phi2` follow the printed definitions with time
constant tau = 5. `phi3`, `phi4`, `phi5` are documented stand-ins (the
original report never defines them): `phi3` is a pair of counter-rotating
Gaussians, `phi4` a tight, fast-circling Gaussian that leaves near-empty
regions behind it (stresses inverse conditioning), `phi5` a sinusoidally
translating anisotropic Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioError, UnknownDensity

TAU = 5.0
DEFAULT_FLOOR = 1e-6


@dataclass(frozen=True)
class FixedPath:
    point: tuple

    def position(self, t: float) -> np.ndarray:
        return np.asarray(self.point, dtype=float)

    def velocity(self, t: float) -> np.ndarray:
        return np.zeros(2)

    def to_dict(self) -> dict:
        return {"type": "fixed", "point": list(map(float, self.point))}


@dataclass(frozen=True)
class CircularPath:
    center: tuple
    radius: float
    angular_rate: float
    phase: float = 0.0

    def position(self, t: float) -> np.ndarray:
        a = self.angular_rate * t + self.phase
        return np.asarray(self.center, dtype=float) + self.radius * np.array(
            [math.cos(a), math.sin(a)]
        )

    def velocity(self, t: float) -> np.ndarray:
        a = self.angular_rate * t + self.phase
        return self.radius * self.angular_rate * np.array([-math.sin(a), math.cos(a)])

    def to_dict(self) -> dict:
        return {
            "type": "circular",
            "center": list(map(float, self.center)),
            "radius": float(self.radius),
            "angular_rate": float(self.angular_rate),
            "phase": float(self.phase),
        }


@dataclass(frozen=True)
class SinusoidalPath:
    """Independent sinusoid per axis: center + amplitude * sin(rate * t + phase)."""

    center: tuple
    amplitude: tuple
    angular_rate: tuple
    phase: tuple = (0.0, 0.0)

    def position(self, t: float) -> np.ndarray:
        c = np.asarray(self.center, dtype=float)
        amp = np.asarray(self.amplitude, dtype=float)
        rate = np.asarray(self.angular_rate, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        return c + amp * np.sin(rate * t + ph)

    def velocity(self, t: float) -> np.ndarray:
        amp = np.asarray(self.amplitude, dtype=float)
        rate = np.asarray(self.angular_rate, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        return amp * rate * np.cos(rate * t + ph)

    def to_dict(self) -> dict:
        return {
            "type": "sinusoidal",
            "center": list(map(float, self.center)),
            "amplitude": list(map(float, self.amplitude)),
            "angular_rate": list(map(float, self.angular_rate)),
            "phase": list(map(float, self.phase)),
        }


@dataclass(frozen=True)
class WaypointPath:
    """Piecewise cubic Hermite interpolation of (time, point, velocity) knots.

    C1 in time on [times[0], times[-1]]; holds the end points outside that
    range (end velocities should be zero for a smooth hold).
    """

    times: tuple
    points: tuple
    velocities: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) < 2 or np.any(np.diff(t) <= 0):
            raise ScenarioError("waypoint times must be strictly increasing, >= 2 knots",
                                key="path.times")

    def _arrays(self):
        return (
            np.asarray(self.times, dtype=float),
            np.asarray(self.points, dtype=float),
            np.asarray(self.velocities, dtype=float),
        )

    def _segment(self, t: float):
        times, pts, vels = self._arrays()
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = max(0, min(k, len(times) - 2))
        dt = times[k + 1] - times[k]
        s = (t - times[k]) / dt
        return pts[k], pts[k + 1], vels[k], vels[k + 1], dt, s

    def position(self, t: float) -> np.ndarray:
        times, pts, vels = self._arrays()
        if t <= times[0]:
            return pts[0].copy()
        if t >= times[-1]:
            return pts[-1].copy()
        p0, p1, v0, v1, dt, s = self._segment(t)
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * p0 + h10 * dt * v0 + h01 * p1 + h11 * dt * v1

    def velocity(self, t: float) -> np.ndarray:
        times, pts, vels = self._arrays()
        if t <= times[0] or t >= times[-1]:
            return np.zeros(2)
        p0, p1, v0, v1, dt, s = self._segment(t)
        d00 = 6 * s**2 - 6 * s
        d10 = 3 * s**2 - 4 * s + 1
        d01 = -6 * s**2 + 6 * s
        d11 = 3 * s**2 - 2 * s
        return (d00 * p0 + d01 * p1) / dt + d10 * v0 + d11 * v1

    def to_dict(self) -> dict:
        return {
            "type": "waypoints",
            "times": [float(x) for x in self.times],
            "points": [[float(a), float(b)] for a, b in self.points],
            "velocities": [[float(a), float(b)] for a, b in self.velocities],
        }


_PATH_TYPES = {
    "fixed": FixedPath,
    "circular": CircularPath,
    "sinusoidal": SinusoidalPath,
    "waypoints": WaypointPath,
}


def path_from_dict(spec: dict):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ScenarioError("path spec must be an object with a 'type' key", key="path")
    kind = spec["type"]
    if kind not in _PATH_TYPES:
        raise ScenarioError(f"unknown path type {kind!r}", key="path.type")
    kwargs = {k: v for k, v in spec.items() if k != "type"}
    allowed = set(_PATH_TYPES[kind].__dataclass_fields__)
    for k in kwargs:
        if k not in allowed:
            raise ScenarioError(f"unknown path key {k!r} for type {kind!r}", key=f"path.{k}")
    try:
        if kind == "fixed":
            return FixedPath(point=tuple(kwargs["point"]))
        if kind == "circular":
            return CircularPath(
                center=tuple(kwargs["center"]),
                radius=float(kwargs["radius"]),
                angular_rate=float(kwargs["angular_rate"]),
                phase=float(kwargs.get("phase", 0.0)),
            )
        if kind == "sinusoidal":
            return SinusoidalPath(
                center=tuple(kwargs["center"]),
                amplitude=tuple(kwargs["amplitude"]),
                angular_rate=tuple(kwargs["angular_rate"]),
                phase=tuple(kwargs.get("phase", (0.0, 0.0))),
            )
        return WaypointPath(
            times=tuple(kwargs["times"]),
            points=tuple(tuple(p) for p in kwargs["points"]),
            velocities=tuple(tuple(v) for v in kwargs["velocities"]),
        )
    except KeyError as exc:
        raise ScenarioError(f"path spec missing key {exc.args[0]!r}", key="path") from exc


@dataclass(frozen=True)
class GaussianComponent:
    """weight * exp(-(s_x (q_x - c_x(t))^2 + s_y (q_y - c_y(t))^2))."""

    weight: float
    path: object
    inverse_scales: tuple = (1.0, 1.0)

    def __post_init__(self):
        if self.weight <= 0:
            raise ScenarioError("component weight must be positive", key="weight")
        sx, sy = self.inverse_scales
        if sx <= 0 or sy <= 0:
            raise ScenarioError("inverse scales must be positive", key="scales")

    def to_dict(self) -> dict:
        return {
            "weight": float(self.weight),
            "scales": [float(s) for s in self.inverse_scales],
            "path": self.path.to_dict(),
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "GaussianComponent":
        allowed = {"weight", "scales", "path"}
        for k in spec:
            if k not in allowed:
                raise ScenarioError(f"unknown component key {k!r}", key=k)
        try:
            return cls(
                weight=float(spec["weight"]),
                path=path_from_dict(spec["path"]),
                inverse_scales=tuple(spec.get("scales", (1.0, 1.0))),
            )
        except KeyError as exc:
            raise ScenarioError(f"component missing key {exc.args[0]!r}", key="components") from exc


@dataclass(frozen=True)
class DensityField:
    """phi(q, t) = floor + sum of Gaussian components. Immutable; edits build a new field."""

    components: tuple = ()
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.floor < 0:
            raise ScenarioError("density floor must be nonnegative", key="floor")

    def _terms(self, q: np.ndarray, t: float):
        """Per-component Gaussian values at the query points, plus cached geometry."""
        q = np.atleast_2d(np.asarray(q, dtype=float))
        out = []
        for comp in self.components:
            c = comp.path.position(t)
            sx, sy = comp.inverse_scales
            dx = q[:, 0] - c[0]
            dy = q[:, 1] - c[1]
            g = comp.weight * np.exp(-(sx * dx * dx + sy * dy * dy))
            out.append((comp, g, dx, dy))
        return q, out

    def values(self, q, t: float) -> np.ndarray:
        """phi at an (N, 2) batch of points."""
        q, terms = self._terms(q, t)
        acc = np.full(len(q), self.floor)
        for _, g, _, _ in terms:
            acc += g
        return acc

    def values_and_dt(self, q, t: float):
        """(phi, dphi/dt) sharing one exponential evaluation per component."""
        q, terms = self._terms(q, t)
        vals = np.full(len(q), self.floor)
        dvals = np.zeros(len(q))
        for comp, g, dx, dy in terms:
            vals += g
            cdot = comp.path.velocity(t)
            sx, sy = comp.inverse_scales
            dvals += g * 2.0 * (sx * dx * cdot[0] + sy * dy * cdot[1])
        return vals, dvals

    def dt_values(self, q, t: float) -> np.ndarray:
        return self.values_and_dt(q, t)[1]

    def gradient(self, q, t: float) -> np.ndarray:
        """Spatial gradient d(phi)/dq, shape (N, 2)."""
        q, terms = self._terms(q, t)
        grad = np.zeros((len(q), 2))
        for comp, g, dx, dy in terms:
            sx, sy = comp.inverse_scales
            grad[:, 0] += g * (-2.0 * sx * dx)
            grad[:, 1] += g * (-2.0 * sy * dy)
        return grad

    def eval(self, q, t: float) -> float:
        return float(self.values(np.asarray(q, dtype=float).reshape(1, 2), t)[0])

    def eval_dt(self, q, t: float) -> float:
        return float(self.values_and_dt(np.asarray(q, dtype=float).reshape(1, 2), t)[1][0])

    def to_dict(self) -> dict:
        return {"floor": float(self.floor),
                "components": [c.to_dict() for c in self.components]}

    @classmethod
    def from_dict(cls, spec: dict) -> "DensityField":
        allowed = {"floor", "components"}
        for k in spec:
            if k not in allowed:
                raise ScenarioError(f"unknown density key {k!r}", key=k)
        comps = tuple(GaussianComponent.from_dict(c) for c in spec.get("components", []))
        return cls(components=comps, floor=float(spec.get("floor", DEFAULT_FLOOR)))

    def descriptor(self, t: float) -> dict:
        """Render-ready snapshot: current centers and velocities let stateless
        clients draw without path knowledge; the full path spec rides along."""
        comps = []
        for c in self.components:
            comps.append({
                "weight": float(c.weight),
                "scales": [float(s) for s in c.inverse_scales],
                "center": [float(x) for x in c.path.position(t)],
                "velocity": [float(x) for x in c.path.velocity(t)],
                "path": c.path.to_dict(),
            })
        return {"floor": float(self.floor), "components": comps}


def retarget_component(comp: GaussianComponent, t_now: float, target,
                       travel_time: float = 1.0) -> GaussianComponent:
    """New component whose center glides C1-smoothly from its current state to `target`.

    Position and velocity at t_now match the old path, so swapping fields at
    a step boundary keeps the density continuously differentiable in time.
    """
    p0 = comp.path.position(t_now)
    v0 = comp.path.velocity(t_now)
    path = WaypointPath(
        times=(t_now, t_now + max(travel_time, 1e-3)),
        points=(tuple(p0), tuple(np.asarray(target, dtype=float))),
        velocities=(tuple(v0), (0.0, 0.0)),
    )
    return GaussianComponent(weight=comp.weight, path=path,
                             inverse_scales=comp.inverse_scales)


def builtin(name: str) -> DensityField:
    """Named density fields. phi1/phi2 as printed (tau = 5); phi3-phi5 are stand-ins."""
    rate = 1.0 / TAU
    if name == "phi1":
        comps = (GaussianComponent(
            weight=1.0,
            path=SinusoidalPath(center=(0.0, 0.0), amplitude=(2.0, 0.0),
                                angular_rate=(rate, 0.0)),
            inverse_scales=(1.0, 1.0 / 16.0),
        ),)
    elif name == "phi2":
        comps = (GaussianComponent(
            weight=1.0,
            path=CircularPath(center=(0.0, 0.0), radius=2.0, angular_rate=rate),
            inverse_scales=(1.0, 1.0),
        ),)
    elif name == "phi3":
        # Stand-in: two unit Gaussians counter-rotating on the radius-2 circle.
        comps = (
            GaussianComponent(
                weight=1.0,
                path=CircularPath(center=(0.0, 0.0), radius=2.0, angular_rate=rate),
                inverse_scales=(1.0, 1.0),
            ),
            GaussianComponent(
                weight=1.0,
                path=CircularPath(center=(0.0, 0.0), radius=2.0,
                                  angular_rate=-rate, phase=math.pi),
                inverse_scales=(1.0, 1.0),
            ),
        )
    elif name == "phi4":
        # Stand-in: tight Gaussian circling at double rate; regions it leaves
        # drop to the floor, driving cells toward near-zero mass.
        comps = (GaussianComponent(
            weight=1.0,
            path=CircularPath(center=(0.0, 0.0), radius=2.0, angular_rate=2.0 * rate),
            inverse_scales=(4.0, 4.0),
        ),)
    elif name == "phi5":
        # Stand-in: anisotropic Gaussian translating sinusoidally along x.
        comps = (GaussianComponent(
            weight=1.0,
            path=SinusoidalPath(center=(0.0, 0.0), amplitude=(2.0, 0.0),
                                angular_rate=(rate, 0.0)),
            inverse_scales=(0.5, 3.0),
        ),)
    else:
        raise UnknownDensity(name)
    return DensityField(components=comps)


BUILTIN_NAMES = ("phi1", "phi2", "phi3", "phi4", "phi5")


def resolve(spec) -> DensityField:
    """Accepts a builtin name, a density dict, or an already-built field."""
    if isinstance(spec, DensityField):
        return spec
    if isinstance(spec, str):
        return builtin(spec)
    if isinstance(spec, dict):
        return DensityField.from_dict(spec)
    raise ScenarioError(f"cannot interpret density spec of type {type(spec).__name__}",
                        key="density")
