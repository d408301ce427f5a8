"""Closed-loop simulation: scenario description, RK4 integration of the
velocity laws, cost/diagnostic logging, CVT initialization, and the unicycle
command mapping.

Default scenario parameters (domain [-4, 4]^2, n = 6, kappa = 1, dt = 0.005,
t_final = 50) are this toolkit's choices; they are not dictated by the
underlying problem and every one is overridable. The default domain leaves
a 2 m margin around the radius-2 paths of the builtin densities, and the
default robot count keeps the tracked tessellation clear of fold points:
tighter boxes (or exactly five robots on this domain) push the moving CVT
through configurations where I - dc/dp turns singular and exact tracking
genuinely breaks down for stretches of the run.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import density as density_mod
from .controllers import (
    ControlState,
    VelocityCommand,
    controller_needs_jacobian,
    make_controller,
)
from .density import DensityField, FixedPath, GaussianComponent
from .errors import ScenarioError
from .geometry import Domain, Tessellation, project_into_polygon, tessellate
from .jacobian import assemble, spectral_radius
from .moments import (
    DEFAULT_QUADRATURE,
    MomentSet,
    QuadratureConfig,
    moments,
    moments_and_cost,
    polygon_quadrature,
)

DOMAIN_MARGIN = 1e-6
CONTROLLER_NAMES = ("lloyd", "cortes", "tvd_c", "tvd_dk")
SCHEMA_VERSION = 1


def locational_cost(tess: Tessellation, fld: DensityField, t: float,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """H(p, t): sum over cells of the phi-weighted squared distance to the robot."""
    total = 0.0
    for i in range(tess.n):
        pts, wts = polygon_quadrature(tess.cells[i], cfg)
        phi = fld.values(pts, t)
        d = pts - tess.positions[i]
        total += float((wts * phi) @ (d[:, 0] ** 2 + d[:, 1] ** 2))
    return total


def cost_gradient(tess: Tessellation, mset: MomentSet) -> np.ndarray:
    """dH/dp_i = 2 m_i (p_i - c_i); the boundary terms cancel by the Leibniz rule."""
    return 2.0 * mset.masses[:, None] * (tess.positions - mset.centroids)


def unicycle_map(pdot, theta: float):
    """Planar velocity -> (forward speed, turn rate) for a differential-drive robot."""
    pdot = np.asarray(pdot, dtype=float)
    v = float(np.linalg.norm(pdot))
    if v < 1e-9:
        return 0.0, 0.0
    omega = float((-math.sin(theta) * pdot[0] + math.cos(theta) * pdot[1]) / v)
    return v, omega


def freeze_field(fld: DensityField, t0: float) -> DensityField:
    """Static snapshot of the density at t0 (all component centers pinned)."""
    comps = tuple(
        GaussianComponent(weight=c.weight,
                          path=FixedPath(point=tuple(c.path.position(t0))),
                          inverse_scales=c.inverse_scales)
        for c in fld.components
    )
    return DensityField(components=comps, floor=fld.floor)


@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulation run. All distances in meters,
    times in seconds, speeds in m/s."""

    density: object = "phi2"
    domain: object = None               # vertex list; None -> [-4, 4]^2 box
    n: int = 6
    initial_positions: object = None
    seed: int = 0
    controller: str = "tvd_dk"
    hops: int = 1
    kappa: float = 1.0
    dt: float = 0.005
    t_final: float = 50.0
    v_max: float = 5.0
    init_cvt: bool = True
    init_cvt_tol: float = 1e-6
    init_cvt_budget: int = 100_000
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if self.dt <= 0:
            raise ScenarioError(f"dt must be positive (got {self.dt!r})", key="dt")
        if self.t_final < 0:
            raise ScenarioError(f"t_final must be >= 0 (got {self.t_final!r})", key="t_final")
        if self.n < 1:
            raise ScenarioError(f"n must be >= 1 (got {self.n!r})", key="n")
        if self.controller not in CONTROLLER_NAMES:
            raise ScenarioError(f"controller must be one of {CONTROLLER_NAMES}",
                                key="controller")
        if self.hops < 0:
            raise ScenarioError(f"hops must be >= 0 (got {self.hops!r})", key="hops")
        if self.kappa <= 0:
            raise ScenarioError(f"kappa must be positive (got {self.kappa!r})", key="kappa")
        if self.v_max <= 0:
            raise ScenarioError(f"v_max must be positive (got {self.v_max!r})", key="v_max")
        if self.init_cvt_tol <= 0:
            raise ScenarioError("init_cvt_tol must be positive", key="init_cvt_tol")
        if self.initial_positions is not None and len(self.initial_positions) != self.n:
            raise ScenarioError(
                f"initial_positions has {len(self.initial_positions)} entries for n={self.n}",
                key="initial_positions")

    def resolved_domain(self) -> Domain:
        if self.domain is None:
            return Domain.box(-4.0, 4.0, -4.0, 4.0)
        if isinstance(self.domain, Domain):
            return self.domain
        return Domain(np.asarray(self.domain, dtype=float))

    def resolved_density(self) -> DensityField:
        return density_mod.resolve(self.density)

    def controller_label(self) -> str:
        return f"tvd_d{self.hops}" if self.controller == "tvd_dk" else self.controller

    def to_dict(self) -> dict:
        dens = self.density
        if isinstance(dens, DensityField):
            dens = dens.to_dict()
        return {
            "version": SCHEMA_VERSION,
            "density": dens,
            "domain": None if self.domain is None
            else [[float(a), float(b)] for a, b in np.asarray(self.domain, dtype=float)],
            "n": self.n,
            "initial_positions": None if self.initial_positions is None
            else [[float(a), float(b)] for a, b in np.asarray(self.initial_positions)],
            "seed": self.seed,
            "controller": self.controller,
            "hops": self.hops,
            "kappa": self.kappa,
            "dt": self.dt,
            "t_final": self.t_final,
            "v_max": self.v_max,
            "init_cvt": self.init_cvt,
            "init_cvt_tol": self.init_cvt_tol,
            "init_cvt_budget": self.init_cvt_budget,
            "quadrature": {
                "triangle_rule_degree": self.quadrature.triangle_rule_degree,
                "segment_nodes": self.quadrature.segment_nodes,
                "subdivision_depth": self.quadrature.subdivision_depth,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object", key=None)
        known = {
            "version", "density", "domain", "n", "initial_positions", "seed",
            "controller", "hops", "kappa", "dt", "t_final", "v_max",
            "init_cvt", "init_cvt_tol", "init_cvt_budget", "quadrature",
        }
        for k in data:
            if k not in known:
                raise ScenarioError(f"unknown scenario key {k!r}", key=k)
        version = data.get("version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema version {version!r}", key="version")
        quad = data.get("quadrature", {})
        if not isinstance(quad, dict):
            raise ScenarioError("quadrature must be an object", key="quadrature")
        for k in quad:
            if k not in ("triangle_rule_degree", "segment_nodes", "subdivision_depth"):
                raise ScenarioError(f"unknown quadrature key {k!r}", key=f"quadrature.{k}")
        try:
            qcfg = QuadratureConfig(
                triangle_rule_degree=int(quad.get("triangle_rule_degree", 6)),
                segment_nodes=int(quad.get("segment_nodes", 8)),
                subdivision_depth=int(quad.get("subdivision_depth", 2)),
            )
        except ValueError as exc:
            raise ScenarioError(str(exc), key="quadrature") from exc
        n = data.get("n")
        init = data.get("initial_positions")
        if n is None:
            n = len(init) if init is not None else 6
        kwargs = dict(
            density=data.get("density", "phi2"),
            domain=data.get("domain"),
            n=int(n),
            initial_positions=init,
            seed=int(data.get("seed", 0)),
            controller=data.get("controller", "tvd_dk"),
            hops=int(data.get("hops", 1)),
            kappa=float(data.get("kappa", 1.0)),
            dt=float(data.get("dt", 0.005)),
            t_final=float(data.get("t_final", 50.0)),
            v_max=float(data.get("v_max", 5.0)),
            init_cvt=bool(data.get("init_cvt", True)),
            init_cvt_tol=float(data.get("init_cvt_tol", 1e-6)),
            init_cvt_budget=int(data.get("init_cvt_budget", 100_000)),
            quadrature=qcfg,
        )
        scenario = cls(**kwargs)
        # Fail fast on unresolvable density/domain so the CLI can report the key.
        scenario.resolved_density()
        try:
            scenario.resolved_domain()
        except Exception as exc:
            raise ScenarioError(f"invalid domain: {exc}", key="domain") from exc
        return scenario


@dataclass(frozen=True)
class SimTrace:
    """Time-indexed log of one run; one sample per integrator step plus the endpoint."""

    times: np.ndarray
    positions: np.ndarray           # (samples, n, 2)
    cost: np.ndarray                # H(p, t)
    tracking_error: np.ndarray      # max_i |p_i - c_i|
    lambda_max: np.ndarray          # nan where no Jacobian was assembled
    condition_flags: np.ndarray     # bool
    clamp_events: tuple             # (time, robot) pairs
    controller: str
    total_cost: float               # trapezoidal integral of H over the run

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    def peak_tracking_error(self) -> float:
        return float(np.max(self.tracking_error))

    def summary(self) -> dict:
        lam = self.lambda_max[np.isfinite(self.lambda_max)]
        return {
            "controller": self.controller,
            "samples": int(len(self.times)),
            "t_final": float(self.times[-1]),
            "total_cost": self.total_cost,
            "peak_tracking_error": self.peak_tracking_error(),
            "final_tracking_error": float(self.tracking_error[-1]),
            "lambda_max_peak": float(lam.max()) if len(lam) else None,
            "lambda_max_fraction_below_1": float(np.mean(lam < 1.0)) if len(lam) else None,
            "condition_flag_count": int(np.sum(self.condition_flags)),
            "clamp_event_count": len(self.clamp_events),
        }

    def to_csv(self) -> str:
        n = self.n
        cols = ["t"]
        for i in range(n):
            cols += [f"p_{i + 1}x", f"p_{i + 1}y"]
        cols += ["H", "max_tracking_error", "lambda_max", "condition_flag"]
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for s in range(len(self.times)):
            row = [f"{self.times[s]:.12g}"]
            row += [f"{v:.17g}" for v in self.positions[s].reshape(-1)]
            row.append(f"{self.cost[s]:.17g}")
            row.append(f"{self.tracking_error[s]:.17g}")
            row.append(f"{self.lambda_max[s]:.17g}")
            row.append(str(int(self.condition_flags[s])))
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


@dataclass
class PipelineResult:
    """One full evaluation of tessellate -> moments -> jacobian -> controller."""

    tessellation: Tessellation
    moments: MomentSet
    jacobian: object
    command: VelocityCommand
    cost: float


class SimContext:
    """Compiled scenario: everything `step`/`run` need, built once."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.domain = scenario.resolved_domain()
        self.field = scenario.resolved_density()
        self.cfg = scenario.quadrature
        self.controller = make_controller(scenario.controller, scenario.hops)
        self.needs_jacobian = controller_needs_jacobian(scenario.controller)
        self.inset = self.domain.inset(DOMAIN_MARGIN)

    def clamp(self, positions: np.ndarray):
        """Project positions into the margin-inset domain; report who moved."""
        sd = self.domain.signed_distances(positions)
        if not np.any(sd > -DOMAIN_MARGIN / 2):
            return positions, []
        out = positions.copy()
        moved = []
        for i in np.nonzero(sd > -DOMAIN_MARGIN / 2)[0]:
            proj = project_into_polygon(self.inset, out[i])
            if not np.array_equal(proj, out[i]):
                moved.append(int(i))
            out[i] = proj
        return out, moved

    def evaluate(self, positions: np.ndarray, t: float, want_cost: bool = True) -> PipelineResult:
        tess = tessellate(positions, self.domain)
        if want_cost:
            mset, cost = moments_and_cost(tess, self.field, t, self.cfg)
        else:
            mset, cost = moments(tess, self.field, t, self.cfg), float("nan")
        jac = assemble(tess, self.field, t, mset, self.cfg) if self.needs_jacobian else None
        state = ControlState(tessellation=tess, moments=mset, jacobian=jac,
                             kappa=self.scenario.kappa, time=t,
                             v_max=self.scenario.v_max)
        cmd = self.controller(state)
        return PipelineResult(tess, mset, jac, cmd, cost)

    def velocity(self, t: float, positions: np.ndarray) -> np.ndarray:
        """Closed-loop dynamics f(t, p) for the integrator; clamps stage inputs."""
        p, _ = self.clamp(positions)
        return self.evaluate(p, t, want_cost=False).command.velocities


def rk4_step(f, t: float, p: np.ndarray, dt: float) -> np.ndarray:
    """Classical 4-stage step for p_dot = f(t, p)."""
    k1 = f(t, p)
    k2 = f(t + dt / 2, p + (dt / 2) * k1)
    k3 = f(t + dt / 2, p + (dt / 2) * k2)
    k4 = f(t + dt, p + dt * k3)
    return p + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def step(positions: np.ndarray, t: float, ctx: SimContext):
    """One RK4 step of the closed loop; returns (next positions, clamped robots).

    Stage evaluations see positions clamped into the domain; the end-of-step
    clamp is the logged event.
    """
    nxt = rk4_step(ctx.velocity, t, positions, ctx.scenario.dt)
    return ctx.clamp(nxt)


@dataclass(frozen=True)
class InitCvtResult:
    positions: np.ndarray
    residual: float
    iterations: int
    converged: bool


def init_cvt(positions, fld: DensityField, t0: float, domain: Domain,
             cfg: QuadratureConfig = DEFAULT_QUADRATURE, tol: float = 1e-6,
             budget: int = 100_000) -> InitCvtResult:
    """Drive robots to a CVT of the density frozen at t0.

    Classic fixed-point sweep p <- c(p) until max_i |p_i - c_i| < tol or the
    iteration budget runs out (best-so-far returned, converged=False).
    """
    frozen = freeze_field(fld, t0)
    p = np.asarray(positions, dtype=float).copy()
    best_p, best_res = p, math.inf
    for it in range(budget + 1):
        tess = tessellate(p, domain)
        mset = moments(tess, frozen, t0, cfg)
        res = float(np.max(np.linalg.norm(p - mset.centroids, axis=1)))
        if res < best_res:
            best_p, best_res = p.copy(), res
        if res < tol:
            return InitCvtResult(p, res, it, True)
        if it == budget:
            break
        p = mset.centroids.copy()
    return InitCvtResult(best_p, best_res, budget, False)


def sample_positions(domain: Domain, n: int, seed: int,
                     margin_frac: float = 0.05, min_sep: float = 1e-3) -> np.ndarray:
    """Seeded rejection sampling of n well-separated interior start positions."""
    rng = np.random.default_rng(seed)
    v = domain.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    margin = margin_frac * float(np.max(hi - lo))
    pts: list[np.ndarray] = []
    for _ in range(100_000):
        q = rng.uniform(lo, hi)
        if domain.signed_distance(q) > -margin:
            continue
        if any(np.linalg.norm(q - p) < min_sep for p in pts):
            continue
        pts.append(q)
        if len(pts) == n:
            return np.array(pts)
    raise ScenarioError(f"could not place {n} robots in the domain", key="n")


def run(scenario: Scenario) -> SimTrace:
    """Integrate the scenario over [0, t_final], logging every step.

    Deterministic: the trace depends only on the scenario (including seed).
    """
    ctx = SimContext(scenario)
    if scenario.initial_positions is not None:
        p = np.asarray(scenario.initial_positions, dtype=float).copy()
    else:
        p = sample_positions(ctx.domain, scenario.n, scenario.seed)
    if scenario.init_cvt:
        p = init_cvt(p, ctx.field, 0.0, ctx.domain, ctx.cfg,
                     tol=scenario.init_cvt_tol, budget=scenario.init_cvt_budget).positions

    steps = int(round(scenario.t_final / scenario.dt))
    times, traj, cost, err, lam, flags = [], [], [], [], [], []
    clamp_events: list[tuple] = []

    def log(t, positions, result: PipelineResult):
        times.append(t)
        traj.append(positions.copy())
        cost.append(result.cost)
        err.append(result.command.tracking_error)
        if result.jacobian is not None:
            lam.append(spectral_radius(result.jacobian))
        else:
            lam.append(float("nan"))
        flags.append(result.command.condition_flag)

    t = 0.0
    for m in range(steps):
        res = ctx.evaluate(p, t)
        log(t, p, res)
        # Remaining RK4 stages; stage 1 is the logged evaluation above.
        dt = scenario.dt
        k1 = res.command.velocities
        k2 = ctx.velocity(t + dt / 2, p + (dt / 2) * k1)
        k3 = ctx.velocity(t + dt / 2, p + (dt / 2) * k2)
        k4 = ctx.velocity(t + dt, p + dt * k3)
        p, moved = ctx.clamp(p + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4))
        t = (m + 1) * scenario.dt
        clamp_events.extend((t, i) for i in moved)
    res = ctx.evaluate(p, t)
    log(t, p, res)

    times_arr = np.array(times)
    cost_arr = np.array(cost)
    total = float(np.trapezoid(cost_arr, times_arr)) if len(times_arr) > 1 else 0.0
    return SimTrace(
        times=times_arr,
        positions=np.array(traj),
        cost=cost_arr,
        tracking_error=np.array(err),
        lambda_max=np.array(lam),
        condition_flags=np.array(flags, dtype=bool),
        clamp_events=tuple(clamp_events),
        controller=scenario.controller_label(),
        total_cost=total,
    )


def run_controller_comparison(base: Scenario, controller_specs: list):
    """Run several controllers from identical initial conditions.

    `controller_specs` entries are (name, hops) pairs. The CVT initialization
    is performed once (it depends only on the density and start positions) and
    shared. Returns {label: SimTrace}.
    """
    ctx = SimContext(replace(base, controller="lloyd"))
    if base.initial_positions is not None:
        p0 = np.asarray(base.initial_positions, dtype=float)
    else:
        p0 = sample_positions(ctx.domain, base.n, base.seed)
    if base.init_cvt:
        p0 = init_cvt(p0, ctx.field, 0.0, ctx.domain, ctx.cfg,
                      tol=base.init_cvt_tol, budget=base.init_cvt_budget).positions
    out = {}
    for name, hops in controller_specs:
        scen = replace(base, controller=name, hops=hops,
                       initial_positions=p0.copy(), init_cvt=False)
        label = scen.controller_label()
        out[label] = run(scen)
    return out


def parse_controller_spec(text: str):
    """'lloyd' | 'cortes' | 'tvd_c' | 'tvd_d<k>' -> (name, hops)."""
    text = text.strip()
    if text in ("lloyd", "cortes", "tvd_c"):
        return text, 0
    if text.startswith("tvd_d"):
        suffix = text[len("tvd_d"):]
        if suffix.isdigit():
            return "tvd_dk", int(suffix)
    raise ScenarioError(f"unknown controller spec {text!r}", key="controller")
