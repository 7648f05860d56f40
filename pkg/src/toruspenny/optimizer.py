"""Max-min dispersion on the torus, contact refinement and the K3,3 survey.

The search maximises a soft-min of all pairwise squared image distances,

    F(x) = -(1/beta) * log sum_{i<j, m} exp(-beta * |x_j - x_i + m|^2),

for an increasing schedule of ``beta``, then polishes the result with SLSQP
on the exact max-min problem restricted to the near-contact lifts.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .catalog import k5_config, k33_config, octahedral_config
from .errors import (
    ConvergenceError,
    DegenerateConfigurationError,
    InvalidInputError,
    StructureError,
)
from .geometry import OFFSETS, find_isometry
from .graphs import SmallGraph, is_isomorphic, named_graph
from .packing import Configuration, contact_graph, packing_diameter

log = logging.getLogger(__name__)

MAX_N = 64
_OFFSETS = np.array(OFFSETS, dtype=float)


@dataclass(frozen=True)
class OptimizerParams:
    restarts: int = 50
    max_iterations: int = 200
    softmin_beta_schedule: tuple[float, ...] = (50.0, 100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0)
    step_rule: str = "lbfgs"
    convergence_tol: float = 1e-12
    seed: int = 0
    workers: int = 1
    polish_rounds: int = 12

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise InvalidInputError("convergence_tol must be positive")
        sched = tuple(float(b) for b in self.softmin_beta_schedule)
        if not sched or any(b <= 0 for b in sched) or any(b >= c for b, c in zip(sched, sched[1:])):
            raise InvalidInputError("beta schedule must be positive and strictly increasing")
        object.__setattr__(self, "softmin_beta_schedule", sched)
        if self.step_rule not in ("lbfgs", "armijo"):
            raise InvalidInputError(f"unknown step rule {self.step_rule!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for one (seed, stream...) key."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *stream])))


# ---------------------------------------------------------------------------
# Soft-min surrogate
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _lifts(xy: np.ndarray):
    ii, jj = _pairs(len(xy))
    # reduce first so the surrogate is exactly periodic and never overflows
    d = _wrap_array(xy[jj] - xy[ii])[:, None, :] + _OFFSETS[None, :, :]
    return ii, jj, d, np.einsum("pkc,pkc->pk", d, d)


def softmin_objective(x: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Soft-min of squared image distances and its gradient (flat coords)."""
    xy = np.asarray(x, dtype=float).reshape(-1, 2)
    ii, jj, d, sq = _lifts(xy)
    a = -beta * sq
    amax = a.max()
    e = np.exp(a - amax)
    s = e.sum()
    value = -(amax + math.log(s)) / beta
    w = e / s
    gd = 2.0 * np.einsum("pk,pkc->pc", w, d)
    grad = np.zeros_like(xy)
    np.add.at(grad, jj, gd)
    np.add.at(grad, ii, -gd)
    return float(value), grad.ravel()


def _wrap_array(xy: np.ndarray) -> np.ndarray:
    r = xy - np.floor(xy + 0.5)
    r = np.where(r >= 0.5, r - 1.0, r)
    return np.where(r < -0.5, r + 1.0, r)


def _min_sq(xy: np.ndarray) -> float:
    ii, jj = _pairs(len(xy))
    d = _wrap_array(xy[jj] - xy[ii])
    return float((d * d).sum(1).min())


def _ascend_lbfgs(xy, beta, params):
    def f(z):
        v, g = softmin_objective(z, beta)
        return -v, -g

    res = minimize(
        f, xy.ravel(), jac=True, method="L-BFGS-B",
        options={"maxiter": params.max_iterations, "gtol": 1e-10, "ftol": 1e-15},
    )
    return res.x.reshape(-1, 2)


def _ascend_armijo(xy, beta, params):
    z = xy.ravel().copy()
    v, g = softmin_objective(z, beta)
    step = 0.1
    for _ in range(params.max_iterations):
        gn = float(g @ g)
        if math.sqrt(gn) < params.convergence_tol:
            break
        while step > 1e-14:
            z_new = z + step * g
            v_new, g_new = softmin_objective(z_new, beta)
            if v_new >= v + 1e-4 * step * gn:
                z, v, g = z_new, v_new, g_new
                step *= 2.0
                break
            step *= 0.5
        else:
            break
    return z.reshape(-1, 2)


def _polish(xy: np.ndarray, params: OptimizerParams) -> np.ndarray:
    """Local max-min polish: maximise t s.t. |lift|^2 >= t on near lifts."""
    n = len(xy)
    best = _wrap_array(xy)
    best_sq = _min_sq(best)
    for _ in range(params.polish_rounds):
        ii, jj, d, sq = _lifts(best)
        dmin = sq.min()
        sel = np.argwhere(sq < 4.0 * dmin)
        ci, cj = ii[sel[:, 0]], jj[sel[:, 0]]
        # total lattice offset of each selected lift (wrap shift included)
        cm = np.rint(d[sel[:, 0], sel[:, 1]] - (best[cj] - best[ci]))
        rows = np.arange(len(ci))

        def cons(z):
            q = z[:-1].reshape(n, 2)
            v = q[cj] - q[ci] + cm
            return (v * v).sum(1) - z[-1]

        def cons_jac(z):
            q = z[:-1].reshape(n, 2)
            v = q[cj] - q[ci] + cm
            jac = np.zeros((len(ci), 2 * n + 1))
            for c in range(2):
                np.add.at(jac, (rows, 2 * cj + c), 2.0 * v[:, c])
                np.add.at(jac, (rows, 2 * ci + c), -2.0 * v[:, c])
            jac[:, -1] = -1.0
            return jac

        h = 0.2 * math.sqrt(dmin)
        flat = best.ravel()
        bounds = [(flat[0], flat[0]), (flat[1], flat[1])]  # pin point 0
        bounds += [(v - h, v + h) for v in flat[2:]]
        bounds.append((0.0, 2.0))
        z0 = np.concatenate([flat, [dmin]])
        res = minimize(
            lambda z: -z[-1], z0,
            jac=lambda z: np.concatenate([np.zeros(2 * n), [-1.0]]),
            constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
            bounds=bounds, method="SLSQP",
            options={"ftol": 1e-16, "maxiter": params.max_iterations},
        )
        cand = _wrap_array(np.clip(res.x[:-1], [b[0] for b in bounds[:-1]], [b[1] for b in bounds[:-1]]).reshape(n, 2))
        cand_sq = _min_sq(cand)
        if cand_sq <= best_sq:
            break
        gain = cand_sq - best_sq
        best, best_sq = cand, cand_sq
        if gain < params.convergence_tol:
            break
    return best


def _run_restart(n: int, params: OptimizerParams, index: int) -> tuple[np.ndarray, float]:
    rng = make_rng(params.seed, 0, index)
    xy = rng.uniform(-0.5, 0.5, size=(n, 2))
    ascend = _ascend_lbfgs if params.step_rule == "lbfgs" else _ascend_armijo
    for beta in params.softmin_beta_schedule:
        xy = _wrap_array(ascend(xy, beta, params))
    xy = _polish(xy, params)
    return xy, math.sqrt(_min_sq(xy))


def _restart_job(args):
    return _run_restart(*args)


@dataclass
class OptimizeResult:
    configuration: Configuration
    diameter: float
    best_restart: int
    restart_diameters: list[float]

    def hits(self, tol: float = 1e-9) -> int:
        return sum(1 for d in self.restart_diameters if d >= self.diameter - tol)


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise InvalidInputError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise DegenerateConfigurationError("need at least 2 points")
    if n > MAX_N:
        raise InvalidInputError(f"n={n} exceeds the supported maximum {MAX_N}")
    return n


def optimize(n: int, params: Optional[OptimizerParams] = None) -> OptimizeResult:
    """All restarts, best chosen by (diameter, restart index)."""
    n = _check_n(n)
    params = params or OptimizerParams()
    jobs = [(n, params, k) for k in range(params.restarts)]
    if params.workers > 1:
        with ProcessPoolExecutor(max_workers=params.workers) as pool:
            results = list(pool.map(_restart_job, jobs))
    else:
        results = [_restart_job(j) for j in jobs]
    best = 0
    for k, (_, d) in enumerate(results):
        if d > results[best][1]:
            best = k
    xy, d = results[best]
    cfg = Configuration.from_coords([(float(x), float(y)) for x, y in xy], label=f"optimized n={n}")
    return OptimizeResult(cfg, packing_diameter(cfg), best, [r[1] for r in results])


def maximize_min_distance(n: int, params: Optional[OptimizerParams] = None) -> tuple[Configuration, float]:
    res = optimize(n, params)
    return res.configuration, res.diameter


# ---------------------------------------------------------------------------
# Contact refinement
# ---------------------------------------------------------------------------


@dataclass
class RefineResult:
    configuration: Configuration
    diameter: float
    iterations: tuple[int, int]
    history: list[tuple[str, float]] = field(default_factory=list)
    multipliers: Optional[np.ndarray] = None


class _ContactSystem:
    """Residuals |p_j - p_i + m_ij|^2 - l^2 over target edges, point 0 pinned."""

    def __init__(self, anchor: np.ndarray, edges: Sequence[tuple[int, int]], offsets: np.ndarray, n: int):
        self.anchor = anchor
        self.n = n
        self.ei = np.array([e[0] for e in edges])
        self.ej = np.array([e[1] for e in edges])
        self.m = offsets
        self.rows = np.arange(len(edges))

    def points(self, z: np.ndarray) -> np.ndarray:
        return np.vstack([self.anchor, z[: 2 * self.n - 2].reshape(-1, 2)])

    def residual(self, z: np.ndarray) -> np.ndarray:
        p = self.points(z)
        d = p[self.ej] - p[self.ei] + self.m
        l = z[2 * self.n - 2]
        return (d * d).sum(1) - l * l

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """Full Jacobian over (all 2n coords, l); caller drops point 0."""
        p = self.points(z)
        d = p[self.ej] - p[self.ei] + self.m
        jac = np.zeros((len(self.ei), 2 * self.n + 1))
        for c in range(2):
            np.add.at(jac, (self.rows, 2 * self.ej + c), 2.0 * d[:, c])
            np.add.at(jac, (self.rows, 2 * self.ei + c), -2.0 * d[:, c])
        jac[:, -1] = -2.0 * z[2 * self.n - 2]
        return jac

    def reduced_jacobian(self, z: np.ndarray) -> np.ndarray:
        return self.jacobian(z)[:, 2:]

    # KKT system for stationary l on {residual = 0}: L = l - lam . r
    def kkt_residual(self, w: np.ndarray) -> np.ndarray:
        k = 2 * self.n - 1
        z, lam = w[:k], w[k:]
        jr = self.reduced_jacobian(z)
        grad = -(jr.T @ lam)
        grad[-1] += 1.0
        return np.concatenate([grad, self.residual(z)])

    def kkt_jacobian(self, w: np.ndarray) -> np.ndarray:
        k = 2 * self.n - 1
        z, lam = w[:k], w[k:]
        jr = self.reduced_jacobian(z)
        hess = np.zeros((2 * self.n + 1, 2 * self.n + 1))
        for lam_e, i, j in zip(lam, self.ei, self.ej):
            for c in range(2):
                a, b = 2 * i + c, 2 * j + c
                hess[a, a] += 2.0 * lam_e
                hess[b, b] += 2.0 * lam_e
                hess[a, b] -= 2.0 * lam_e
                hess[b, a] -= 2.0 * lam_e
        hess[-1, -1] = -2.0 * lam.sum()
        top = np.hstack([-hess[2:, 2:], -jr.T])
        bottom = np.hstack([jr, np.zeros((len(lam), len(lam)))])
        return np.vstack([top, bottom])


def _damped_gauss_newton(fun, jac, w, tol, max_iterations, stage, history):
    """Gauss-Newton with step halving; only norm-decreasing steps are taken."""
    r = fun(w)
    norm = float(np.linalg.norm(r))
    history.append((stage, norm))
    for it in range(max_iterations + 1):
        if np.max(np.abs(r)) < tol:
            return w, it
        if it == max_iterations:
            break
        step = np.linalg.lstsq(jac(w), -r, rcond=None)[0]
        t = 1.0
        while t >= 1e-10:
            w_new = w + t * step
            r_new = fun(w_new)
            n_new = float(np.linalg.norm(r_new))
            if n_new < norm:
                w, r, norm = w_new, r_new, n_new
                history.append((stage, norm))
                break
            t *= 0.5
        else:
            raise ConvergenceError(f"{stage}: no descent step (residual {np.max(np.abs(r)):.3g})")
    raise ConvergenceError(
        f"{stage}: max residual {np.max(np.abs(r)):.3g} after {max_iterations} iterations"
    )


def refine_contacts_detailed(
    cfg: Configuration,
    target: SmallGraph,
    tol: float = 1e-12,
    max_iterations: int = 50,
    stationary: bool = True,
    max_spread: Optional[float] = 2.0,
) -> RefineResult:
    """Solve for an equal-edge realisation of ``target`` near ``cfg``.

    Stage 1 is damped Gauss-Newton on the contact residuals. Stage 2
    (``stationary=True``) continues with damped Gauss-Newton on the KKT
    system that makes the common edge length stationary, which pins down
    a single realisation when the residual system alone is underdetermined.
    Lattice offsets are frozen from the initial guess.
    """
    if target.n != cfg.n:
        raise StructureError(f"target has {target.n} vertices, configuration has {cfg.n}")
    edges = target.edges()
    if not edges:
        raise StructureError("target graph has no edges")
    n = cfg.n
    p0 = cfg.as_array()
    lift = p0[[j for _, j in edges]] - p0[[i for i, _ in edges]]
    offsets = -np.floor(lift + 0.5)
    lengths = np.sqrt(((lift + offsets) ** 2).sum(1))
    if lengths.min() <= 0:
        raise StructureError("a target edge joins coincident points")
    if max_spread is not None and lengths.max() > max_spread * lengths.min():
        raise StructureError(
            f"initial edge lengths span {lengths.min():.3g}..{lengths.max():.3g}; "
            "guess is incompatible with the target contact structure"
        )

    system = _ContactSystem(p0[0].copy(), edges, offsets, n)
    z = np.concatenate([p0[1:].ravel(), [math.sqrt(float((lengths**2).mean()))]])
    history: list[tuple[str, float]] = []
    z, it1 = _damped_gauss_newton(
        system.residual, system.reduced_jacobian, z, tol, max_iterations, "contacts", history
    )
    it2 = 0
    lam = None
    if stationary:
        e_l = np.zeros(2 * n - 1)
        e_l[-1] = 1.0
        lam = np.linalg.lstsq(system.reduced_jacobian(z).T, e_l, rcond=None)[0]
        w = np.concatenate([z, lam])
        w, it2 = _damped_gauss_newton(
            system.kkt_residual, system.kkt_jacobian, w, tol, max_iterations, "stationary", history
        )
        z, lam = w[: 2 * n - 1], w[2 * n - 1:]

    pts = _wrap_array(system.points(z))
    out = Configuration.from_coords([(float(x), float(y)) for x, y in pts], label=cfg.label)
    if _min_sq(pts) <= 1e-24:
        raise ConvergenceError("refinement collapsed two points")
    return RefineResult(out, abs(float(z[-1])), (it1, it2), history, lam)


def refine_contacts(
    cfg: Configuration,
    target: SmallGraph,
    tol: float = 1e-12,
    max_iterations: int = 50,
    stationary: bool = True,
) -> Configuration:
    return refine_contacts_detailed(cfg, target, tol, max_iterations, stationary).configuration


# ---------------------------------------------------------------------------
# Uniqueness survey
# ---------------------------------------------------------------------------

REFERENCES = {"K33": k33_config, "K5": k5_config, "octahedron": octahedral_config}


@dataclass
class SurveyClass:
    representative: Configuration
    hits: int
    diameter: float
    first_trial: int


@dataclass
class SurveyResult:
    target: str
    trials: int
    classes: list[SurveyClass]
    unfiltered_classes: list[SurveyClass]
    failures: int
    rejected: int
    reference_diameter: Optional[float]
    reference_class: Optional[int]

    def to_dict(self) -> dict:
        def cls(c: SurveyClass) -> dict:
            return {
                "diameter": c.diameter,
                "hits": c.hits,
                "first_trial": c.first_trial,
                "points": [[float(p.x), float(p.y)] for p in c.representative.points],
            }

        return {
            "target": self.target,
            "trials": self.trials,
            "failures": self.failures,
            "rejected": self.rejected,
            "reference_diameter": self.reference_diameter,
            "reference_class": self.reference_class,
            "classes": [cls(c) for c in self.classes],
            "unfiltered_classes": [cls(c) for c in self.unfiltered_classes],
        }


def _label_to_target(points: np.ndarray, target: SmallGraph) -> np.ndarray:
    """Assign points to target vertices minimising total target-edge length."""
    n = target.n
    diff = points[None, :, :] - points[:, None, :]
    diff -= np.floor(diff + 0.5)
    dist = np.sqrt((diff**2).sum(-1))
    edges = target.edges()
    ei = np.array([e[0] for e in edges])
    ej = np.array([e[1] for e in edges])
    if n <= 8:
        perms = np.array(list(itertools.permutations(range(n))))
        cost = dist[perms[:, ei], perms[:, ej]].sum(1)
        return points[perms[int(np.argmin(cost))]]
    # greedy: place vertices in order, each at the unused point closest to
    # its already-placed neighbours
    chosen: list[int] = []
    free = set(range(n))
    for v in range(n):
        placed = [chosen[u] for u in target.neighbors(v) if u < v]
        if placed:
            k = min(free, key=lambda c: (sum(dist[c, q] for q in placed), c))
        else:
            k = min(free)
        chosen.append(k)
        free.discard(k)
    return points[chosen]


def _survey_trial(args):
    target, params, t, seed_guess, refine_tol = args
    rng = make_rng(params.seed, 1, t)
    if seed_guess is not None:
        guess = seed_guess + rng.uniform(-1e-3, 1e-3, size=seed_guess.shape)
    else:
        guess = _label_to_target(rng.uniform(-0.5, 0.5, size=(target.n, 2)), target)
    cfg = Configuration.from_coords([(float(x), float(y)) for x, y in guess])
    try:
        # no spread guard: far-off guesses either converge or are counted as failures
        res = refine_contacts_detailed(
            cfg, target, tol=refine_tol, max_iterations=params.max_iterations, max_spread=None
        )
    except (ConvergenceError, StructureError) as exc:
        return ("failed", str(exc))
    try:
        cg = contact_graph(res.configuration, 1e-9)
    except InvalidInputError as exc:
        return ("rejected", str(exc))
    if is_isomorphic(cg.graph(), target) is None:
        return ("rejected", "contact graph differs from target")
    return ("ok", res.configuration, packing_diameter(res.configuration))


def _cluster(items, tol) -> list[SurveyClass]:
    classes: list[SurveyClass] = []
    for t, cfg, d in items:
        for c in classes:
            if abs(c.diameter - d) <= 1e-6 and find_isometry(c.representative, cfg, tol) is not None:
                c.hits += 1
                break
        else:
            classes.append(SurveyClass(cfg, 1, d, t))
    return classes


def uniqueness_survey(
    target: Union[str, SmallGraph] = "K33",
    trials: int = 200,
    params: Optional[OptimizerParams] = None,
    reference: Optional[Configuration] = None,
    refine_tol: float = 1e-12,
    class_tol: float = 1e-7,
    diameter_tol: float = 1e-9,
) -> SurveyResult:
    """Sample, refine and cluster equal-edge realisations of ``target``.

    Trial 0 starts from the reference configuration plus 1e-3 noise; the
    rest start from uniform random points labelled to fit the target.
    ``classes`` keeps solutions at the reference diameter, while
    ``unfiltered_classes`` keeps every solution whose contact graph is the
    target.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    params = params or OptimizerParams()
    if isinstance(target, str):
        name = named_graph(target)
        key = next((k for k in REFERENCES if is_isomorphic(named_graph(k), name) is not None), None)
        graph, tname = name, target
    else:
        graph, tname = target, "custom"
        key = next((k for k in REFERENCES if is_isomorphic(named_graph(k), graph) is not None), None)
    if reference is None and key is not None:
        reference = REFERENCES[key]()

    seed_guess = None
    ref_d = None
    if reference is not None:
        if reference.n != graph.n:
            raise InvalidInputError("reference size does not match target")
        ref_d = packing_diameter(reference)
        witness = is_isomorphic(graph, contact_graph(reference, 1e-9).graph())
        if witness is not None:
            seed_guess = reference.as_array()[list(witness)]

    jobs = [(graph, params, t, seed_guess if t == 0 else None, refine_tol) for t in range(trials)]
    if params.workers > 1:
        with ProcessPoolExecutor(max_workers=params.workers) as pool:
            outcomes = list(pool.map(_survey_trial, jobs))
    else:
        outcomes = [_survey_trial(j) for j in jobs]

    ok = [(t, o[1], o[2]) for t, o in enumerate(outcomes) if o[0] == "ok"]
    failures = sum(1 for o in outcomes if o[0] == "failed")
    rejected = sum(1 for o in outcomes if o[0] == "rejected")
    if ref_d is None and ok:
        ref_d = max(d for _, _, d in ok)
    unfiltered = _cluster(ok, class_tol)
    filtered = _cluster([x for x in ok if ref_d is not None and abs(x[2] - ref_d) <= diameter_tol], class_tol)

    ref_class = None
    if reference is not None:
        for k, c in enumerate(filtered):
            if find_isometry(c.representative, reference.to_float(), class_tol) is not None:
                ref_class = k
                break
    log.info("survey %s: %d ok, %d failed, %d rejected", tname, len(ok), failures, rejected)
    return SurveyResult(tname, trials, filtered, unfiltered, failures, rejected, ref_d, ref_class)
