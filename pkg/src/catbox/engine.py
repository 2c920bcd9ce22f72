"""Ask/tell optimization loop: trust-region alternating acquisition search.

A campaign owns the observation history, the incumbent, and a trust region
(an L-inf box of radius r_cont in normalized continuous units plus a Hamming
ball of radius r_cat over the categorical variables). Each suggestion fits
the GP surrogate, anchors at the incumbent, and alternates between a
derivative-free continuous search inside the box (categorical part frozen)
and an exhaustive or sampled scan of the Hamming ball (continuous part
frozen). The radii adapt on tell: consecutive improvements expand the box,
consecutive failures shrink it and tighten the ball, and collapse below
r_min triggers an exploration restart.

All randomness is derived from the campaign seed and the current history
length, so identical campaign state always produces identical suggestions
and a persisted campaign resumes exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from . import gp
from .acquisition import AcqSpec, score_arrays
from .kernels import KernelParams
from .space import MixedPoint, NormalizedPoint, SearchSpace, denormalize, normalize, validate_point

R_MIN = 2.0**-6
_IMPROVE_EPS = 1e-12

# Stream tags keeping the derived RNGs for different purposes independent.
_STREAM_INIT_DESIGN = 1
_STREAM_SUGGEST = 2
_STREAM_REFIT = 3
_STREAM_INIT_PARAMS = 4

TAGS = ("init", "suggested", "manual", "restart")


class CampaignError(ValueError):
    """Invalid campaign input (bad point, bad config, empty history)."""


class ObjectiveError(RuntimeError):
    """Objective evaluation failed; carries the partial campaign."""

    def __init__(self, campaign: "Campaign", point: MixedPoint):
        super().__init__(f"objective evaluation failed at {point}")
        self.campaign = campaign
        self.point = point


@dataclass
class TrustRegionState:
    r_cont: float = 0.2
    r_cat: int = 1
    succ_count: int = 0
    fail_count: int = 0
    restarts: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "r_cont": self.r_cont,
            "r_cat": self.r_cat,
            "succ_count": self.succ_count,
            "fail_count": self.fail_count,
            "restarts": self.restarts,
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "TrustRegionState":
        return TrustRegionState(
            r_cont=float(doc["r_cont"]),
            r_cat=int(doc["r_cat"]),
            succ_count=int(doc["succ_count"]),
            fail_count=int(doc["fail_count"]),
            restarts=int(doc["restarts"]),
        )


@dataclass(frozen=True)
class SuggestConfig:
    n_init: int = 20
    iters: int = 50
    alt_rounds: int = 3
    cont_restarts: int = 5
    cont_steps: int = 64
    cat_neighbor_cap: int = 2000
    succ_tol: int = 3
    fail_tol: int = 3
    expand: float = 2.0
    shrink: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_init < 1:
            raise CampaignError("n_init must be >= 1")
        if self.alt_rounds < 1:
            raise CampaignError("alt_rounds must be >= 1")
        if not (self.expand > 1.0 > self.shrink > 0.0):
            raise CampaignError("need expand > 1 > shrink > 0")

    def to_json(self) -> dict[str, Any]:
        return {
            "n_init": self.n_init,
            "iters": self.iters,
            "alt_rounds": self.alt_rounds,
            "cont_restarts": self.cont_restarts,
            "cont_steps": self.cont_steps,
            "cat_neighbor_cap": self.cat_neighbor_cap,
            "succ_tol": self.succ_tol,
            "fail_tol": self.fail_tol,
            "expand": self.expand,
            "shrink": self.shrink,
            "seed": self.seed,
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "SuggestConfig":
        return SuggestConfig(**{k: doc[k] for k in SuggestConfig().to_json()})


@dataclass(frozen=True)
class KernelConfig:
    """Surrogate fitting knobs: component counts and refit schedule."""

    q_gsm: int = 2
    q_csm: int = 2
    hamming_unit_diag: bool = False
    fit_restarts: int = 8
    refit_restarts: int = 2
    fit_maxiter: int = 60
    refit_every: int = 1
    refit_thin_after: int = 200
    refit_thin_every: int = 5

    def to_json(self) -> dict[str, Any]:
        return {
            "q_gsm": self.q_gsm,
            "q_csm": self.q_csm,
            "hamming_unit_diag": self.hamming_unit_diag,
            "fit_restarts": self.fit_restarts,
            "refit_restarts": self.refit_restarts,
            "fit_maxiter": self.fit_maxiter,
            "refit_every": self.refit_every,
            "refit_thin_after": self.refit_thin_after,
            "refit_thin_every": self.refit_thin_every,
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "KernelConfig":
        return KernelConfig(**{k: doc[k] for k in KernelConfig().to_json()})


@dataclass(frozen=True)
class Observation:
    point: MixedPoint
    y: float
    iteration: int
    tag: str = "manual"

    def to_json(self) -> dict[str, Any]:
        return {"point": self.point.to_json(), "y": self.y, "iteration": self.iteration, "tag": self.tag}

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "Observation":
        return Observation(
            point=MixedPoint.from_json(doc["point"]),
            y=float(doc["y"]),
            iteration=int(doc["iteration"]),
            tag=str(doc["tag"]),
        )


# ---------------------------------------------------------------------------
# Hamming ball machinery


def _esp_table(values: Sequence[int], radius: int) -> list[list[int]]:
    """E[i][k] = elementary symmetric polynomial e_k over the first i values."""
    u = len(values)
    E = [[0] * (radius + 1) for _ in range(u + 1)]
    E[0][0] = 1
    for i in range(1, u + 1):
        for k in range(radius + 1):
            E[i][k] = E[i - 1][k]
            if k >= 1:
                E[i][k] += values[i - 1] * E[i - 1][k - 1]
    return E


def hamming_ball_size(level_counts: Sequence[int], radius: int) -> int:
    """Number of configurations within Hamming distance `radius` of any center."""
    radius = min(radius, len(level_counts))
    E = _esp_table([c - 1 for c in level_counts], radius)
    return sum(E[len(level_counts)][k] for k in range(radius + 1))


def enumerate_hamming_ball(center: Sequence[int], level_counts: Sequence[int], radius: int) -> list[tuple[int, ...]]:
    """All configurations within the ball, ordered by distance, then position, then level."""
    u = len(center)
    radius = min(radius, u)
    out = [tuple(center)]
    for k in range(1, radius + 1):
        for positions in itertools.combinations(range(u), k):
            choices = [[l for l in range(level_counts[i]) if l != center[i]] for i in positions]
            for combo in itertools.product(*choices):
                cfg = list(center)
                for pos, lvl in zip(positions, combo):
                    cfg[pos] = lvl
                out.append(tuple(cfg))
    return out


def sample_hamming_ball(
    center: Sequence[int], level_counts: Sequence[int], radius: int, m: int, rng: np.random.Generator
) -> list[tuple[int, ...]]:
    """Uniform sample of m distinct ball members, without enumerating the ball."""
    u = len(center)
    radius = min(radius, u)
    values = [c - 1 for c in level_counts]
    E = _esp_table(values, radius)
    per_k = [E[u][k] for k in range(radius + 1)]
    total = sum(per_k)
    m = min(m, total)
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    attempts = 0
    while len(out) < m and attempts < 100 * m:
        attempts += 1
        r = int(rng.integers(0, total))
        k = 0
        while r >= per_k[k]:
            r -= per_k[k]
            k += 1
        cfg = list(center)
        kk = k
        for i in range(u, 0, -1):
            if kk == 0:
                break
            t = int(rng.integers(0, E[i][kk]))
            if t < values[i - 1] * E[i - 1][kk - 1]:
                lvl = int(rng.integers(0, values[i - 1]))
                if lvl >= center[i - 1]:
                    lvl += 1
                cfg[i - 1] = lvl
                kk -= 1
        key = tuple(cfg)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


# ---------------------------------------------------------------------------
# continuous pattern search


def _pattern_search(
    score_fn: Callable[[np.ndarray], float],
    x0: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    n_evals: int,
) -> None:
    """Coordinate pattern search: axis steps, step halved when no axis improves.

    Spends exactly n_evals evaluations (fewer if the step collapses); the
    caller harvests results through score_fn's candidate recording.
    """
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    fx = score_fn(x)
    evals = 1
    step = (hi - lo) / 4.0
    d = len(x)
    while evals < n_evals and bool(np.any(step > 1e-9)):
        improved = False
        for j in range(d):
            for sgn in (1.0, -1.0):
                if evals >= n_evals:
                    return
                cand = x.copy()
                cand[j] = min(max(cand[j] + sgn * step[j], lo[j]), hi[j])
                if cand[j] == x[j]:
                    continue
                fc = score_fn(cand)
                evals += 1
                if fc > fx:
                    x, fx = cand, fc
                    improved = True
        if not improved:
            step *= 0.5


# ---------------------------------------------------------------------------
# campaign


def initial_design(space: SearchSpace, n_init: int, seed: int) -> list[MixedPoint]:
    """Uniform random initial design, deterministic per seed."""
    if n_init < 1:
        raise CampaignError("n_init must be >= 1")
    rng = np.random.default_rng([seed, _STREAM_INIT_DESIGN])
    return [space.sample(rng) for _ in range(n_init)]


@dataclass
class Campaign:
    space: SearchSpace
    config: SuggestConfig = field(default_factory=SuggestConfig)
    acq: AcqSpec = field(default_factory=AcqSpec)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    direction: str = "maximize"
    history: list[Observation] = field(default_factory=list)
    incumbent: tuple[MixedPoint, float] | None = None
    tr: TrustRegionState = field(default_factory=TrustRegionState)
    pending: tuple[MixedPoint, str] | None = None
    fitted_params: KernelParams | None = None
    fitted_at: int = 0
    campaign_id: str | None = None
    initial_points: list[MixedPoint] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.direction not in ("maximize", "minimize"):
            raise CampaignError("direction must be 'maximize' or 'minimize'")

    @staticmethod
    def new(
        space: SearchSpace,
        config: SuggestConfig | None = None,
        acq: AcqSpec | None = None,
        kernel: KernelConfig | None = None,
        direction: str = "maximize",
        campaign_id: str | None = None,
    ) -> "Campaign":
        config = config or SuggestConfig()
        c = Campaign(
            space=space,
            config=config,
            acq=acq or AcqSpec(),
            kernel=kernel or KernelConfig(),
            direction=direction,
            tr=TrustRegionState(r_cont=0.2, r_cat=max(space.n_cat, 1)),
            campaign_id=campaign_id,
        )
        c.initial_points = initial_design(space, config.n_init, config.seed)
        return c

    # -- helpers

    @property
    def seed(self) -> int:
        return self.config.seed

    def _engine_y(self, y: float) -> float:
        return y if self.direction == "maximize" else -y

    def _engine_observations(self) -> list[tuple[MixedPoint, float]]:
        return [(o.point, self._engine_y(o.y)) for o in self.history]

    def _improves(self, y: float) -> bool:
        if self.incumbent is None:
            return True
        return self._engine_y(y) > self._engine_y(self.incumbent[1])

    # -- core operations

    def tell(self, point: MixedPoint, y: float, tag: str | None = None, iteration: int | None = None) -> None:
        """Record one observation and update incumbent and trust region."""
        err = validate_point(self.space, point)
        if err is not None:
            raise CampaignError(f"invalid point: {err}")
        y = float(y)
        if not math.isfinite(y):
            raise CampaignError("observation must be finite")
        next_iteration = self.history[-1].iteration + 1 if self.history else 0
        if iteration is None:
            iteration = next_iteration
        elif iteration < next_iteration:
            raise CampaignError(f"duplicate observation: iteration {iteration} already recorded")
        if tag is None:
            if self.pending is not None and point == self.pending[0]:
                tag = self.pending[1]
            else:
                tag = "manual"
        if tag not in TAGS:
            raise CampaignError(f"unknown tag {tag!r}")

        improved = self._improves(y)
        self.history.append(Observation(point=point, y=y, iteration=iteration, tag=tag))
        self.pending = None
        if improved:
            self.incumbent = (point, y)
            self.tr.succ_count += 1
            self.tr.fail_count = 0
        else:
            self.tr.fail_count += 1
            self.tr.succ_count = 0
        if self.tr.succ_count >= self.config.succ_tol:
            self.tr.r_cont = min(self.config.expand * self.tr.r_cont, 1.0)
            self.tr.succ_count = 0
            self.tr.fail_count = 0
        if self.tr.fail_count >= self.config.fail_tol:
            self.tr.r_cont = self.config.shrink * self.tr.r_cont
            self.tr.r_cat = max(self.tr.r_cat - 1, 1)
            self.tr.succ_count = 0
            self.tr.fail_count = 0
        if self.tr.r_cont < R_MIN:
            self.tr.r_cont = 0.2
            self.tr.r_cat = max(self.space.n_cat, 1)
            self.tr.restarts += 1

    def _refit_due(self) -> bool:
        if self.fitted_params is None:
            return True
        n = len(self.history)
        delta = n - self.fitted_at
        if n > self.kernel.refit_thin_after:
            return delta >= self.kernel.refit_thin_every
        return delta >= self.kernel.refit_every

    def _fit_model(self) -> gp.GpModel:
        obs = self._engine_observations()
        n = len(self.history)
        params = self.fitted_params
        fitted_at = self.fitted_at
        if self._refit_due():
            if params is None:
                init_rng = np.random.default_rng([self.seed, _STREAM_INIT_PARAMS, n])
                init = gp.default_init_params(
                    self.space,
                    obs,
                    init_rng,
                    q_gsm=self.kernel.q_gsm,
                    q_csm=self.kernel.q_csm,
                    hamming_unit_diag=self.kernel.hamming_unit_diag,
                )
                budget = self.kernel.fit_restarts
            else:
                init = params
                budget = self.kernel.refit_restarts
            params = gp.optimize_hyperparams(
                self.space, obs, init, budget=budget, seed=[self.seed, _STREAM_REFIT, n], maxiter=self.kernel.fit_maxiter
            )
            fitted_at = n
        model = gp.fit(self.space, obs, params)
        # Commit only after a successful factorization.
        self.fitted_params = params
        self.fitted_at = fitted_at
        return model

    def refit(self) -> None:
        """Re-optimize hyperparameters now if the refit schedule says so."""
        self._fit_model()

    def suggest(self) -> MixedPoint:
        """Propose the next point; repeated calls return the same pending point until told."""
        if self.pending is not None:
            return self.pending[0]
        if not self.history:
            raise CampaignError("no observations yet: evaluate the initial design and tell the results first")
        model = self._fit_model()
        point, tag = self._optimize_acquisition(model)
        self.pending = (point, tag)
        return point

    def _optimize_acquisition(self, model: gp.GpModel) -> tuple[MixedPoint, str]:
        space = self.space
        d, u = space.n_con, space.n_cat
        cfg = self.config
        rng = np.random.default_rng([self.seed, _STREAM_SUGGEST, len(self.history)])
        assert self.incumbent is not None
        inc_q = normalize(space, self.incumbent[0])
        inc_y_std = (self._engine_y(self.incumbent[1]) - model.train.y_mean) / model.train.y_std
        acq = replace(self.acq, best_y=inc_y_std)

        # Duplicate checks run in both coordinate systems: float round-trips
        # between raw and normalized coordinates are not always exact.
        seen_norm = {(o_q.cat, o_q.con01) for o_q in (normalize(space, o.point) for o in self.history)}
        seen_raw = {(o.point.cat, o.point.con) for o in self.history}

        candidates: list[tuple[float, int, NormalizedPoint]] = []

        def score_batch(points: list[NormalizedPoint]) -> np.ndarray:
            mean, var = gp.predict_normalized(model, points)
            vals = score_arrays(acq, mean, var)
            for q, v in zip(points, vals):
                candidates.append((float(v), len(candidates), q))
            return vals

        # Both regions stay centered at the incumbent so every candidate obeys
        # the containment invariants; the anchor only carries the best mixed
        # combination between the alternating steps.
        inc_con = np.asarray(inc_q.con01, dtype=float)
        lo = np.clip(inc_con - self.tr.r_cont, 0.0, 1.0)
        hi = np.clip(inc_con + self.tr.r_cont, 0.0, 1.0)

        ball: list[tuple[int, ...]] = []
        if u > 0:
            counts = space.level_counts
            if hamming_ball_size(counts, self.tr.r_cat) <= cfg.cat_neighbor_cap:
                ball = enumerate_hamming_ball(inc_q.cat, counts, self.tr.r_cat)
            else:
                ball = sample_hamming_ball(inc_q.cat, counts, self.tr.r_cat, cfg.cat_neighbor_cap, rng)

        anchor = inc_q
        anchor_score = float(score_batch([inc_q])[0])

        for _ in range(cfg.alt_rounds):
            round_start = len(candidates)
            if d > 0:
                starts = [np.asarray(anchor.con01, dtype=float)]
                for _ in range(cfg.cont_restarts - 1):
                    starts.append(rng.uniform(lo, hi))

                frozen_cat = anchor.cat

                def score_con(c: np.ndarray) -> float:
                    return float(score_batch([NormalizedPoint(cat=frozen_cat, con01=tuple(float(v) for v in c))])[0])

                for s0 in starts:
                    _pattern_search(score_con, s0, lo, hi, cfg.cont_steps)
            if u > 0:
                frozen_con = anchor.con01
                score_batch([NormalizedPoint(cat=b, con01=frozen_con) for b in ball])

            round_candidates = candidates[round_start:]
            if not round_candidates:
                break
            best = max(round_candidates, key=lambda t: (t[0], -t[1]))
            if best[0] - anchor_score < _IMPROVE_EPS:
                break
            anchor = best[2]
            anchor_score = best[0]

        for s, _idx, q in sorted(candidates, key=lambda t: (-t[0], t[1])):
            if (q.cat, q.con01) in seen_norm:
                continue
            raw = denormalize(space, q)
            if (raw.cat, raw.con) in seen_raw:
                continue
            return raw, "suggested"
        return space.sample(rng), "restart"


def run_loop(
    space: SearchSpace,
    objective: Callable[[MixedPoint], float],
    config: SuggestConfig,
    acq: AcqSpec | None = None,
    kernel: KernelConfig | None = None,
    direction: str = "maximize",
) -> Campaign:
    """Drain the initial design, then iterate suggest/evaluate/tell for config.iters rounds."""
    campaign = Campaign.new(space, config=config, acq=acq, kernel=kernel, direction=direction)
    for point in campaign.initial_points:
        campaign.tell(point, _evaluate(campaign, objective, point), tag="init")
    for _ in range(config.iters):
        point = campaign.suggest()
        campaign.tell(point, _evaluate(campaign, objective, point))
    return campaign


def _evaluate(campaign: Campaign, objective: Callable[[MixedPoint], float], point: MixedPoint) -> float:
    try:
        y = float(objective(point))
    except Exception as exc:
        raise ObjectiveError(campaign, point) from exc
    if not math.isfinite(y):
        raise ObjectiveError(campaign, point)
    return y


# ---------------------------------------------------------------------------
# serialization

SCHEMA_VERSION = 1


def campaign_to_json(c: Campaign) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "space": c.space.to_json(),
        "config": {
            "suggest": c.config.to_json(),
            "acq": {"kind": c.acq.kind, "xi": c.acq.xi, "beta": c.acq.beta},
            "kernel": c.kernel.to_json(),
            "direction": c.direction,
        },
        "history": [o.to_json() for o in c.history],
        "incumbent": None if c.incumbent is None else {"point": c.incumbent[0].to_json(), "y": c.incumbent[1]},
        "trust_region": c.tr.to_json(),
        "seed": c.config.seed,
        "pending": None if c.pending is None else {"point": c.pending[0].to_json(), "tag": c.pending[1]},
        "fitted_params": None if c.fitted_params is None else c.fitted_params.to_json(),
        "fitted_at": c.fitted_at,
        "initial_design": [p.to_json() for p in c.initial_points],
    }
    if c.campaign_id is not None:
        doc["id"] = c.campaign_id
    return doc


def campaign_from_json(doc: dict[str, Any]) -> Campaign:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise CampaignError(f"unsupported campaign schema version {doc.get('schema_version')!r}")
    cfg = doc["config"]
    c = Campaign(
        space=SearchSpace.from_json(doc["space"]),
        config=SuggestConfig.from_json(cfg["suggest"]),
        acq=AcqSpec(kind=cfg["acq"]["kind"], xi=float(cfg["acq"]["xi"]), beta=float(cfg["acq"]["beta"])),
        kernel=KernelConfig.from_json(cfg["kernel"]),
        direction=cfg["direction"],
        history=[Observation.from_json(o) for o in doc["history"]],
        incumbent=None,
        tr=TrustRegionState.from_json(doc["trust_region"]),
        campaign_id=doc.get("id"),
    )
    if doc["incumbent"] is not None:
        c.incumbent = (MixedPoint.from_json(doc["incumbent"]["point"]), float(doc["incumbent"]["y"]))
    if doc["pending"] is not None:
        c.pending = (MixedPoint.from_json(doc["pending"]["point"]), str(doc["pending"]["tag"]))
    if doc["fitted_params"] is not None:
        c.fitted_params = KernelParams.from_json(doc["fitted_params"])
    c.fitted_at = int(doc.get("fitted_at", 0))
    c.initial_points = [MixedPoint.from_json(p) for p in doc.get("initial_design", [])]
    return c
