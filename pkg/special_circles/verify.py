"""
Seeded verification of the special circle construction.

Every claim checked here is a polynomial identity in the scene parameters, so
exact agreement on many independent random rational scenes is a randomized
identity test: a single exact mismatch is a hard failure.
"""

import json
import logging
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, field_validator

from . import constants
from .construction import (
    CollinearReflectionsError,
    ConstructionPath,
    Frame,
    Scene,
    classic_hagge,
    construct,
    homothety_circle,
    o_circle,
    param_from_vertex,
)
from .frames import construct_in_frame, normalize
from .geometry import (
    Backend,
    Circle,
    GeometryError,
    Point,
    Scalar,
    circle_through_3,
    collinear,
    magnitude,
    midpoint,
    same_point,
)
from .scene_loader import parse_scene_document, scene_digest, scene_to_document

logger = logging.getLogger(__name__)


class PolicyUnsatisfiableError(Exception):
    code = "POLICY_UNSATISFIABLE"


class ScenePolicy(BaseModel):
    """Bounds and rejection rules for random scenes; fully determines acceptance."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    frame: Literal["canonical", "arbitrary"] = "canonical"
    max_numerator: PositiveInt = constants.DEFAULT_MAX_NUMERATOR
    max_denominator: PositiveInt = constants.DEFAULT_MAX_DENOMINATOR
    min_param_separation: str = constants.DEFAULT_MIN_PARAM_SEPARATION
    allow_origin_generator: bool = False
    k_zero: bool = False
    require_hagge: bool = True
    max_rejections: PositiveInt = constants.DEFAULT_MAX_REJECTIONS
    coordinate_bound: PositiveFloat = constants.FRAME_COORDINATE_BOUND
    max_p_ratio: PositiveFloat = constants.FRAME_MAX_P_RATIO
    min_d_ratio: PositiveFloat = constants.FRAME_MIN_D_RATIO
    max_d_ratio: PositiveFloat = constants.FRAME_MAX_D_RATIO

    @field_validator("min_param_separation")
    @classmethod
    def _rational_separation(cls, value: str) -> str:
        if Fraction(value) < 0:
            raise ValueError("min_param_separation must be nonnegative")
        return value

    @property
    def separation(self) -> Fraction:
        return Fraction(self.min_param_separation)


class CheckRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    ok: bool = Field(alias="pass")
    residual: Optional[str] = None
    witness: Optional[Dict[str, Any]] = None
    passed: int = 0
    failed: int = 0


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=constants.REPORT_SCHEMA_VERSION, alias="schema")
    seed: Optional[int] = None
    trials: int = 1
    seed_rule: str = constants.SEED_RULE
    scene_digest: Optional[str] = None
    options: Dict[str, bool] = Field(default_factory=dict)
    policy: Optional[Dict[str, Any]] = None
    checks: List[CheckRecord] = Field(default_factory=list)
    status: str = constants.STATUS_PASS
    elapsed_seconds: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.status == constants.STATUS_PASS

    def failures(self) -> List[CheckRecord]:
        return [record for record in self.checks if not record.ok]

    def to_json(self, include_timing: bool = False) -> str:
        exclude = set() if include_timing else {"elapsed_seconds"}
        return json.dumps(self.model_dump(by_alias=True, exclude=exclude), indent=2) + "\n"


def _status(checks: Sequence[CheckRecord]) -> str:
    return constants.STATUS_PASS if all(record.ok for record in checks) else constants.STATUS_FAIL


def trial_seed(seed: int, index: int) -> int:
    return seed + index * constants.SEED_STRIDE


# Random scenes


def _random_rational(rng: random.Random, policy: ScenePolicy) -> Fraction:
    return Fraction(
        rng.randint(-policy.max_numerator, policy.max_numerator),
        rng.randint(1, policy.max_denominator),
    )


def rejection_reason(scene: Scene, policy: ScenePolicy) -> Optional[str]:
    """Returns why ``policy`` rejects ``scene``, or None when it is accepted."""
    if not policy.allow_origin_generator and same_point(scene.D, scene.O):
        return "generator at circumcenter"
    if policy.frame == "canonical":
        if scene.params is None:
            return "canonical scenes need parameters"
        a, b, c = scene.params
        if min(abs(a - b), abs(b - c), abs(c - a)) < policy.separation:
            return "parameters too close"
    else:
        radius = math.sqrt(float(scene.circumcircle.radius_squared))
        if any(math.dist(tuple(v), tuple(scene.D)) < policy.min_d_ratio * radius for v in scene.vertices):
            return "generator too close to a vertex"
        try:
            # both poles occupied leaves the closed form without parameters
            canonical, _ = normalize(scene.vertices, scene.P, D=scene.D)
            for vertex in canonical.vertices:
                param_from_vertex(vertex)
        except GeometryError as e:
            return f"normalization failed: {e}"
    if policy.require_hagge:
        try:
            classic_hagge(scene.vertices, scene.D)
        except CollinearReflectionsError:
            return "classic Hagge reflections are collinear"
    return None


def _draw_canonical(rng: random.Random, policy: ScenePolicy) -> Scene:
    params = [_random_rational(rng, policy) for _ in range(3)]
    k = Fraction(0) if policy.k_zero else _random_rational(rng, policy)
    D = Point(_random_rational(rng, policy), _random_rational(rng, policy))
    return Scene.canonical(params, k, D=D)


def _draw_arbitrary(rng: random.Random, policy: ScenePolicy) -> Scene:
    bound = policy.coordinate_bound
    vertices = [Point(rng.uniform(-bound, bound), rng.uniform(-bound, bound)) for _ in range(3)]
    a, b, c = vertices
    longest = max((u - v).norm_squared() for u, v in ((a, b), (b, c), (c, a)))
    twice_area = abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
    if twice_area < 0.05 * longest:
        raise GeometryError("triangle too flat")

    circumcircle = circle_through_3(a, b, c)
    O, radius = circumcircle.center, math.sqrt(circumcircle.radius_squared)

    def around_center(low: float, high: float) -> Point:
        angle = rng.uniform(0.0, 2 * math.pi)
        distance = radius * rng.uniform(low, high)
        return O + Point(distance * math.cos(angle), distance * math.sin(angle))

    P = O if policy.k_zero else around_center(0.0, policy.max_p_ratio)
    D = around_center(policy.min_d_ratio, policy.max_d_ratio)
    return Scene.from_vertices(vertices, P, D=D)


def random_scene(seed: int, policy: Optional[ScenePolicy] = None) -> Scene:
    """Deterministic random scene for ``seed`` satisfying ``policy``."""
    policy = policy or ScenePolicy()
    rng = random.Random(seed)
    draw = _draw_canonical if policy.frame == "canonical" else _draw_arbitrary
    for attempt in range(policy.max_rejections):
        try:
            scene = draw(rng, policy)
        except GeometryError as e:
            logger.debug(f"Seed {seed}, attempt {attempt}: rejected ({e})")
            continue
        reason = rejection_reason(scene, policy)
        if reason is None:
            return scene
        logger.debug(f"Seed {seed}, attempt {attempt}: rejected ({reason})")
    raise PolicyUnsatisfiableError(
        f"No scene satisfied the policy within {policy.max_rejections} draws (seed {seed})"
    )


# Checks


def _difference(p1: Point, p2: Point) -> Scalar:
    delta = p1 - p2
    return max(abs(delta.x), abs(delta.y))


def _format(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return f"{float(value):.3e}"


class _Checker:
    """Collects check records for one scene."""

    def __init__(self, scene: Scene, tolerance: Optional[float] = None):
        self.scene = scene
        self.tolerance = tolerance
        self.records: List[CheckRecord] = []

    def _witness(self) -> Dict[str, Any]:
        return scene_to_document(self.scene)

    def exact(self, name: str, mismatch: Scalar) -> None:
        """Records an exact check; ``mismatch`` is zero on success."""
        ok = mismatch == 0
        if not ok:
            logger.error(f"Check {name} failed: exact mismatch {mismatch}")
        self.records.append(
            CheckRecord(
                name=name,
                ok=ok,
                residual=None if ok else _format(mismatch),
                witness=None if ok else self._witness(),
                passed=int(ok),
                failed=int(not ok),
            )
        )

    def relative(self, name: str, residual: float) -> None:
        """Records a double check against the relative tolerance."""
        ok = math.isfinite(residual) and residual < self.tolerance
        if not ok:
            logger.error(f"Check {name} failed: residual {residual:.3e}")
        self.records.append(
            CheckRecord(
                name=name,
                ok=ok,
                residual=_format(residual),
                witness=None if ok else self._witness(),
                passed=int(ok),
                failed=int(not ok),
            )
        )

    def check(self, name: str, mismatch: Scalar, scale: float = 1.0) -> None:
        if self.tolerance is None:
            self.exact(name, mismatch)
        else:
            self.relative(name, float(mismatch) / max(1.0, scale))


def _max_difference(first: Sequence[Point], second: Sequence[Point]) -> Scalar:
    return max(_difference(p1, p2) for p1, p2 in zip(first, second))


def _canonical_checks(scene: Scene, printed_form: bool, checker: _Checker) -> None:
    geometric = construct(scene, ConstructionPath.GEOMETRIC)
    closed = construct(scene, ConstructionPath.CLOSED_FORM, printed_form)
    O, P, Q, D = scene.O, scene.P, scene.Q, scene.D
    scale = max(1.0, *(p.magnitude() for p in geometric.named_points().values()))

    checker.check("closed_form_E_matches_chord", _max_difference(closed.chord_ends, geometric.chord_ends), scale)
    checker.check(
        "closed_form_U_matches_parallelogram", _max_difference(closed.special_points, geometric.special_points), scale
    )
    checker.check(
        "closed_form_Uprime_matches_midpoint", _max_difference(closed.mid_points, geometric.mid_points), scale
    )
    checker.check(
        "diagonals_bisect_each_other",
        _max_difference(geometric.mid_points, [midpoint(Q, U) for U in geometric.special_points]),
        scale,
    )

    if geometric.degenerate:
        logger.info("Degenerate scene (D = O): checking the collapse, skipping circle checks")
        checker.check("degenerate_collapse_to_P", _max_difference(geometric.special_points, [P, P, P]), scale)
        return

    oracle = circle_through_3(*geometric.special_points)
    claimed = closed.special_circle
    checker.check("special_circle_matches_oracle", oracle.residual(claimed), scale * scale)
    checker.check("special_circle_contains_P", max(abs(claimed.power(P)), abs(oracle.power(P))), scale * scale)
    generator = D - O
    checker.check(
        "special_circle_center_radius",
        max(_difference(claimed.center, P + D - O), abs(claimed.radius_squared - generator.norm_squared())),
        scale * scale,
    )

    mid_oracle = circle_through_3(*geometric.mid_points)
    checker.check("midpoint_circle_matches_oracle", mid_oracle.residual(closed.midpoint_circle), scale * scale)
    checker.check(
        "midpoint_circle_on_diameter_OD",
        max(abs(mid_oracle.power(O)), abs(mid_oracle.power(D)), _difference(mid_oracle.center, midpoint(O, D))),
        scale * scale,
    )

    ratio_mismatch = max(
        _difference(U - Q, (Up - Q) * 2) for U, Up in zip(geometric.special_points, geometric.mid_points)
    )
    aligned = all(collinear(Q, Up, U) for U, Up in zip(geometric.special_points, geometric.mid_points))
    checker.check("diagonals_collinear_ratio_two", ratio_mismatch if aligned else max(ratio_mismatch, 1), scale)

    checker.check("homothety_factor_two", homothety_circle(geometric, 2).residual(oracle), scale * scale)

    shifted = construct(scene.with_k(scene.k + 1), ConstructionPath.GEOMETRIC)
    checker.check("uprime_independent_of_k", _max_difference(shifted.mid_points, geometric.mid_points), scale)

    circle_at_O = o_circle(scene)
    checker.check(
        "o_circle_center_D_through_O",
        max(_difference(circle_at_O.center, D), abs(circle_at_O.power(O))),
        scale * scale,
    )

    _hagge_check(scene, checker, scale * scale)


def _hagge_check(scene: Scene, checker: _Checker, scale: float) -> None:
    try:
        hagge = classic_hagge(scene.vertices, scene.D)
    except CollinearReflectionsError as e:
        logger.warning(f"Skipping classic Hagge check: {e}")
        return
    checker.check("classic_hagge_contains_orthocenter", abs(hagge.circle.power(hagge.orthocenter)), scale)


def _frame_checks(scene: Scene, printed_form: bool, checker: _Checker) -> None:
    geometric = construct(scene, ConstructionPath.GEOMETRIC)
    closed = construct_in_frame(scene, ConstructionPath.CLOSED_FORM, printed_form)
    O, P, D = scene.O.as_double(), scene.P.as_double(), scene.D.as_double()
    radius = math.sqrt(float(scene.circumcircle.radius_squared))

    def as_double(points):
        return [p.as_double() for p in points]

    compared = ("chord_ends", "special_points", "mid_points")
    geometric_points = [p for name in compared for p in as_double(getattr(geometric, name))]
    closed_points = [p for name in compared for p in as_double(getattr(closed, name))]
    geometric_points += [geometric.Q.as_double(), geometric.K.as_double()]
    closed_points += [closed.Q.as_double(), closed.K.as_double()]
    checker.relative(
        "frame_geometric_matches_closed_form",
        float(_max_difference(geometric_points, closed_points)) / radius,
    )

    if geometric.degenerate:
        checker.relative(
            "degenerate_collapse_to_P",
            float(_max_difference(as_double(geometric.special_points), [P, P, P])) / radius,
        )
        return

    generator_squared = (D - O).norm_squared()
    predicted = Circle.from_center(P + D - O, generator_squared)
    members = as_double(geometric.special_points) + [P]
    checker.relative(
        "frame_special_circle_membership",
        max(abs(predicted.power(p)) for p in members) / (radius * radius),
    )

    predicted_mid = Circle.from_center(midpoint(O, D), generator_squared / 4)
    mid_members = as_double(geometric.mid_points) + [O, D]
    checker.relative(
        "frame_midpoint_circle_membership",
        max(abs(predicted_mid.power(p)) for p in mid_members) / (radius * radius),
    )

    def circle_gap(claimed: Circle, predicted: Circle) -> float:
        center_gap = _difference(claimed.center.as_double(), predicted.center)
        radius_gap = abs(math.sqrt(float(claimed.radius_squared)) - math.sqrt(predicted.radius_squared))
        return max(center_gap, radius_gap) / radius

    checker.relative(
        "frame_circles_match",
        max(
            circle_gap(closed.special_circle, predicted),
            circle_gap(closed.midpoint_circle, predicted_mid),
        ),
    )

    try:
        hagge = classic_hagge(scene.vertices, scene.D)
    except CollinearReflectionsError as e:
        logger.warning(f"Skipping classic Hagge check: {e}")
        return
    checker.relative(
        "frame_classic_hagge_contains_orthocenter",
        abs(float(hagge.circle.power(hagge.orthocenter)))
        / max(radius * radius, magnitude(hagge.circle.g ** 2, hagge.circle.f ** 2, hagge.circle.t)),
    )


def verify_scene(scene: Scene, printed_form: bool = False, seed: Optional[int] = None) -> Report:
    """Runs every invariant on ``scene``; failures are recorded, never raised."""
    started = time.perf_counter()
    exact = scene.frame is Frame.CANONICAL and scene.backend is Backend.EXACT
    checker = _Checker(scene, tolerance=None if exact else constants.RELATIVE_TOLERANCE)
    if scene.frame is Frame.CANONICAL:
        _canonical_checks(scene, printed_form, checker)
    else:
        _frame_checks(scene, printed_form, checker)

    report = Report(
        seed=seed,
        trials=1,
        scene_digest=scene_digest(scene),
        options={"printed_eq32": printed_form},
        checks=checker.records,
        status=_status(checker.records),
        elapsed_seconds=time.perf_counter() - started,
    )
    logger.debug(f"Scene {report.scene_digest}: {report.status} ({len(report.checks)} checks)")
    return report


def replay(witness: Dict[str, Any], printed_form: bool = False) -> Report:
    """Re-runs the checks on a failure witness."""
    return verify_scene(parse_scene_document(witness), printed_form=printed_form)


def _run_trial(seed: int, policy: ScenePolicy, printed_form: bool) -> Report:
    return verify_scene(random_scene(seed, policy), printed_form=printed_form, seed=seed)


def _aggregate(reports: Sequence[Report]) -> List[CheckRecord]:
    merged: Dict[str, CheckRecord] = {}
    worst: Dict[str, float] = {}
    for report in reports:
        for record in report.checks:
            current = merged.get(record.name)
            if current is None:
                current = merged[record.name] = CheckRecord(name=record.name, ok=True)
            current.passed += record.passed
            current.failed += record.failed
            if not record.ok and current.ok:
                current.ok = False
                current.residual = record.residual
                current.witness = record.witness
            elif current.ok and record.residual is not None:
                worst[record.name] = max(worst.get(record.name, 0.0), float(record.residual))
    for name, residual in worst.items():
        if merged[name].ok:
            merged[name].residual = _format(residual)
    return list(merged.values())


def verify_batch(
    trials: int,
    seed: int,
    policy: Optional[ScenePolicy] = None,
    printed_form: bool = False,
    workers: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> Report:
    """Aggregates ``verify_scene`` over ``trials`` seeded scenes, ordered by trial index."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    policy = policy or ScenePolicy()
    seeds = [trial_seed(seed, index) for index in range(trials)]
    run = partial(_run_trial, policy=policy, printed_form=printed_form)
    logger.info(f"Verifying {trials} {policy.frame} scene(s) from seed {seed} with {workers} worker(s)")

    started = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, seeds, chunksize=max(1, trials // (workers * 4))))
    else:
        reports = []
        for trial_index, trial in enumerate(seeds):
            reports.append(run(trial))
            if progress is not None:
                progress(trial_index + 1)

    checks = _aggregate(reports)
    report = Report(
        seed=seed,
        trials=trials,
        options={"printed_eq32": printed_form},
        policy=policy.model_dump(),
        checks=checks,
        status=_status(checks),
        elapsed_seconds=time.perf_counter() - started,
    )
    failed = sum(1 for r in reports if not r.passed)
    logger.info(f"Batch finished: {report.status}, {failed}/{trials} scene(s) failed in {report.elapsed_seconds:.2f}s")
    return report
