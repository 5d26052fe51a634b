"""Keyframe skills: encoding, linear-interpolation playback, composition.

A skill is an ordered list of inflation keyframes. Playback is strictly
open loop: the actuation command at simulated time t is the piecewise
linear interpolation of the keyframes at t / time_scale, and the engine
never reads object state except to log it and to judge the final outcome.

Each keyframe's duration is the transition time from that keyframe to the
next; the last keyframe's duration is a terminal hold. The nominal skill
duration is the sum of all durations, and playback appends a settle window
(scaled like everything else) so outcomes are judged at rest.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .sim import (
    AirMassVector,
    HandSpec,
    ObjectSpec,
    PlanarPose,
    Simulation,
    SpecError,
    WorldState,
    wrap_angle,
)

SKILL_FORMAT_VERSION = 1
DEFAULT_SETTLE_TIME = 0.5
QUARTER_TURN = 0.5 * math.pi


class SkillError(ValueError):
    pass


@dataclass(frozen=True)
class Keyframe:
    airmass: AirMassVector
    transition_duration: float
    label: str = ""

    def validate(self, where: str) -> None:
        if not (self.transition_duration > 0.0):
            raise SkillError(f"{where}: transition_duration must be > 0")


@dataclass(frozen=True)
class PoseRegion:
    """Axis-aligned box in (x, y, theta)."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    theta_range: tuple[float, float]

    def validate(self, where: str = "pose region") -> None:
        for axis, (lo, hi) in zip("xy0", (self.x_range, self.y_range, self.theta_range)):
            if lo > hi:
                raise SkillError(f"{where}: {axis}-range has lo > hi")

    def contains(self, pose: PlanarPose) -> bool:
        return (
            self.x_range[0] <= pose.x <= self.x_range[1]
            and self.y_range[0] <= pose.y <= self.y_range[1]
            and self.theta_range[0] <= pose.theta <= self.theta_range[1]
        )

    def extents(self) -> tuple[float, float, float]:
        return (
            self.x_range[1] - self.x_range[0],
            self.y_range[1] - self.y_range[0],
            self.theta_range[1] - self.theta_range[0],
        )

    def center(self) -> tuple[float, float, float]:
        return (
            0.5 * (self.x_range[0] + self.x_range[1]),
            0.5 * (self.y_range[0] + self.y_range[1]),
            0.5 * (self.theta_range[0] + self.theta_range[1]),
        )


@dataclass(frozen=True)
class SymbolicEffect:
    """Rotation a skill applies to the manipulandum, at the symbolic level.

    axis "z" is the palm normal (the simulated plane's rotation axis);
    "x" and "y" are in-plane axes realizable only by out-of-plane skills.
    The identity is axis "z" with zero quarter turns.
    """

    axis: str = "z"
    quarter_turns: int = 0

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y", "z"):
            raise SkillError(f"symbolic effect: unknown axis '{self.axis}'")
        object.__setattr__(self, "quarter_turns", self.quarter_turns % 4)

    @property
    def is_identity(self) -> bool:
        return self.quarter_turns == 0

    def planar_rotation(self) -> float:
        """In-plane rotation angle; out-of-plane effects contribute none."""
        if self.axis == "z":
            return QUARTER_TURN * self.quarter_turns
        return 0.0


IDENTITY_EFFECT = SymbolicEffect("z", 0)


@dataclass(frozen=True)
class Skill:
    name: str
    keyframes: tuple[Keyframe, ...]
    symbolic_effect: SymbolicEffect = IDENTITY_EFFECT
    entrance_predicate: PoseRegion | None = None
    exit_predicate: PoseRegion | None = None

    def validate(self) -> None:
        if len(self.keyframes) < 2:
            raise SkillError(f"skill '{self.name}': needs at least 2 keyframes")
        widths = {len(k.airmass) for k in self.keyframes}
        if len(widths) != 1:
            raise SkillError(f"skill '{self.name}': keyframes disagree on actuator count")
        for i, k in enumerate(self.keyframes):
            k.validate(f"skill '{self.name}' keyframes[{i}]")
        if self.entrance_predicate is not None:
            self.entrance_predicate.validate(f"skill '{self.name}' entrance")
        if self.exit_predicate is not None:
            self.exit_predicate.validate(f"skill '{self.name}' exit")

    @property
    def nominal_duration(self) -> float:
        return sum(k.transition_duration for k in self.keyframes)

    @property
    def actuator_count(self) -> int:
        return len(self.keyframes[0].airmass)

    def keyframe_times(self) -> list[float]:
        """Skill-time at which each keyframe is reached (first is 0)."""
        times = [0.0]
        for k in self.keyframes[:-1]:
            times.append(times[-1] + k.transition_duration)
        return times


def interpolate(skill: Skill, t: float) -> AirMassVector:
    """Piecewise-linear inflation command at skill-time t."""
    duration = skill.nominal_duration
    if t < 0.0 or t > duration:
        raise SkillError(f"t={t} outside [0, {duration}]")
    frames = skill.keyframes
    acc = 0.0
    for i in range(len(frames) - 1):
        d = frames[i].transition_duration
        if t <= acc + d:
            u = (t - acc) / d
            a = frames[i].airmass.values
            b = frames[i + 1].airmass.values
            return AirMassVector([av + u * (bv - av) for av, bv in zip(a, b)])
        acc += d
    # Terminal hold at the last keyframe.
    return AirMassVector(frames[-1].airmass.values)


@dataclass(frozen=True)
class Outcome:
    kind: str  # "success" | "failure" | "invalid"
    reason: str = ""

    @property
    def is_success(self) -> bool:
        return self.kind == "success"

    def __str__(self) -> str:
        return self.kind if not self.reason else f"{self.kind}({self.reason})"


@dataclass
class TrajectoryLog:
    """Time-stamped object poses with keyframe boundary markers.

    `samples` rows are (t, poses, keyframe_index, airmass) where poses are
    wrapped PlanarPose per object; `headings` carries the matching
    continuous (unwrapped) heading per object for rotation accounting.
    """

    skill_name: str
    samples: list[tuple[float, list[PlanarPose], int, AirMassVector]] = field(default_factory=list)
    headings: list[list[float]] = field(default_factory=list)
    skill_times: list[float] = field(default_factory=list)
    keyframe_boundaries: list[tuple[str, float]] = field(default_factory=list)
    outcome: Outcome = Outcome("failure", "not played")
    time_scale: float = 1.0
    object_index: int = 0

    def final_pose(self) -> PlanarPose:
        return self.samples[-1][1][self.object_index]

    def initial_pose(self) -> PlanarPose:
        return self.samples[0][1][self.object_index]

    def net_rotation(self) -> float:
        return self.headings[-1][self.object_index] - self.headings[0][self.object_index]

    def pose_at_time(self, t: float) -> tuple[PlanarPose, float]:
        """(wrapped pose, continuous heading) of the manipulandum at sample time t."""
        for i, row in enumerate(self.samples):
            if row[0] == t:
                return row[1][self.object_index], self.headings[i][self.object_index]
        raise KeyError(f"no sample at t={t}")


def effect_removed_theta(theta_final: float, theta_initial_branch: float, effect: SymbolicEffect) -> float:
    """Final heading with the skill's nominal in-plane rotation taken out.

    The result lives on the same branch as entrance headings so exit boxes
    and entrance boxes are directly comparable.
    """
    return wrap_angle(theta_final - effect.planar_rotation())


def play(
    skill: Skill,
    world: WorldState,
    sim: Simulation,
    time_scale: float = 1.0,
    settle_time: float = DEFAULT_SETTLE_TIME,
    log_interval: float = 0.01,
    object_index: int = 0,
) -> TrajectoryLog:
    """Run a skill open loop on a caller-owned world (mutated in place).

    The command signal is interpolate(skill, t / time_scale); total run
    time is (nominal_duration + settle_time) * time_scale. The outcome is
    judged on the final pose only: success iff it lies in the skill's exit
    box, with theta compared after removing the skill's symbolic rotation.
    """
    if time_scale <= 0.0:
        raise SkillError(f"time_scale must be > 0, got {time_scale}")
    skill.validate()
    if skill.actuator_count != sim.hand.actuator_count:
        raise SpecError(
            f"skill '{skill.name}' has {skill.actuator_count} actuators, "
            f"hand has {sim.hand.actuator_count}"
        )

    dt = sim.dt
    duration = skill.nominal_duration
    total = (duration + settle_time) * time_scale
    n_steps = int(round(total / dt))
    log_every = max(1, int(round(log_interval / dt)))

    # Steps at which each keyframe is reached, for boundary markers.
    kf_times = skill.keyframe_times()
    kf_steps = [int(round(t * time_scale / dt)) for t in kf_times]
    kf_step_set = {}
    for i, s in enumerate(kf_steps):
        kf_step_set[s] = i
    labels = [k.label or f"KF{i + 1}" for i, k in enumerate(skill.keyframes)]

    log = TrajectoryLog(skill_name=skill.name, time_scale=time_scale, object_index=object_index)

    current_kf = 0
    current_skill_t = 0.0

    def record() -> None:
        log.samples.append(
            (world.time, world.object_poses, current_kf, world.airmass)
        )
        log.headings.append(list(world.object_heading))
        log.skill_times.append(current_skill_t)

    for step_index in range(n_steps + 1):
        current_skill_t = min((step_index * dt) / time_scale, duration)
        sim.set_actuation(world, interpolate(skill, current_skill_t))
        if step_index in kf_step_set:
            current_kf = kf_step_set[step_index]
            record()
            log.keyframe_boundaries.append((labels[current_kf], world.time))
        elif step_index % log_every == 0:
            record()
        if step_index < n_steps:
            sim.step(world)
            if world.invalid:
                record()
                log.outcome = Outcome("invalid", world.invalid_reason)
                return log

    if log.samples[-1][0] != world.time:
        record()

    final = log.final_pose()
    if skill.exit_predicate is None:
        log.outcome = Outcome("success")
        return log
    judged = PlanarPose(
        final.x, final.y, effect_removed_theta(final.theta, 0.0, skill.symbolic_effect)
    )
    if skill.exit_predicate.contains(judged):
        log.outcome = Outcome("success")
    else:
        log.outcome = Outcome("failure", "exit_region")
    return log


def loop_skill(
    skill: Skill,
    n: int,
    world: WorldState,
    sim: Simulation,
    time_scale: float = 1.0,
    **play_kwargs,
) -> list[TrajectoryLog]:
    """Play a skill n times without resetting the world; stop on failure."""
    if n < 1:
        raise SkillError(f"loop count must be >= 1, got {n}")
    logs: list[TrajectoryLog] = []
    for _ in range(n):
        log = play(skill, world, sim, time_scale=time_scale, **play_kwargs)
        logs.append(log)
        if not log.outcome.is_success:
            break
    return logs


def compose(skills: list[Skill]) -> Skill:
    """Concatenate skills; the symbolic effect is the left-to-right product.

    The composite's entrance is the first skill's entrance and its exit is
    the last skill's exit, matching funnel composition.
    """
    if not skills:
        raise SkillError("compose: empty skill list")
    widths = {s.actuator_count for s in skills}
    if len(widths) != 1:
        raise SkillError("compose: skills disagree on actuator count")

    keyframes: list[Keyframe] = []
    for s in skills:
        keyframes.extend(s.keyframes)

    effect = IDENTITY_EFFECT
    for s in skills:
        effect = _compose_effects(effect, s.symbolic_effect)

    return Skill(
        name="+".join(s.name for s in skills),
        keyframes=tuple(keyframes),
        symbolic_effect=effect,
        entrance_predicate=skills[0].entrance_predicate,
        exit_predicate=skills[-1].exit_predicate,
    )


def _compose_effects(first: SymbolicEffect, second: SymbolicEffect) -> SymbolicEffect:
    """Product of two effects when it stays in the single-axis encoding."""
    if first.is_identity:
        return second
    if second.is_identity:
        return first
    if first.axis == second.axis:
        return SymbolicEffect(first.axis, first.quarter_turns + second.quarter_turns)
    raise SkillError(
        "compose: mixed-axis symbolic effects need the full rotation group; "
        "compose their matrices via planarhand.cubes instead"
    )


# ---------------------------------------------------------------------------
# Skill files
# ---------------------------------------------------------------------------

def skill_to_dict(skill: Skill) -> dict:
    skill.validate()
    return {
        "format_version": SKILL_FORMAT_VERSION,
        "name": skill.name,
        "actuator_count": skill.actuator_count,
        "keyframes": [
            {
                "label": k.label,
                "airmass": list(k.airmass.values),
                "duration_s": k.transition_duration,
            }
            for k in skill.keyframes
        ],
        "symbolic_effect": {
            "axis": skill.symbolic_effect.axis,
            "quarter_turns": skill.symbolic_effect.quarter_turns,
        },
        "entrance": _region_to_dict(skill.entrance_predicate),
        "exit": _region_to_dict(skill.exit_predicate),
    }


def skill_from_dict(doc: dict) -> Skill:
    if not isinstance(doc, dict):
        raise SkillError("skill document must be an object")
    for key in ("name", "actuator_count", "keyframes", "symbolic_effect", "entrance", "exit"):
        if key not in doc:
            raise SkillError(f"skill document missing required field '{key}'")
    version = doc.get("format_version", SKILL_FORMAT_VERSION)
    if version != SKILL_FORMAT_VERSION:
        raise SkillError(f"unsupported skill format_version {version}")
    count = int(doc["actuator_count"])
    frames = []
    for i, kdoc in enumerate(doc["keyframes"]):
        air = kdoc.get("airmass")
        if air is None or len(air) != count:
            raise SkillError(f"keyframes[{i}]: airmass must have {count} entries")
        if "duration_s" not in kdoc:
            raise SkillError(f"keyframes[{i}]: missing duration_s")
        frames.append(
            Keyframe(
                airmass=AirMassVector(air),
                transition_duration=float(kdoc["duration_s"]),
                label=str(kdoc.get("label", "")),
            )
        )
    eff = doc["symbolic_effect"]
    skill = Skill(
        name=str(doc["name"]),
        keyframes=tuple(frames),
        symbolic_effect=SymbolicEffect(str(eff["axis"]), int(eff["quarter_turns"])),
        entrance_predicate=_region_from_dict(doc["entrance"]),
        exit_predicate=_region_from_dict(doc["exit"]),
    )
    skill.validate()
    return skill


def _region_to_dict(region: PoseRegion | None) -> dict | None:
    if region is None:
        return None
    return {
        "x": list(region.x_range),
        "y": list(region.y_range),
        "theta": list(region.theta_range),
    }


def _region_from_dict(doc: dict | None) -> PoseRegion | None:
    if doc is None:
        return None
    try:
        region = PoseRegion(
            x_range=(float(doc["x"][0]), float(doc["x"][1])),
            y_range=(float(doc["y"][0]), float(doc["y"][1])),
            theta_range=(float(doc["theta"][0]), float(doc["theta"][1])),
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise SkillError(f"malformed pose region: {exc}") from exc
    region.validate()
    return region


def save_skill(skill: Skill, path: str | Path) -> None:
    Path(path).write_text(json.dumps(skill_to_dict(skill), indent=2) + "\n")


def load_skill(path_or_text: str | Path) -> Skill:
    if isinstance(path_or_text, Path):
        text = path_or_text.read_text()
    else:
        stripped = path_or_text.lstrip()
        text = path_or_text if stripped.startswith("{") else Path(path_or_text).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SkillError(f"skill file: malformed JSON ({exc})") from exc
    return skill_from_dict(doc)
