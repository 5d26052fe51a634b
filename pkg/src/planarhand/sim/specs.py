"""Hand and object specifications: validation, JSON round-trip, actuation maps.

A hand is a palm polygon plus digits; each digit is a chain of capsule
links with one torsional-spring joint per link. Joint rest angle and
stiffness are affine in the owning actuator's inflation level, so a full
inflation vector determines the hand's free-motion pose and its stiffness
profile at the same time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import polygon_is_convex

SCHEMA_VERSION = 1


class SpecError(ValueError):
    """A document failed validation; the message names the offending field."""


@dataclass(frozen=True)
class JointSpec:
    actuator_index: int
    rest_angle_min: float
    rest_angle_max: float
    stiffness_min: float
    stiffness_max: float
    damping: float
    angle_limits: tuple[float, float]

    def validate(self, where: str) -> None:
        if self.stiffness_min <= 0.0:
            raise SpecError(f"{where}.stiffness_min must be > 0, got {self.stiffness_min}")
        if self.stiffness_max < self.stiffness_min:
            raise SpecError(f"{where}.stiffness_max < stiffness_min")
        if self.damping < 0.0:
            raise SpecError(f"{where}.damping must be >= 0")
        lo, hi = self.angle_limits
        if lo >= hi:
            raise SpecError(f"{where}.angle_limits must satisfy lo < hi")
        rest_lo = min(self.rest_angle_min, self.rest_angle_max)
        rest_hi = max(self.rest_angle_min, self.rest_angle_max)
        if rest_lo < lo or rest_hi > hi:
            raise SpecError(f"{where}.angle_limits must contain the rest-angle range")


@dataclass(frozen=True)
class DigitSpec:
    base_x: float
    base_y: float
    base_angle: float
    links: tuple[tuple[float, float], ...]  # (length, width) per link
    joints: tuple[JointSpec, ...]
    friction_coefficient: float
    name: str = ""

    def validate(self, where: str) -> None:
        if len(self.joints) != len(self.links):
            raise SpecError(f"{where}: joints ({len(self.joints)}) != links ({len(self.links)})")
        if not self.links:
            raise SpecError(f"{where}: digit needs at least one link")
        for i, (length, width) in enumerate(self.links):
            if length <= 0.0 or width <= 0.0:
                raise SpecError(f"{where}.links[{i}]: length and width must be > 0")
        if self.friction_coefficient < 0.0:
            raise SpecError(f"{where}.friction_coefficient must be >= 0")
        for i, joint in enumerate(self.joints):
            joint.validate(f"{where}.joints[{i}]")


@dataclass(frozen=True)
class HandSpec:
    name: str
    actuator_count: int
    palm_polygon: tuple[tuple[float, float], ...]
    digits: tuple[DigitSpec, ...]

    def validate(self) -> None:
        if len(self.palm_polygon) < 3 or not polygon_is_convex(list(self.palm_polygon)):
            raise SpecError("palm_polygon must be a CCW convex polygon with >= 3 vertices")
        used = set()
        for d, digit in enumerate(self.digits):
            digit.validate(f"digits[{d}]")
            for j, joint in enumerate(digit.joints):
                if not (0 <= joint.actuator_index < self.actuator_count):
                    raise SpecError(
                        f"digits[{d}].joints[{j}].actuator_index {joint.actuator_index} "
                        f"out of range [0, {self.actuator_count})"
                    )
                used.add(joint.actuator_index)
        if len(used) != self.actuator_count:
            raise SpecError(
                f"actuator_count is {self.actuator_count} but digits reference "
                f"{len(used)} distinct actuators"
            )

    @property
    def joint_count(self) -> int:
        return sum(len(d.joints) for d in self.digits)

    def joint_list(self) -> list[JointSpec]:
        out: list[JointSpec] = []
        for d in self.digits:
            out.extend(d.joints)
        return out


@dataclass(frozen=True)
class ObjectSpec:
    label: str
    shape: str  # "polygon" | "disc"
    mass: float
    ground_friction: float
    surface_friction: float
    vertices: tuple[tuple[float, float], ...] = ()
    radius: float = 0.0

    def validate(self) -> None:
        if self.mass <= 0.0:
            raise SpecError(f"object '{self.label}': mass must be > 0")
        if self.ground_friction < 0.0 or self.surface_friction < 0.0:
            raise SpecError(f"object '{self.label}': frictions must be >= 0")
        if self.shape == "polygon":
            if len(self.vertices) < 3 or not polygon_is_convex(list(self.vertices)):
                raise SpecError(f"object '{self.label}': vertices must form a CCW convex polygon")
        elif self.shape == "disc":
            if self.radius <= 0.0:
                raise SpecError(f"object '{self.label}': disc radius must be > 0")
        else:
            raise SpecError(f"object '{self.label}': unknown shape '{self.shape}'")

    def width(self) -> float:
        """Smallest axis-aligned extent of the local shape, for tolerance scaling."""
        if self.shape == "disc":
            return 2.0 * self.radius
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(max(xs) - min(xs), max(ys) - min(ys))


class AirMassVector:
    """Normalized per-actuator inflation levels, each in [0, 1]."""

    __slots__ = ("values",)

    def __init__(self, values):
        vals = [float(v) for v in values]
        for i, v in enumerate(vals):
            if not (0.0 <= v <= 1.0) or math.isnan(v):
                raise SpecError(f"airmass[{i}] = {v} outside [0, 1]")
        self.values = vals

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, AirMassVector) and self.values == other.values

    def __repr__(self) -> str:
        return f"AirMassVector({self.values!r})"

    @classmethod
    def zeros(cls, n: int) -> "AirMassVector":
        return cls([0.0] * n)

    def replace(self, index: int, value: float) -> "AirMassVector":
        vals = list(self.values)
        vals[index] = value
        return AirMassVector(vals)


def rest_configuration(
    spec: HandSpec, a: AirMassVector
) -> tuple[list[float], list[float]]:
    """Per-joint (rest angle, stiffness) implied by an inflation vector.

    Both are affine in the owning actuator's level: zero inflation sits at
    the joint's minimum rest angle and stiffness, full inflation at the
    maximum.
    """
    if len(a) != spec.actuator_count:
        raise SpecError(
            f"airmass length {len(a)} != actuator_count {spec.actuator_count}"
        )
    rests: list[float] = []
    stiffs: list[float] = []
    for digit in spec.digits:
        for joint in digit.joints:
            level = a[joint.actuator_index]
            rests.append(
                joint.rest_angle_min
                + level * (joint.rest_angle_max - joint.rest_angle_min)
            )
            stiffs.append(
                joint.stiffness_min
                + level * (joint.stiffness_max - joint.stiffness_min)
            )
    return rests, stiffs


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------

def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise SpecError(f"{where}: missing required field '{key}'")
    return doc[key]


def hand_spec_from_dict(doc: dict) -> HandSpec:
    if not isinstance(doc, dict):
        raise SpecError("hand spec: document must be an object")
    digits = []
    for d, digit_doc in enumerate(_require(doc, "digits", "hand spec")):
        where = f"digits[{d}]"
        joints = []
        for j, joint_doc in enumerate(_require(digit_doc, "joints", where)):
            jw = f"{where}.joints[{j}]"
            joints.append(
                JointSpec(
                    actuator_index=int(_require(joint_doc, "actuator_index", jw)),
                    rest_angle_min=float(_require(joint_doc, "rest_angle_min", jw)),
                    rest_angle_max=float(_require(joint_doc, "rest_angle_max", jw)),
                    stiffness_min=float(_require(joint_doc, "stiffness_min", jw)),
                    stiffness_max=float(_require(joint_doc, "stiffness_max", jw)),
                    damping=float(_require(joint_doc, "damping", jw)),
                    angle_limits=tuple(float(v) for v in _require(joint_doc, "angle_limits", jw)),
                )
            )
        base = _require(digit_doc, "base_pose", where)
        digits.append(
            DigitSpec(
                base_x=float(base[0]),
                base_y=float(base[1]),
                base_angle=float(base[2]),
                links=tuple((float(l), float(w)) for l, w in _require(digit_doc, "links", where)),
                joints=tuple(joints),
                friction_coefficient=float(_require(digit_doc, "friction_coefficient", where)),
                name=str(digit_doc.get("name", "")),
            )
        )
    spec = HandSpec(
        name=str(_require(doc, "name", "hand spec")),
        actuator_count=int(_require(doc, "actuator_count", "hand spec")),
        palm_polygon=tuple(
            (float(x), float(y)) for x, y in _require(doc, "palm_polygon", "hand spec")
        ),
        digits=tuple(digits),
    )
    spec.validate()
    return spec


def hand_spec_to_dict(spec: HandSpec) -> dict:
    return {
        "format_version": SCHEMA_VERSION,
        "name": spec.name,
        "actuator_count": spec.actuator_count,
        "palm_polygon": [list(v) for v in spec.palm_polygon],
        "digits": [
            {
                "name": d.name,
                "base_pose": [d.base_x, d.base_y, d.base_angle],
                "links": [list(lw) for lw in d.links],
                "friction_coefficient": d.friction_coefficient,
                "joints": [
                    {
                        "actuator_index": j.actuator_index,
                        "rest_angle_min": j.rest_angle_min,
                        "rest_angle_max": j.rest_angle_max,
                        "stiffness_min": j.stiffness_min,
                        "stiffness_max": j.stiffness_max,
                        "damping": j.damping,
                        "angle_limits": list(j.angle_limits),
                    }
                    for j in d.joints
                ],
            }
            for d in spec.digits
        ],
    }


def load_hand_spec(path_or_text: str | Path) -> HandSpec:
    """Load and validate a hand spec from a JSON file path or JSON text."""
    text = _read_document(path_or_text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"hand spec: malformed JSON ({exc})") from exc
    return hand_spec_from_dict(doc)


def object_spec_from_dict(doc: dict) -> ObjectSpec:
    if not isinstance(doc, dict):
        raise SpecError("object spec: document must be an object")
    shape = str(_require(doc, "shape", "object spec"))
    obj = ObjectSpec(
        label=str(_require(doc, "label", "object spec")),
        shape=shape,
        mass=float(_require(doc, "mass", "object spec")),
        ground_friction=float(_require(doc, "ground_friction", "object spec")),
        surface_friction=float(_require(doc, "surface_friction", "object spec")),
        vertices=tuple((float(x), float(y)) for x, y in doc.get("vertices", [])),
        radius=float(doc.get("radius", 0.0)),
    )
    obj.validate()
    return obj


def object_spec_to_dict(obj: ObjectSpec) -> dict:
    doc = {
        "format_version": SCHEMA_VERSION,
        "label": obj.label,
        "shape": obj.shape,
        "mass": obj.mass,
        "ground_friction": obj.ground_friction,
        "surface_friction": obj.surface_friction,
    }
    if obj.shape == "polygon":
        doc["vertices"] = [list(v) for v in obj.vertices]
    else:
        doc["radius"] = obj.radius
    return doc


def load_object_spec(path_or_text: str | Path) -> ObjectSpec:
    text = _read_document(path_or_text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"object spec: malformed JSON ({exc})") from exc
    return object_spec_from_dict(doc)


def _read_document(path_or_text: str | Path) -> str:
    if isinstance(path_or_text, Path):
        return path_or_text.read_text()
    stripped = path_or_text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return path_or_text
    return Path(path_or_text).read_text()


def square_object(label: str, side: float, mass: float,
                  ground_friction: float = 0.35, surface_friction: float = 0.55) -> ObjectSpec:
    h = 0.5 * side
    return ObjectSpec(
        label=label,
        shape="polygon",
        mass=mass,
        ground_friction=ground_friction,
        surface_friction=surface_friction,
        vertices=((-h, -h), (h, -h), (h, h), (-h, h)),
    )


def box_object(label: str, width: float, height: float, mass: float,
               ground_friction: float = 0.35, surface_friction: float = 0.55) -> ObjectSpec:
    hw, hh = 0.5 * width, 0.5 * height
    return ObjectSpec(
        label=label,
        shape="polygon",
        mass=mass,
        ground_friction=ground_friction,
        surface_friction=surface_friction,
        vertices=((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)),
    )


def disc_object(label: str, radius: float, mass: float,
                ground_friction: float = 0.35, surface_friction: float = 0.55) -> ObjectSpec:
    return ObjectSpec(
        label=label,
        shape="disc",
        mass=mass,
        ground_friction=ground_friction,
        surface_friction=surface_friction,
        radius=radius,
    )
