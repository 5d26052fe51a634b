"""Regenerate the bundled planar-rbo hand and object fixtures.

Run from the repo root:  python tools/build_default_hand.py
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from planarhand.sim import hand_spec_from_dict, hand_spec_to_dict, object_spec_to_dict
from planarhand.sim.specs import box_object, disc_object, square_object

DATA = Path(__file__).resolve().parents[1] / "src" / "planarhand" / "data"

FINGER_X = {"little": -0.033, "ring": -0.011, "middle": 0.011, "index": 0.033}
FINGER_LINKS = [[0.034, 0.014], [0.030, 0.014], [0.026, 0.014]]
THUMB_LINKS = [[0.040, 0.016], [0.034, 0.016], [0.030, 0.016]]

# Finger joints share one range so full deflation folds the digit by about
# 180 degrees toward +x and a=0.7 is exactly straight.
FINGER_JOINT = {
    "rest_angle_min": -1.05,
    "rest_angle_max": 0.45,
    "angle_limits": [-1.35, 0.7],
}
FINGER_STIFFNESS = [0.06, 0.40]
FINGER_DAMPING = [0.006, 0.003, 0.0012]


def finger(name: str, actuators: tuple[int, int]) -> dict:
    prox, dist = actuators
    joints = []
    for j in range(3):
        joints.append(
            {
                "actuator_index": prox if j < 2 else dist,
                "rest_angle_min": FINGER_JOINT["rest_angle_min"],
                "rest_angle_max": FINGER_JOINT["rest_angle_max"],
                "stiffness_min": FINGER_STIFFNESS[0],
                "stiffness_max": FINGER_STIFFNESS[1],
                "damping": FINGER_DAMPING[j],
                "angle_limits": FINGER_JOINT["angle_limits"],
            }
        )
    return {
        "name": name,
        "base_pose": [FINGER_X[name], 0.0, math.pi / 2],
        "links": FINGER_LINKS,
        "friction_coefficient": 0.9,
        "joints": joints,
    }


def thumb() -> dict:
    return {
        "name": "thumb",
        "base_pose": [0.068, 0.004, math.pi / 2],
        "links": THUMB_LINKS,
        "friction_coefficient": 0.9,
        "joints": [
            {
                # Base rotation: parked along +y when deflated, swept across
                # the palm front (toward -x) when inflated.
                "actuator_index": 8,
                "rest_angle_min": 0.0,
                "rest_angle_max": 1.45,
                "stiffness_min": 0.12,
                "stiffness_max": 0.60,
                "damping": 0.012,
                "angle_limits": [-0.15, 1.65],
            },
            {
                # Flexion hooks the tip toward +y once the thumb points -x.
                "actuator_index": 9,
                "rest_angle_min": 0.0,
                "rest_angle_max": -1.0,
                "stiffness_min": 0.08,
                "stiffness_max": 0.45,
                "damping": 0.004,
                "angle_limits": [-1.2, 0.2],
            },
            {
                "actuator_index": 10,
                "rest_angle_min": 0.0,
                "rest_angle_max": -1.0,
                "stiffness_min": 0.08,
                "stiffness_max": 0.45,
                "damping": 0.0015,
                "angle_limits": [-1.2, 0.2],
            },
        ],
    }


def build_hand() -> dict:
    doc = {
        "format_version": 1,
        "name": "planar-rbo",
        "actuator_count": 11,
        "palm_polygon": [
            [-0.075, -0.095],
            [0.075, -0.095],
            [0.075, 0.0],
            [-0.075, 0.0],
        ],
        "digits": [
            finger("little", (0, 1)),
            finger("ring", (2, 3)),
            finger("middle", (4, 5)),
            finger("index", (6, 7)),
            thumb(),
        ],
    }
    # Round-trip through the validator before writing.
    spec = hand_spec_from_dict(doc)
    return hand_spec_to_dict(spec)


def build_objects() -> dict[str, dict]:
    objs = [
        square_object("cube45", 0.045, 0.060),
        square_object("cube30", 0.030, 0.028),
        square_object("cube56", 0.056, 0.105),
        box_object("cuboid45x58", 0.045, 0.058, 0.080),
        disc_object("cylinder48", 0.024, 0.070),
        square_object("cube45-heavy", 0.045, 0.120),
        square_object("cube45-slick", 0.045, 0.060, surface_friction=0.33),
    ]
    return {o.label: object_spec_to_dict(o) for o in objs}


def main() -> None:
    (DATA / "hands").mkdir(parents=True, exist_ok=True)
    (DATA / "objects").mkdir(parents=True, exist_ok=True)
    hand_path = DATA / "hands" / "planar_rbo.json"
    hand_path.write_text(json.dumps(build_hand(), indent=2) + "\n")
    print(f"wrote {hand_path}")
    for label, doc in build_objects().items():
        path = DATA / "objects" / f"{label}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
