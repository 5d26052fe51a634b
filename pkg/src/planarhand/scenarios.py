"""Bundled fixtures: the default hand, object set, and skill library.

A Scenario bundles everything a rollout needs (hand, objects, nominal
start pose, step size) so sweeps and the funnel lab can construct fresh
worlds cheaply and deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .sim import (
    AirMassVector,
    HandSpec,
    ObjectSpec,
    PlanarPose,
    Simulation,
    WorldState,
    hand_spec_from_dict,
    object_spec_from_dict,
)
from .skills import Skill, skill_from_dict

DEFAULT_HAND_NAME = "planar_rbo"
NOMINAL_START = PlanarPose(0.0, 0.052, 0.0)
HAND_SPEC_ENV_VAR = "PLANARHAND_HAND_SPEC"


def _data_text(relative: str) -> str:
    return resources.files("planarhand.data").joinpath(relative).read_text()


def bundled_hand(name: str = DEFAULT_HAND_NAME) -> HandSpec:
    return hand_spec_from_dict(json.loads(_data_text(f"hands/{name}.json")))


def bundled_object(label: str) -> ObjectSpec:
    return object_spec_from_dict(json.loads(_data_text(f"objects/{label}.json")))


def bundled_object_labels() -> list[str]:
    root = resources.files("planarhand.data").joinpath("objects")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_skill(name: str) -> Skill:
    return skill_from_dict(json.loads(_data_text(f"skills/{name}.json")))


def bundled_skill_names() -> list[str]:
    root = resources.files("planarhand.data").joinpath("skills")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


@dataclass
class Scenario:
    """A reproducible rollout context: hand + objects + nominal placement."""

    hand: HandSpec
    objects: list[ObjectSpec]
    start_pose: PlanarPose = NOMINAL_START
    start_airmass: AirMassVector | None = None
    dt: float = 1.0e-3
    object_index: int = 0
    presettle_time: float = 0.3
    _sim: Simulation | None = field(default=None, repr=False, compare=False)

    @property
    def sim(self) -> Simulation:
        if self._sim is None:
            self._sim = Simulation(self.hand, self.objects, dt=self.dt)
        return self._sim

    def make_world(self, pose: PlanarPose | None = None) -> WorldState:
        """Fresh world with the hand pre-settled and the object placed.

        The hand is settled under the start inflation before placement so
        entrance sampling measures the skill, not the hand's wake-up
        transient. Placement raises PlacementError on overlap.
        """
        sim = self.sim
        airmass = self.start_airmass or AirMassVector.zeros(self.hand.actuator_count)
        world = sim.initial_state(airmass)
        n = int(round(self.presettle_time / self.dt))
        for _ in range(n):
            sim.step(world)
        world.time = 0.0
        sim.place_object(world, self.object_index, pose or self.start_pose)
        return world

    def with_object(self, obj: ObjectSpec) -> "Scenario":
        return Scenario(
            hand=self.hand,
            objects=[obj] + self.objects[1:],
            start_pose=self.start_pose,
            start_airmass=self.start_airmass,
            dt=self.dt,
            object_index=self.object_index,
            presettle_time=self.presettle_time,
        )


def default_scenario(
    object_label: str = "cube45",
    dt: float = 1.0e-3,
    skill: Skill | None = None,
) -> Scenario:
    """The bundled spin/shift stage: planar-rbo hand plus one manipulandum."""
    if skill is None:
        try:
            skill = bundled_skill("spin")
        except FileNotFoundError:
            skill = None
    start_airmass = None
    if skill is not None:
        start_airmass = AirMassVector(skill.keyframes[0].airmass.values)
    return Scenario(
        hand=bundled_hand(),
        objects=[bundled_object(object_label)],
        start_airmass=start_airmass,
        dt=dt,
    )
