"""Fixed-step planar dynamics for a compliant digit hand and free objects.

The view is top-down: gravity acts out of plane and shows up only as
support-plane friction on objects. Digits are serial capsule chains whose
joints are torsional springs; the spring setpoint and stiffness follow
the current inflation vector. Contacts are resolved with an iterative
velocity-impulse solver (Coulomb friction, zero restitution) followed by
positional penetration correction applied to objects.

Everything here is deterministic: same state, same actuation, same dt
gives bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import (
    PlanarPose,
    aabb_overlap,
    collide_circle_circle,
    collide_circle_poly,
    collide_circle_segment,
    collide_poly_poly,
    collide_segment_poly,
    points_aabb,
    polygon_inertia,
    polygon_normals,
    transform_points,
    wrap_angle,
)
from .specs import AirMassVector, HandSpec, ObjectSpec, SpecError, rest_configuration

GRAVITY = 9.81
# Calibration constants for the bundled digit model; the real hardware's
# magnitudes are unknown, these are chosen for plausible quasi-static behavior.
LINK_DENSITY = 30.0          # kg/m^2 of link footprint
SPIN_ARM_FACTOR = 0.75       # effective lever arm of spin friction, x radius of gyration
LINEAR_VISCOSITY = 1.5       # 1/s, support-plane viscous decay on objects
ANGULAR_VISCOSITY = 2.5      # 1/s
PALM_FRICTION = 0.6
SOFT_LIMIT_BAND = 0.06       # rad of soft approach inside the hard angle limits
SOFT_LIMIT_FACTOR = 8.0      # soft-stop stiffness, x joint stiffness_max

VELOCITY_ITERATIONS = 16
POSITION_ITERATIONS = 3
POSITION_BETA = 0.2
PENETRATION_SLOP = 2.0e-4
MAX_CORRECTION = 2.0e-3
PLACEMENT_TOLERANCE = 1.0e-4
DIVERGENCE_FRACTION = 0.1

DEFAULT_DT = 1.0e-3


class SimulationError(ValueError):
    pass


class PlacementError(SimulationError):
    """Requested object placement overlaps another body."""


@dataclass(frozen=True)
class ContactPoint:
    position: tuple[float, float]
    normal: tuple[float, float]
    penetration_depth: float
    bodies: tuple[str, str]
    normal_impulse: float
    tangent_impulse: float


@dataclass
class WorldState:
    """Mutable snapshot of one simulation world.

    Object headings are integrated without wrapping so trajectory logs can
    report net rotation; `object_poses` exposes the wrapped convention.
    """

    joint_angles: list[float]
    joint_velocities: list[float]
    object_xy: list[list[float]]        # [x, y] per object
    object_heading: list[float]         # continuous (unwrapped) theta per object
    object_velocities: list[list[float]]  # [vx, vy, omega]
    airmass: AirMassVector
    time: float = 0.0
    contacts: list[ContactPoint] = field(default_factory=list)
    invalid: bool = False
    invalid_reason: str = ""

    @property
    def current_airmass(self) -> AirMassVector:
        return self.airmass

    @property
    def object_poses(self) -> list[PlanarPose]:
        return [
            PlanarPose(xy[0], xy[1], wrap_angle(h))
            for xy, h in zip(self.object_xy, self.object_heading)
        ]

    def copy(self) -> "WorldState":
        return WorldState(
            joint_angles=list(self.joint_angles),
            joint_velocities=list(self.joint_velocities),
            object_xy=[list(p) for p in self.object_xy],
            object_heading=list(self.object_heading),
            object_velocities=[list(v) for v in self.object_velocities],
            airmass=AirMassVector(self.airmass.values),
            time=self.time,
            contacts=list(self.contacts),
            invalid=self.invalid,
            invalid_reason=self.invalid_reason,
        )


class _ContactConstraint:
    __slots__ = (
        "obj_b", "joints_a", "obj_a",
        "px", "py", "nx", "ny", "tx", "ty",
        "rbx", "rby", "rax", "ray",
        "inv_mass_n", "inv_mass_t", "mu",
        "acc_n", "acc_t", "pen", "body_a", "body_b", "pair_key",
    )


class Simulation:
    """Precomputed hand/object constants plus the stepping engine.

    A Simulation instance is immutable after construction and holds no
    world state; many worlds can be stepped against one instance (also
    from parallel workers, each owning its world).
    """

    def __init__(self, hand: HandSpec, objects: list[ObjectSpec], dt: float = DEFAULT_DT):
        hand.validate()
        for obj in objects:
            obj.validate()
        if dt <= 0.0:
            raise SimulationError(f"dt must be > 0, got {dt}")
        self.hand = hand
        self.objects = list(objects)
        self.dt = dt

        # Flatten joints in digit order; record chain structure.
        self.joint_specs = hand.joint_list()
        self.n_joints = len(self.joint_specs)
        self.digit_joint_start: list[int] = []
        idx = 0
        for digit in hand.digits:
            self.digit_joint_start.append(idx)
            idx += len(digit.joints)

        # Per-joint effective inertia: distal sub-chain about the joint,
        # straight configuration (diagonal approximation of the chain).
        self.joint_inertia: list[float] = []
        for d, digit in enumerate(hand.digits):
            lengths = [l for l, _ in digit.links]
            masses = [LINK_DENSITY * l * w for l, w in digit.links]
            for j in range(len(digit.joints)):
                inertia = 0.0
                offset = 0.0
                for k in range(j, len(digit.links)):
                    lk = lengths[k]
                    centroid = offset + 0.5 * lk
                    inertia += masses[k] * (centroid * centroid + lk * lk / 12.0)
                    offset += lk
                self.joint_inertia.append(max(inertia, 1.0e-7))

        self.palm_verts = [tuple(v) for v in hand.palm_polygon]
        self.palm_normals = polygon_normals(self.palm_verts)
        self.palm_aabb = points_aabb(self.palm_verts)

        self.obj_inertia: list[float] = []
        self.obj_inv_mass: list[float] = []
        self.obj_inv_inertia: list[float] = []
        self.obj_local_verts: list[list[tuple[float, float]] | None] = []
        self.obj_min_dim: list[float] = []
        for obj in objects:
            if obj.shape == "polygon":
                verts = [tuple(v) for v in obj.vertices]
                inertia = polygon_inertia(verts, obj.mass)
                self.obj_local_verts.append(verts)
            else:
                inertia = 0.5 * obj.mass * obj.radius * obj.radius
                self.obj_local_verts.append(None)
            self.obj_inertia.append(inertia)
            self.obj_inv_mass.append(1.0 / obj.mass)
            self.obj_inv_inertia.append(1.0 / inertia)
            self.obj_min_dim.append(obj.width())

        self.divergence_limit = (
            DIVERGENCE_FRACTION * min(self.obj_min_dim) if objects else math.inf
        )

    # -- state construction -------------------------------------------------

    def initial_state(self, airmass: AirMassVector | None = None) -> WorldState:
        """World at rest with every joint exactly at its rest angle."""
        a = airmass if airmass is not None else AirMassVector.zeros(self.hand.actuator_count)
        rests, _ = rest_configuration(self.hand, a)
        return WorldState(
            joint_angles=list(rests),
            joint_velocities=[0.0] * self.n_joints,
            object_xy=[[0.0, 0.0] for _ in self.objects],
            object_heading=[0.0] * len(self.objects),
            object_velocities=[[0.0, 0.0, 0.0] for _ in self.objects],
            airmass=a,
        )

    def set_actuation(self, world: WorldState, a: AirMassVector) -> WorldState:
        if len(a) != self.hand.actuator_count:
            raise SpecError(
                f"airmass length {len(a)} != actuator_count {self.hand.actuator_count}"
            )
        world.airmass = a
        return world

    def place_object(self, world: WorldState, index: int, pose: PlanarPose) -> WorldState:
        """Teleport an object; velocities are zeroed.

        Raises PlacementError when the pose overlaps a digit link, the palm,
        or another object by more than the placement tolerance.
        """
        old_xy = list(world.object_xy[index])
        old_heading = world.object_heading[index]
        world.object_xy[index] = [pose.x, pose.y]
        world.object_heading[index] = pose.theta
        world.object_velocities[index] = [0.0, 0.0, 0.0]
        contacts = self._detect(world)
        for c in contacts:
            name = f"object:{index}"
            if name in c.bodies and c.penetration_depth > PLACEMENT_TOLERANCE:
                other = c.bodies[0] if c.bodies[1] == name else c.bodies[1]
                world.object_xy[index] = old_xy
                world.object_heading[index] = old_heading
                raise PlacementError(
                    f"object {index} at ({pose.x:.4f}, {pose.y:.4f}, {pose.theta:.3f}) "
                    f"penetrates {other} by {c.penetration_depth:.2e} m"
                )
        return world

    # -- kinematics ----------------------------------------------------------

    def link_segments(
        self, world: WorldState
    ) -> list[list[tuple[float, float, float, float, float, float, float]]]:
        """World-space link data per digit.

        Each entry is (x1, y1, x2, y2, radius, jx, jy) where (jx, jy) is the
        link's proximal joint position (equal to (x1, y1)).
        """
        out = []
        angles = world.joint_angles
        for d, digit in enumerate(self.hand.digits):
            start = self.digit_joint_start[d]
            x, y = digit.base_x, digit.base_y
            phi = digit.base_angle
            links = []
            for l, (length, width) in enumerate(digit.links):
                phi += angles[start + l]
                nx_ = math.cos(phi)
                ny_ = math.sin(phi)
                x2 = x + length * nx_
                y2 = y + length * ny_
                links.append((x, y, x2, y2, 0.5 * width, x, y))
                x, y = x2, y2
            out.append(links)
        return out

    def joint_positions(self, world: WorldState) -> list[list[tuple[float, float]]]:
        segs = self.link_segments(world)
        return [[(s[5], s[6]) for s in digit] for digit in segs]

    def kinetic_energy(self, world: WorldState) -> float:
        e = 0.0
        for j in range(self.n_joints):
            w = world.joint_velocities[j]
            e += 0.5 * self.joint_inertia[j] * w * w
        for i, obj in enumerate(self.objects):
            vx, vy, om = world.object_velocities[i]
            e += 0.5 * obj.mass * (vx * vx + vy * vy)
            e += 0.5 * self.obj_inertia[i] * om * om
        return e

    # -- stepping ------------------------------------------------------------

    def step(self, world: WorldState, dt: float | None = None) -> WorldState:
        """Advance the world by one fixed step (in place; also returned)."""
        h = self.dt if dt is None else dt
        if h <= 0.0:
            raise SimulationError(f"dt must be > 0, got {h}")
        if world.invalid:
            return world

        angles = world.joint_angles
        omegas = world.joint_velocities
        rests, stiffs = rest_configuration(self.hand, world.airmass)

        # Joint springs with semi-implicit damping and a soft stop band
        # just inside the hard angle limits.
        for j, spec in enumerate(self.joint_specs):
            theta = angles[j]
            torque = stiffs[j] * (rests[j] - theta)
            lo, hi = spec.angle_limits
            if theta > hi - SOFT_LIMIT_BAND:
                torque -= SOFT_LIMIT_FACTOR * spec.stiffness_max * (theta - (hi - SOFT_LIMIT_BAND))
            elif theta < lo + SOFT_LIMIT_BAND:
                torque += SOFT_LIMIT_FACTOR * spec.stiffness_max * ((lo + SOFT_LIMIT_BAND) - theta)
            inv_i = 1.0 / self.joint_inertia[j]
            w = omegas[j] + h * torque * inv_i
            omegas[j] = w / (1.0 + h * spec.damping * inv_i)

        # Support-plane friction on objects: Coulomb plus a small viscous
        # tail (gravity is out of plane, so this is where it acts).
        for i, obj in enumerate(self.objects):
            vel = world.object_velocities[i]
            vx, vy, om = vel
            mu_g = obj.ground_friction
            dv = mu_g * GRAVITY * h
            speed = math.hypot(vx, vy)
            if speed <= dv:
                vx = vy = 0.0
            else:
                scale = (speed - dv) / speed
                vx *= scale
                vy *= scale
            r_gyr = math.sqrt(self.obj_inertia[i] * self.obj_inv_mass[i])
            dw = mu_g * GRAVITY * SPIN_ARM_FACTOR / r_gyr * h
            if abs(om) <= dw:
                om = 0.0
            else:
                om -= math.copysign(dw, om)
            vx /= 1.0 + LINEAR_VISCOSITY * h
            vy /= 1.0 + LINEAR_VISCOSITY * h
            om /= 1.0 + ANGULAR_VISCOSITY * h
            vel[0], vel[1], vel[2] = vx, vy, om

        # Contacts at the current configuration.
        constraints = self._build_constraints(world)

        for _ in range(VELOCITY_ITERATIONS):
            for c in constraints:
                self._solve_contact(world, c)

        # Integrate positions; hard-clamp joint angles at their limits.
        for j, spec in enumerate(self.joint_specs):
            theta = angles[j] + h * omegas[j]
            lo, hi = spec.angle_limits
            if theta < lo:
                theta = lo
                if omegas[j] < 0.0:
                    omegas[j] = 0.0
            elif theta > hi:
                theta = hi
                if omegas[j] > 0.0:
                    omegas[j] = 0.0
            angles[j] = theta
        for i in range(len(self.objects)):
            vel = world.object_velocities[i]
            xy = world.object_xy[i]
            xy[0] += h * vel[0]
            xy[1] += h * vel[1]
            world.object_heading[i] += h * vel[2]

        # Positional penetration correction (objects only).
        worst_pen = self._correct_positions(world)
        if worst_pen > self.divergence_limit:
            world.invalid = True
            world.invalid_reason = (
                f"solver divergence: penetration {worst_pen:.2e} m exceeds "
                f"{self.divergence_limit:.2e} m at t={world.time + h:.4f}"
            )

        world.contacts = [
            ContactPoint(
                position=(c.px, c.py),
                normal=(c.nx, c.ny),
                penetration_depth=c.pen,
                bodies=(c.body_a, c.body_b),
                normal_impulse=c.acc_n,
                tangent_impulse=c.acc_t,
            )
            for c in constraints
        ]
        world.time += h
        return world

    # -- contact machinery ----------------------------------------------------

    def _object_world_shape(self, world: WorldState, i: int):
        obj = self.objects[i]
        x, y = world.object_xy[i]
        if obj.shape == "disc":
            return ((x, y), obj.radius, None, None)
        verts = transform_points(self.obj_local_verts[i], x, y, world.object_heading[i])
        return (None, 0.0, verts, polygon_normals(verts))

    def _detect_raw(self, world: WorldState):
        """All contacts as (body_a_tag, body_b_tag, contact tuples).

        body tags: ("palm",), ("link", d, l), ("object", i). Normals point
        from A toward B; objects are always the B side against hand parts.
        """
        found = []
        segs = self.link_segments(world)
        seg_aabbs = []
        for d, digit in enumerate(segs):
            row = []
            for (x1, y1, x2, y2, r, _, _) in digit:
                row.append(
                    (min(x1, x2) - r, min(y1, y2) - r, max(x1, x2) + r, max(y1, y2) + r)
                )
            seg_aabbs.append(row)

        shapes = [self._object_world_shape(world, i) for i in range(len(self.objects))]
        aabbs = []
        for i, obj in enumerate(self.objects):
            center, radius, verts, _ = shapes[i]
            if verts is None:
                aabbs.append(
                    (center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius)
                )
            else:
                aabbs.append(points_aabb(verts))

        for i, obj in enumerate(self.objects):
            center, radius, verts, normals = shapes[i]
            # palm
            if aabb_overlap(aabbs[i], self.palm_aabb):
                if verts is None:
                    cs = collide_circle_poly(center, radius, self.palm_verts, self.palm_normals)
                    cs = [(px, py, -nx, -ny, pen) for px, py, nx, ny, pen in cs]
                else:
                    cs = collide_poly_poly(self.palm_verts, self.palm_normals, verts, normals)
                if cs:
                    found.append((("palm",), ("object", i), cs))
            # digit links
            for d in range(len(segs)):
                for l, seg in enumerate(segs[d]):
                    if not aabb_overlap(aabbs[i], seg_aabbs[d][l]):
                        continue
                    x1, y1, x2, y2, r, _, _ = seg
                    if verts is None:
                        cs = collide_circle_segment(center, radius, (x1, y1), (x2, y2), r)
                        cs = [(px, py, -nx, -ny, pen) for px, py, nx, ny, pen in cs]
                    else:
                        cs = collide_segment_poly((x1, y1), (x2, y2), r, verts, normals)
                    if cs:
                        found.append((("link", d, l), ("object", i), cs))
            # other objects
            for k in range(i + 1, len(self.objects)):
                if not aabb_overlap(aabbs[i], aabbs[k]):
                    continue
                center_k, radius_k, verts_k, normals_k = shapes[k]
                if verts is None and verts_k is None:
                    cs = collide_circle_circle(center, radius, center_k, radius_k)
                elif verts is None:
                    cs = collide_circle_poly(center, radius, verts_k, normals_k)
                elif verts_k is None:
                    cs = collide_circle_poly(center_k, radius_k, verts, normals)
                    cs = [(px, py, -nx, -ny, pen) for px, py, nx, ny, pen in cs]
                else:
                    cs = collide_poly_poly(verts, normals, verts_k, normals_k)
                if cs:
                    found.append((("object", i), ("object", k), cs))
        return found, segs

    def _detect(self, world: WorldState) -> list[ContactPoint]:
        found, _ = self._detect_raw(world)
        out = []
        for tag_a, tag_b, cs in found:
            for px, py, nx, ny, pen in cs:
                out.append(
                    ContactPoint(
                        position=(px, py),
                        normal=(nx, ny),
                        penetration_depth=pen,
                        bodies=(self._body_name(tag_a), self._body_name(tag_b)),
                        normal_impulse=0.0,
                        tangent_impulse=0.0,
                    )
                )
        return out

    def _body_name(self, tag) -> str:
        if tag[0] == "palm":
            return "palm"
        if tag[0] == "link":
            digit = self.hand.digits[tag[1]]
            name = digit.name or f"digit{tag[1]}"
            return f"{name}:link{tag[2]}"
        return f"object:{tag[1]}"

    def _pair_friction(self, tag_a, tag_b) -> float:
        def mu_of(tag):
            if tag[0] == "palm":
                return PALM_FRICTION
            if tag[0] == "link":
                return self.hand.digits[tag[1]].friction_coefficient
            return self.objects[tag[1]].surface_friction

        return math.sqrt(mu_of(tag_a) * mu_of(tag_b))

    def _build_constraints(self, world: WorldState) -> list[_ContactConstraint]:
        found, segs = self._detect_raw(world)
        constraints: list[_ContactConstraint] = []
        for tag_a, tag_b, cs in found:
            mu = self._pair_friction(tag_a, tag_b)
            for px, py, nx, ny, pen in cs:
                c = _ContactConstraint()
                c.px, c.py, c.nx, c.ny, c.pen = px, py, nx, ny, pen
                c.tx, c.ty = -ny, nx
                c.mu = mu
                c.acc_n = 0.0
                c.acc_t = 0.0
                c.body_a = self._body_name(tag_a)
                c.body_b = self._body_name(tag_b)
                c.pair_key = (tag_a, tag_b)

                inv_n = 0.0
                inv_t = 0.0

                # B side is always an object.
                bi = tag_b[1]
                c.obj_b = bi
                rbx = px - world.object_xy[bi][0]
                rby = py - world.object_xy[bi][1]
                c.rbx, c.rby = rbx, rby
                cross_bn = rbx * ny - rby * nx
                cross_bt = rbx * c.ty - rby * c.tx
                inv_n += self.obj_inv_mass[bi] + cross_bn * cross_bn * self.obj_inv_inertia[bi]
                inv_t += self.obj_inv_mass[bi] + cross_bt * cross_bt * self.obj_inv_inertia[bi]

                if tag_a[0] == "object":
                    ai = tag_a[1]
                    c.obj_a = ai
                    c.joints_a = None
                    rax = px - world.object_xy[ai][0]
                    ray = py - world.object_xy[ai][1]
                    c.rax, c.ray = rax, ray
                    cross_an = rax * ny - ray * nx
                    cross_at = rax * c.ty - ray * c.tx
                    inv_n += self.obj_inv_mass[ai] + cross_an * cross_an * self.obj_inv_inertia[ai]
                    inv_t += self.obj_inv_mass[ai] + cross_at * cross_at * self.obj_inv_inertia[ai]
                elif tag_a[0] == "link":
                    c.obj_a = -1
                    d, l = tag_a[1], tag_a[2]
                    start = self.digit_joint_start[d]
                    joints = []
                    for j in range(l + 1):
                        jx, jy = segs[d][j][5], segs[d][j][6]
                        rjx = px - jx
                        rjy = py - jy
                        gj = start + j
                        inv_i = 1.0 / self.joint_inertia[gj]
                        s_n = rjx * ny - rjy * nx
                        s_t = rjx * c.ty - rjy * c.tx
                        inv_n += s_n * s_n * inv_i
                        inv_t += s_t * s_t * inv_i
                        joints.append((gj, rjx, rjy, inv_i))
                    c.joints_a = joints
                else:  # palm: static
                    c.obj_a = -1
                    c.joints_a = None

                c.inv_mass_n = inv_n
                c.inv_mass_t = inv_t
                constraints.append(c)
        return constraints

    def _solve_contact(self, world: WorldState, c: _ContactConstraint) -> None:
        ov = world.object_velocities
        bvel = ov[c.obj_b]
        vbx = bvel[0] - bvel[2] * c.rby
        vby = bvel[1] + bvel[2] * c.rbx

        vax = vay = 0.0
        if c.obj_a >= 0:
            avel = ov[c.obj_a]
            vax = avel[0] - avel[2] * c.ray
            vay = avel[1] + avel[2] * c.rax
        elif c.joints_a is not None:
            jv = world.joint_velocities
            for gj, rjx, rjy, _ in c.joints_a:
                w = jv[gj]
                vax += -w * rjy
                vay += w * rjx

        relx = vbx - vax
        rely = vby - vay

        # Normal: drive approach velocity to zero (no restitution).
        vn = relx * c.nx + rely * c.ny
        dlam = -vn / c.inv_mass_n
        new_acc = c.acc_n + dlam
        if new_acc < 0.0:
            new_acc = 0.0
        dlam = new_acc - c.acc_n
        c.acc_n = new_acc
        if dlam != 0.0:
            self._apply_impulse(world, c, dlam * c.nx, dlam * c.ny)

        # Tangent: Coulomb clamp against the accumulated normal impulse.
        bvel = ov[c.obj_b]
        vbx = bvel[0] - bvel[2] * c.rby
        vby = bvel[1] + bvel[2] * c.rbx
        vax = vay = 0.0
        if c.obj_a >= 0:
            avel = ov[c.obj_a]
            vax = avel[0] - avel[2] * c.ray
            vay = avel[1] + avel[2] * c.rax
        elif c.joints_a is not None:
            jv = world.joint_velocities
            for gj, rjx, rjy, _ in c.joints_a:
                w = jv[gj]
                vax += -w * rjy
                vay += w * rjx
        relx = vbx - vax
        rely = vby - vay
        vt = relx * c.tx + rely * c.ty
        dlam = -vt / c.inv_mass_t
        max_t = c.mu * c.acc_n
        new_acc = c.acc_t + dlam
        if new_acc > max_t:
            new_acc = max_t
        elif new_acc < -max_t:
            new_acc = -max_t
        dlam = new_acc - c.acc_t
        c.acc_t = new_acc
        if dlam != 0.0:
            self._apply_impulse(world, c, dlam * c.tx, dlam * c.ty)

    def _apply_impulse(self, world: WorldState, c: _ContactConstraint, px: float, py: float) -> None:
        bvel = world.object_velocities[c.obj_b]
        inv_m = self.obj_inv_mass[c.obj_b]
        inv_i = self.obj_inv_inertia[c.obj_b]
        bvel[0] += px * inv_m
        bvel[1] += py * inv_m
        bvel[2] += (c.rbx * py - c.rby * px) * inv_i
        if c.obj_a >= 0:
            avel = world.object_velocities[c.obj_a]
            inv_m = self.obj_inv_mass[c.obj_a]
            inv_i = self.obj_inv_inertia[c.obj_a]
            avel[0] -= px * inv_m
            avel[1] -= py * inv_m
            avel[2] -= (c.rax * py - c.ray * px) * inv_i
        elif c.joints_a is not None:
            jv = world.joint_velocities
            for gj, rjx, rjy, inv_ij in c.joints_a:
                jv[gj] -= (rjx * py - rjy * px) * inv_ij

    def _correct_positions(self, world: WorldState) -> float:
        """Push objects out of penetration; returns the worst penetration seen."""
        worst = 0.0
        for it in range(POSITION_ITERATIONS):
            found, _ = self._detect_raw(world)
            deepest = 0.0
            for tag_a, tag_b, cs in found:
                for px, py, nx, ny, pen in cs:
                    if pen > deepest:
                        deepest = pen
                    err = pen - PENETRATION_SLOP
                    if err <= 0.0:
                        continue
                    move = POSITION_BETA * err
                    if move > MAX_CORRECTION:
                        move = MAX_CORRECTION
                    bi = tag_b[1]
                    if tag_a[0] == "object":
                        ai = tag_a[1]
                        wa = self.obj_inv_mass[ai]
                        wb = self.obj_inv_mass[bi]
                        share = move / (wa + wb)
                        world.object_xy[ai][0] -= nx * share * wa
                        world.object_xy[ai][1] -= ny * share * wa
                        world.object_xy[bi][0] += nx * share * wb
                        world.object_xy[bi][1] += ny * share * wb
                    else:
                        world.object_xy[bi][0] += nx * move
                        world.object_xy[bi][1] += ny * move
            if it == 0:
                worst = deepest
            if deepest <= PENETRATION_SLOP:
                break
        return worst
