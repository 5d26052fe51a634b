"""Planar geometry: poses, convex polygons, and contact manifold generation.

All lengths are meters, angles radians. Points are (x, y) tuples; the
collision routines return raw contact tuples so the solver stays
allocation-light at 1 kHz stepping rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    t = math.fmod(theta, TWO_PI)
    if t <= -math.pi:
        t += TWO_PI
    elif t > math.pi:
        t -= TWO_PI
    return t


@dataclass(frozen=True)
class PlanarPose:
    """Rigid planar pose; theta is stored wrapped to (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def transform(self, px: float, py: float) -> tuple[float, float]:
        c = math.cos(self.theta)
        s = math.sin(self.theta)
        return (self.x + c * px - s * py, self.y + s * px + c * py)


# ---------------------------------------------------------------------------
# Convex polygon helpers
# ---------------------------------------------------------------------------

def polygon_is_convex(verts: list[tuple[float, float]]) -> bool:
    """True iff vertices describe a convex polygon in CCW order."""
    n = len(verts)
    if n < 3:
        return False
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        cx, cy = verts[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross <= 0.0:
            return False
    return True


def polygon_area(verts: list[tuple[float, float]]) -> float:
    acc = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def polygon_centroid(verts: list[tuple[float, float]]) -> tuple[float, float]:
    area = polygon_area(verts)
    cx = cy = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return (cx / (6.0 * area), cy / (6.0 * area))


def polygon_inertia(verts: list[tuple[float, float]], mass: float) -> float:
    """Moment of inertia about the centroid for a uniform convex polygon."""
    cx, cy = polygon_centroid(verts)
    num = 0.0
    den = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i][0] - cx, verts[i][1] - cy
        x1, y1 = verts[(i + 1) % n][0] - cx, verts[(i + 1) % n][1] - cy
        cross = x0 * y1 - x1 * y0
        num += cross * (x0 * x0 + x0 * x1 + x1 * x1 + y0 * y0 + y0 * y1 + y1 * y1)
        den += cross
    return mass * num / (6.0 * den)


def polygon_normals(verts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Outward edge normals for a CCW convex polygon."""
    out = []
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        ex, ey = x1 - x0, y1 - y0
        length = math.hypot(ex, ey)
        out.append((ey / length, -ex / length))
    return out


def transform_points(
    verts: list[tuple[float, float]], x: float, y: float, theta: float
) -> list[tuple[float, float]]:
    c = math.cos(theta)
    s = math.sin(theta)
    return [(x + c * px - s * py, y + s * px + c * py) for px, py in verts]


def rotate_points(
    verts: list[tuple[float, float]], theta: float
) -> list[tuple[float, float]]:
    c = math.cos(theta)
    s = math.sin(theta)
    return [(c * px - s * py, s * px + c * py) for px, py in verts]


def points_aabb(
    verts: list[tuple[float, float]], pad: float = 0.0
) -> tuple[float, float, float, float]:
    xs = [p[0] for p in verts]
    ys = [p[1] for p in verts]
    return (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)


def aabb_overlap(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


# ---------------------------------------------------------------------------
# Contact generation
#
# A contact is the tuple (px, py, nx, ny, penetration) with the normal
# pointing from shape A toward shape B and penetration >= 0 at generation
# time. Up to two points per pair keep flat stacking torque-stable.
# ---------------------------------------------------------------------------

Contact = tuple[float, float, float, float, float]

# Segments within ~8 degrees of a face count as flat contact (2-point manifold).
_PARALLEL_TOL = 0.15


def collide_circle_circle(
    ca: tuple[float, float], ra: float, cb: tuple[float, float], rb: float
) -> list[Contact]:
    dx = cb[0] - ca[0]
    dy = cb[1] - ca[1]
    dist = math.hypot(dx, dy)
    total = ra + rb
    if dist >= total:
        return []
    if dist < 1e-12:
        return [(ca[0], ca[1], 1.0, 0.0, total)]
    nx, ny = dx / dist, dy / dist
    mid_r = ra + 0.5 * (dist - total)
    return [(ca[0] + nx * mid_r, ca[1] + ny * mid_r, nx, ny, total - dist)]


def collide_circle_segment(
    c: tuple[float, float], rc: float, p1: tuple[float, float], p2: tuple[float, float], rs: float
) -> list[Contact]:
    """Circle (A) against a capsule spine segment (B)."""
    ex = p2[0] - p1[0]
    ey = p2[1] - p1[1]
    len2 = ex * ex + ey * ey
    if len2 < 1e-18:
        return collide_circle_circle(c, rc, p1, rs)
    t = ((c[0] - p1[0]) * ex + (c[1] - p1[1]) * ey) / len2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    qx = p1[0] + t * ex
    qy = p1[1] + t * ey
    return collide_circle_circle(c, rc, (qx, qy), rs)


def _max_face_separation(
    verts_a: list[tuple[float, float]],
    normals_a: list[tuple[float, float]],
    verts_b: list[tuple[float, float]],
) -> tuple[float, int]:
    """Best separating face of A against B's vertices: (separation, face index)."""
    best = -1e30
    best_i = 0
    for i, (nx, ny) in enumerate(normals_a):
        vx, vy = verts_a[i]
        s = 1e30
        for bx, by in verts_b:
            d = nx * (bx - vx) + ny * (by - vy)
            if d < s:
                s = d
        if s > best:
            best = s
            best_i = i
    return best, best_i


def _clip_segment(
    points: list[tuple[float, float]], nx: float, ny: float, offset: float
) -> list[tuple[float, float]]:
    """Keep the part of a 2-point segment with dot(n, p) <= offset."""
    d0 = nx * points[0][0] + ny * points[0][1] - offset
    d1 = nx * points[1][0] + ny * points[1][1] - offset
    out = []
    if d0 <= 0.0:
        out.append(points[0])
    if d1 <= 0.0:
        out.append(points[1])
    if d0 * d1 < 0.0:
        t = d0 / (d0 - d1)
        out.append(
            (
                points[0][0] + t * (points[1][0] - points[0][0]),
                points[0][1] + t * (points[1][1] - points[0][1]),
            )
        )
    return out


def collide_poly_poly(
    verts_a: list[tuple[float, float]],
    normals_a: list[tuple[float, float]],
    verts_b: list[tuple[float, float]],
    normals_b: list[tuple[float, float]],
) -> list[Contact]:
    """SAT with reference-face clipping for two sharp convex polygons."""
    sep_a, face_a = _max_face_separation(verts_a, normals_a, verts_b)
    if sep_a > 0.0:
        return []
    sep_b, face_b = _max_face_separation(verts_b, normals_b, verts_a)
    if sep_b > 0.0:
        return []

    if sep_b > sep_a + 1e-10:
        ref_verts, ref_normals, ref_face = verts_b, normals_b, face_b
        inc_verts, inc_normals = verts_a, normals_a
        flip = True
    else:
        ref_verts, ref_normals, ref_face = verts_a, normals_a, face_a
        inc_verts, inc_normals = verts_b, normals_b
        flip = False

    n_ref = len(ref_verts)
    rv1 = ref_verts[ref_face]
    rv2 = ref_verts[(ref_face + 1) % n_ref]
    rnx, rny = ref_normals[ref_face]

    # Incident edge: most anti-parallel face of the other polygon.
    inc_face = 0
    best_dot = 1e30
    for i, (inx, iny) in enumerate(inc_normals):
        d = rnx * inx + rny * iny
        if d < best_dot:
            best_dot = d
            inc_face = i
    n_inc = len(inc_verts)
    seg = [inc_verts[inc_face], inc_verts[(inc_face + 1) % n_inc]]

    # Clip against the side planes of the reference edge.
    tx = rv2[0] - rv1[0]
    ty = rv2[1] - rv1[1]
    tlen = math.hypot(tx, ty)
    tx /= tlen
    ty /= tlen
    seg = _clip_segment(seg, -tx, -ty, -(tx * rv1[0] + ty * rv1[1]))
    if len(seg) < 2:
        return []
    seg = _clip_segment(seg, tx, ty, tx * rv2[0] + ty * rv2[1])
    if len(seg) < 2:
        return []

    contacts: list[Contact] = []
    for px, py in seg:
        sep = rnx * (px - rv1[0]) + rny * (py - rv1[1])
        if sep <= 0.0:
            cx = px - 0.5 * sep * rnx
            cy = py - 0.5 * sep * rny
            if flip:
                contacts.append((cx, cy, -rnx, -rny, -sep))
            else:
                contacts.append((cx, cy, rnx, rny, -sep))
    return contacts


def collide_circle_poly(
    c: tuple[float, float],
    rc: float,
    verts: list[tuple[float, float]],
    normals: list[tuple[float, float]],
) -> list[Contact]:
    """Circle (A) against a sharp convex polygon (B); single contact point."""
    best = -1e30
    best_i = 0
    for i, (nx, ny) in enumerate(normals):
        d = nx * (c[0] - verts[i][0]) + ny * (c[1] - verts[i][1])
        if d > best:
            best = d
            best_i = i
    if best > rc:
        return []

    n = len(verts)
    v1 = verts[best_i]
    v2 = verts[(best_i + 1) % n]

    if best < 0.0:
        # Center inside: push out along the least-penetrated face.
        nx, ny = normals[best_i]
        pen = rc - best
        return [(c[0] - nx * best, c[1] - ny * best, -nx, -ny, pen)]

    # Closest point on the face segment (handles corner regions exactly).
    ex = v2[0] - v1[0]
    ey = v2[1] - v1[1]
    len2 = ex * ex + ey * ey
    t = ((c[0] - v1[0]) * ex + (c[1] - v1[1]) * ey) / len2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    qx = v1[0] + t * ex
    qy = v1[1] + t * ey
    dx = c[0] - qx
    dy = c[1] - qy
    dist = math.hypot(dx, dy)
    if dist >= rc:
        return []
    if dist < 1e-12:
        nx, ny = normals[best_i]
        return [(qx, qy, -nx, -ny, rc)]
    nx, ny = dx / dist, dy / dist
    # Normal must point from circle toward polygon.
    return [(qx, qy, -nx, -ny, rc - dist)]


def _segment_segment_closest(
    p1: tuple[float, float],
    p2: tuple[float, float],
    q1: tuple[float, float],
    q2: tuple[float, float],
) -> tuple[float, tuple[float, float], tuple[float, float]]:
    """Closest points between two segments: (distance, point on P, point on Q)."""
    best = (1e30, p1, q1)

    def point_seg(p, a, b):
        ex, ey = b[0] - a[0], b[1] - a[1]
        len2 = ex * ex + ey * ey
        if len2 < 1e-18:
            return a
        t = ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        return (a[0] + t * ex, a[1] + t * ey)

    for p in (p1, p2):
        q = point_seg(p, q1, q2)
        d = math.hypot(p[0] - q[0], p[1] - q[1])
        if d < best[0]:
            best = (d, p, q)
    for q in (q1, q2):
        p = point_seg(q, p1, p2)
        d = math.hypot(p[0] - q[0], p[1] - q[1])
        if d < best[0]:
            best = (d, p, q)
    return best


def collide_segment_poly(
    p1: tuple[float, float],
    p2: tuple[float, float],
    rs: float,
    verts: list[tuple[float, float]],
    normals: list[tuple[float, float]],
) -> list[Contact]:
    """Capsule spine segment (A) against a sharp convex polygon (B).

    Flat near-parallel contact yields a 2-point manifold so a finger pad
    pressing a face doesn't rock; corner regions use exact closest points
    so the rounded tip rolls smoothly over vertices.
    """
    # Face axes of the polygon against the two spine endpoints.
    face_sep = -1e30
    face_i = 0
    for i, (nx, ny) in enumerate(normals):
        vx, vy = verts[i]
        d1 = nx * (p1[0] - vx) + ny * (p1[1] - vy)
        d2 = nx * (p2[0] - vx) + ny * (p2[1] - vy)
        d = d1 if d1 < d2 else d2
        if d > face_sep:
            face_sep = d
            face_i = i

    # Segment axis against polygon vertices.
    ex = p2[0] - p1[0]
    ey = p2[1] - p1[1]
    elen = math.hypot(ex, ey)
    if elen < 1e-12:
        return collide_circle_poly(p1, rs, verts, normals)
    snx, sny = ey / elen, -ex / elen  # one of the two side normals
    lo = 1e30
    hi = -1e30
    for vx, vy in verts:
        d = snx * (vx - p1[0]) + sny * (vy - p1[1])
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    # Separation of polygon on either side of the spine line.
    seg_sep = max(lo, -hi)

    best_sep = max(face_sep, seg_sep)
    if best_sep > rs:
        return []

    if best_sep > 0.0:
        # Spines disjoint: confirm against exact distance (corner regions).
        n = len(verts)
        best = (1e30, p1, verts[0])
        for i in range(n):
            d, pp, qq = _segment_segment_closest(p1, p2, verts[i], verts[(i + 1) % n])
            if d < best[0]:
                best = (d, pp, qq)
        dist, sp, qp = best
        if dist >= rs:
            return []
        dx = qp[0] - sp[0]
        dy = qp[1] - sp[1]
        if dist < 1e-12:
            nx, ny = normals[face_i]
            nx, ny = -nx, -ny
        else:
            nx, ny = dx / dist, dy / dist
        pen = rs - dist

        # Near-parallel flat contact: clip for a second point.
        fnx, fny = normals[face_i]
        cosang = abs((ex * -fny + ey * fnx) / elen)  # |cos(angle seg, face tangent)|
        if face_sep == best_sep and cosang > 1.0 - _PARALLEL_TOL:
            pts = _flat_manifold(p1, p2, rs, verts, normals, face_i)
            if len(pts) >= 1:
                return pts
        return [(sp[0] + nx * (rs + 0.5 * (dist - rs)), sp[1] + ny * (rs + 0.5 * (dist - rs)), nx, ny, pen)]

    # Deep overlap: resolve along the best SAT axis.
    if face_sep >= seg_sep:
        pts = _flat_manifold(p1, p2, rs, verts, normals, face_i)
        if pts:
            return pts
        # Degenerate clip: fall back to pushing the deepest endpoint out.
        nx, ny = normals[face_i]
        vx, vy = verts[face_i]
        d1 = nx * (p1[0] - vx) + ny * (p1[1] - vy)
        d2 = nx * (p2[0] - vx) + ny * (p2[1] - vy)
        p = p1 if d1 < d2 else p2
        d = min(d1, d2)
        return [(p[0] - nx * d, p[1] - ny * d, -nx, -ny, rs - d)]

    # Segment side axis is least penetrated: push polygon off the spine side.
    if -hi > lo:
        snx, sny = -snx, -sny
        sep = -hi
    else:
        sep = lo
    pts = []
    for vx, vy in verts:
        d = snx * (vx - p1[0]) + sny * (vy - p1[1])
        if d <= sep + 1e-9:
            t = ((vx - p1[0]) * ex + (vy - p1[1]) * ey) / (elen * elen)
            if -0.05 <= t <= 1.05:
                pts.append((vx, vy, snx, sny, rs - d))
    if pts:
        return pts[:2]
    d, sp, qp = _segment_segment_closest(p1, p2, verts[0], verts[1])
    return [(qp[0], qp[1], snx, sny, rs - sep)]


def _flat_manifold(
    p1: tuple[float, float],
    p2: tuple[float, float],
    rs: float,
    verts: list[tuple[float, float]],
    normals: list[tuple[float, float]],
    face_i: int,
) -> list[Contact]:
    """Clip the spine segment to a polygon face for a (up to) 2-point manifold."""
    n = len(verts)
    v1 = verts[face_i]
    v2 = verts[(face_i + 1) % n]
    fnx, fny = normals[face_i]
    tx = v2[0] - v1[0]
    ty = v2[1] - v1[1]
    tlen = math.hypot(tx, ty)
    tx /= tlen
    ty /= tlen

    seg = [p1, p2]
    seg = _clip_segment(seg, -tx, -ty, -(tx * v1[0] + ty * v1[1]))
    if not seg:
        return []
    if len(seg) >= 2:
        seg = _clip_segment(seg, tx, ty, tx * v2[0] + ty * v2[1])
    contacts: list[Contact] = []
    for px, py in seg[:2]:
        d = fnx * (px - v1[0]) + fny * (py - v1[1])
        if d <= rs:
            # Midpoint between the capsule surface and the face.
            h = 0.5 * (d + rs)
            contacts.append((px - fnx * h, py - fny * h, -fnx, -fny, rs - d))
    return contacts
