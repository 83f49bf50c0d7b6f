"""Corner-pin math: 4-point projective transforms and calibration profiles.

A calibrated slot is a quad in normalized projector coordinates. Warping the
unit video rectangle onto it is a plane-to-plane projective transform, which
four corner correspondences determine exactly: each correspondence yields two
linear constraints on the eight unknowns of H (h33 is pinned to 1), and the
resulting 8x8 system is solved by LU with partial pivoting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .layout import ProjectionSlot

# Minimum triangle area for any corner triple; quads flatter than this are
# rejected as collinear. Far below drag-pin precision, far above FP noise.
GEOM_EPS = 1e-9
# Singularity guard for determinants and homogeneous depth.
SING_EPS = 1e-12
# A solved transform must reproduce its defining corners this well.
CORNER_TOL = 1e-9

Point = tuple[float, float]


class CalibrationError(Exception):
    """Base class for calibration errors."""


class DegenerateQuadError(CalibrationError):
    pass


class SingularTransformError(CalibrationError):
    pass


class PointAtInfinityError(CalibrationError):
    pass


class ProfileError(CalibrationError):
    """Profile validation failed; .problems lists every offending slot."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    # Proper crossing only; touching endpoints cannot occur once collinear
    # corner triples have been ruled out.
    return (
        _orient(a, b, c) * _orient(a, b, d) < 0
        and _orient(c, d, a) * _orient(c, d, b) < 0
    )


def quad_defect(corners: tuple[Point, Point, Point, Point]) -> str | None:
    """Why these corners do not form a usable quad, or None if they do."""
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                area = abs(_orient(corners[i], corners[j], corners[k])) / 2.0
                if area <= GEOM_EPS:
                    return f"corners {i},{j},{k} are collinear"
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    if _segments_cross(*edges[0], *edges[2]) or _segments_cross(*edges[1], *edges[3]):
        return "edges cross (self-intersecting quad)"
    return None


@dataclass(frozen=True)
class Quad:
    """Four corners in normalized projector coordinates, ordered TL, TR, BR, BL."""

    corners: tuple[Point, Point, Point, Point]

    def __post_init__(self) -> None:
        corners = tuple((float(x), float(y)) for x, y in self.corners)
        if len(corners) != 4:
            raise DegenerateQuadError("a quad has exactly 4 corners")
        for x, y in corners:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise DegenerateQuadError("corner coordinates must be finite")
        defect = quad_defect(corners)  # type: ignore[arg-type]
        if defect:
            raise DegenerateQuadError(defect)
        object.__setattr__(self, "corners", corners)

    def as_lists(self) -> list[list[float]]:
        return [[x, y] for x, y in self.corners]


UNIT_SQUARE = Quad(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))


@dataclass(frozen=True)
class Homography:
    """3x3 projective transform, normalized so m[2][2] == 1."""

    m: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.m, dtype=float)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise SingularTransformError("transform must be a finite 3x3 matrix")
        if abs(m[2, 2]) <= SING_EPS:
            raise SingularTransformError("cannot normalize: m[2][2] is ~0")
        m = m / m[2, 2]
        det = float(np.linalg.det(m))
        if abs(det) <= SING_EPS:
            raise SingularTransformError(f"singular transform (det={det:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def rows(self) -> list[list[float]]:
        return self.m.tolist()

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, dx: float, dy: float) -> "Homography":
        return cls(np.array([[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]]))


def solve_homography(source: Quad, target: Quad) -> Homography:
    """Recover the transform mapping each source corner onto its target corner.

    Exact for four correspondences; raises DegenerateQuadError when the
    corner system is singular or so ill-conditioned that the solution fails
    to reproduce the corners to within CORNER_TOL.
    """
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(source.corners, target.corners)):
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]
        b[2 * i] = u
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]
        b[2 * i + 1] = v
    try:
        h = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateQuadError("quad pair yields a singular corner-pin system") from exc
    try:
        hom = Homography(
            np.array([[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]])
        )
        err = max(
            math.dist(apply_transform(hom, src), dst)
            for src, dst in zip(source.corners, target.corners)
        )
    except CalibrationError as exc:
        raise DegenerateQuadError(f"quad pair is numerically degenerate: {exc}") from exc
    if err >= CORNER_TOL:
        raise DegenerateQuadError(f"near-singular quad pair (corner error {err:.2e})")
    return hom


def apply_transform(h: Homography, point: Point) -> Point:
    """Project a point through h, dividing by the homogeneous depth."""
    x, y = point
    m = h.m
    w = m[2, 0] * x + m[2, 1] * y + m[2, 2]
    if abs(w) <= SING_EPS:
        raise PointAtInfinityError(f"point {point} maps to infinity")
    return (
        (m[0, 0] * x + m[0, 1] * y + m[0, 2]) / w,
        (m[1, 0] * x + m[1, 1] * y + m[1, 2]) / w,
    )


def invert(h: Homography) -> Homography:
    try:
        inv = np.linalg.inv(h.m)
    except np.linalg.LinAlgError as exc:
        raise SingularTransformError("transform is not invertible") from exc
    return Homography(inv)


def compose(a: Homography, b: Homography) -> Homography:
    """The transform equal to applying b first, then a."""
    return Homography(a.m @ b.m)


def unit_to_quad(quad: Quad) -> Homography:
    """Transform warping the unit video rectangle onto a calibrated quad."""
    return solve_homography(UNIT_SQUARE, quad)


@dataclass(frozen=True)
class CalibratedSlot:
    slot_id: str
    label: str
    distance_m: float
    quad: Quad

    def projection_slot(self) -> ProjectionSlot:
        return ProjectionSlot(self.slot_id, self.label, self.distance_m, quad_ref=self.slot_id)


@dataclass(frozen=True)
class CalibrationProfile:
    profile_version: int
    slots: tuple[CalibratedSlot, ...]

    def projection_slots(self) -> list[ProjectionSlot]:
        return [s.projection_slot() for s in self.slots]

    def quad_for(self, slot_id: str) -> Quad:
        for s in self.slots:
            if s.slot_id == slot_id:
                return s.quad
        raise KeyError(slot_id)


def load_profile(data: bytes | str) -> CalibrationProfile:
    """Parse and validate a profile document, collecting every problem."""
    try:
        doc = json.loads(data)
    except ValueError as exc:
        raise ProfileError([f"not valid JSON: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ProfileError(["profile must be a JSON object"])

    problems: list[str] = []
    version = doc.get("profile_version")
    if not isinstance(version, int) or isinstance(version, bool) or version < 1:
        problems.append("profile_version must be a positive integer")
        version = 0
    slots_doc = doc.get("slots")
    if not isinstance(slots_doc, list) or not slots_doc:
        problems.append("slots must be a non-empty list")
        slots_doc = []

    parsed: list[CalibratedSlot] = []
    seen: set[str] = set()
    for idx, entry in enumerate(slots_doc):
        if not isinstance(entry, dict):
            problems.append(f"slot #{idx}: must be an object")
            continue
        slot_id = entry.get("id")
        tag = f"slot {slot_id!r}" if isinstance(slot_id, str) and slot_id else f"slot #{idx}"
        if not isinstance(slot_id, str) or not slot_id:
            problems.append(f"{tag}: id must be a non-empty string")
            continue
        if slot_id in seen:
            problems.append(f"{tag}: duplicate slot id")
            continue
        seen.add(slot_id)
        label = entry.get("label")
        if not isinstance(label, str):
            problems.append(f"{tag}: label must be a string")
            continue
        distance = entry.get("distance_m")
        if (
            not isinstance(distance, (int, float))
            or isinstance(distance, bool)
            or not math.isfinite(distance)
            or distance <= 0
        ):
            problems.append(f"{tag}: distance_m must be a positive number")
            continue
        quad_doc = entry.get("quad")
        if (
            not isinstance(quad_doc, list)
            or len(quad_doc) != 4
            or any(not isinstance(p, list) or len(p) != 2 for p in quad_doc)
        ):
            problems.append(f"{tag}: quad must be four [x, y] corners (TL, TR, BR, BL)")
            continue
        try:
            quad = Quad(tuple((float(p[0]), float(p[1])) for p in quad_doc))  # type: ignore[arg-type]
        except (DegenerateQuadError, TypeError, ValueError) as exc:
            problems.append(f"{tag}: invalid quad ({exc})")
            continue
        parsed.append(CalibratedSlot(slot_id, label, float(distance), quad))

    if problems:
        raise ProfileError(problems)
    return CalibrationProfile(profile_version=version, slots=tuple(parsed))


def _fmt_number(x: float) -> str:
    """Decimal with at most 9 fractional digits, trailing zeros trimmed."""
    if x == 0:
        x = 0.0
    s = f"{x:.9f}".rstrip("0")
    return s + "0" if s.endswith(".") else s


def save_profile(profile: CalibrationProfile) -> bytes:
    """Canonical UTF-8 serialization: fixed key order and number formatting.

    save(load(data)) is byte-identical for documents already in canonical
    form, and load(save(profile)) reproduces the profile as long as its
    numbers fit in 9 fractional digits (saving quantizes beyond that).
    """
    lines = ["{", f'  "profile_version": {profile.profile_version},', '  "slots": [']
    for i, slot in enumerate(profile.slots):
        quad = ", ".join(
            f"[{_fmt_number(x)}, {_fmt_number(y)}]" for x, y in slot.quad.corners
        )
        comma = "," if i < len(profile.slots) - 1 else ""
        lines += [
            "    {",
            f'      "id": {json.dumps(slot.slot_id, ensure_ascii=False)},',
            f'      "label": {json.dumps(slot.label, ensure_ascii=False)},',
            f'      "distance_m": {_fmt_number(slot.distance_m)},',
            f'      "quad": [{quad}]',
            "    }" + comma,
        ]
    lines += ["  ]", "}"]
    return ("\n".join(lines) + "\n").encode("utf-8")


def default_profile_bytes() -> bytes:
    """The bundled 3-slot profile (desk / shelf / wall)."""
    return (resources.files("proxicast") / "data/default_profile.json").read_bytes()


def default_profile() -> CalibrationProfile:
    return load_profile(default_profile_bytes())
