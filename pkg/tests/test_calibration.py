import json
import math
import random
from pathlib import Path

import numpy as np
import pytest

from proxicast.calibration import (
    CalibratedSlot,
    CalibrationProfile,
    DegenerateQuadError,
    Homography,
    PointAtInfinityError,
    ProfileError,
    Quad,
    SingularTransformError,
    UNIT_SQUARE,
    apply_transform,
    compose,
    default_profile,
    default_profile_bytes,
    invert,
    load_profile,
    quad_defect,
    save_profile,
    solve_homography,
    unit_to_quad,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
WARP_GOLDEN = REPO_ROOT / "frontend" / "tests" / "fixtures" / "warp_golden.json"


def random_quad(rng: random.Random) -> Quad:
    base = UNIT_SQUARE.corners
    while True:
        corners = tuple(
            (x + rng.uniform(-0.2, 0.2), y + rng.uniform(-0.2, 0.2)) for x, y in base
        )
        try:
            return Quad(corners)
        except DegenerateQuadError:
            continue


class TestQuadValidation:
    def test_collinear_corners_rejected(self):
        with pytest.raises(DegenerateQuadError, match="collinear"):
            Quad(((0, 0), (0.5, 0), (1, 0), (0, 1)))

    def test_self_intersecting_rejected(self):
        # Bow tie: TL, TR swapped with BR.
        with pytest.raises(DegenerateQuadError, match="cross"):
            Quad(((0, 0), (1, 1), (1, 0), (0, 1)))

    def test_non_finite_rejected(self):
        with pytest.raises(DegenerateQuadError):
            Quad(((0, 0), (1, math.nan), (1, 1), (0, 1)))

    def test_valid_nonconvex_quad_accepted(self):
        # Concave but simple: validation does not require convexity.
        quad = Quad(((0, 0), (1, 0), (0.4, 0.4), (0, 1)))
        assert quad_defect(quad.corners) is None

    def test_corners_may_leave_unit_box(self):
        Quad(((0.2, 0.1), (1.2, 0.1), (1.2, 1.1), (0.2, 1.1)))


class TestSolve:
    def test_identity(self):
        h = solve_homography(UNIT_SQUARE, UNIT_SQUARE)
        assert np.allclose(h.m, np.eye(3), atol=1e-12)

    def test_pure_translation(self):
        shifted = Quad(tuple((x + 0.2, y + 0.1) for x, y in UNIT_SQUARE.corners))
        h = solve_homography(UNIT_SQUARE, shifted)
        assert np.allclose(h.m, Homography.translation(0.2, 0.1).m, atol=1e-12)

    def test_corner_roundtrip_on_pin_example(self):
        target = Quad(((0.1, 0.1), (0.8, 0.15), (0.9, 0.85), (0.05, 0.9)))
        h = solve_homography(UNIT_SQUARE, target)
        for src, dst in zip(UNIT_SQUARE.corners, target.corners):
            assert math.dist(apply_transform(h, src), dst) < 1e-9

    def test_random_pairs_corner_exactness(self):
        rng = random.Random(101)
        for _ in range(200):
            source, target = random_quad(rng), random_quad(rng)
            h = solve_homography(source, target)
            err = max(
                math.dist(apply_transform(h, s), t)
                for s, t in zip(source.corners, target.corners)
            )
            assert err < 1e-9

    def test_unit_to_quad_is_solve_from_unit_square(self):
        target = Quad(((0.1, 0.1), (0.8, 0.15), (0.9, 0.85), (0.05, 0.9)))
        assert np.allclose(unit_to_quad(target).m, solve_homography(UNIT_SQUARE, target).m)


class TestApplyInvertCompose:
    def test_apply_identity(self):
        assert apply_transform(Homography.identity(), (0.3, 0.7)) == (0.3, 0.7)

    def test_apply_translation(self):
        h = Homography.translation(0.2, 0.1)
        out = apply_transform(h, (0.0, 0.0))
        assert math.isclose(out[0], 0.2) and math.isclose(out[1], 0.1)

    def test_point_at_infinity(self):
        h = Homography(np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 1]], dtype=float))
        with pytest.raises(PointAtInfinityError):
            apply_transform(h, (1.0, 0.5))

    def test_invert_identity_and_translation(self):
        assert np.allclose(invert(Homography.identity()).m, np.eye(3))
        assert np.allclose(
            invert(Homography.translation(0.2, 0.1)).m,
            Homography.translation(-0.2, -0.1).m,
        )

    def test_invert_roundtrip_random_points(self):
        rng = random.Random(7)
        h = solve_homography(random_quad(rng), random_quad(rng))
        hi = invert(h)
        for _ in range(1000):
            p = (rng.random(), rng.random())
            assert math.dist(apply_transform(hi, apply_transform(h, p)), p) < 1e-6

    def test_compose_with_identity(self):
        rng = random.Random(8)
        h = solve_homography(random_quad(rng), random_quad(rng))
        assert np.allclose(compose(h, Homography.identity()).m, h.m)

    def test_compose_with_inverse_is_identity(self):
        rng = random.Random(9)
        h = solve_homography(random_quad(rng), random_quad(rng))
        assert np.allclose(compose(h, invert(h)).m, np.eye(3), atol=1e-6)

    def test_translations_compose_additively(self):
        a = Homography.translation(0.1, 0.2)
        b = Homography.translation(0.3, -0.05)
        assert np.allclose(compose(a, b).m, Homography.translation(0.4, 0.15).m)

    def test_compose_matches_sequential_application(self):
        rng = random.Random(10)
        a = solve_homography(random_quad(rng), random_quad(rng))
        b = solve_homography(random_quad(rng), random_quad(rng))
        ab = compose(a, b)
        for _ in range(50):
            p = (rng.random(), rng.random())
            direct = apply_transform(ab, p)
            chained = apply_transform(a, apply_transform(b, p))
            assert math.dist(direct, chained) < 1e-9

    def test_composition_associative_on_points(self):
        rng = random.Random(11)
        hs = [solve_homography(random_quad(rng), random_quad(rng)) for _ in range(3)]
        left = compose(compose(hs[0], hs[1]), hs[2])
        right = compose(hs[0], compose(hs[1], hs[2]))
        for _ in range(50):
            p = (rng.random(), rng.random())
            assert math.dist(apply_transform(left, p), apply_transform(right, p)) < 1e-9

    def test_singular_matrix_rejected(self):
        with pytest.raises(SingularTransformError):
            Homography(np.array([[1, 0, 0], [2, 0, 0], [0, 0, 1]], dtype=float))


class TestProfiles:
    def test_default_profile_roundtrips_byte_identically(self):
        data = default_profile_bytes()
        assert save_profile(load_profile(data)) == data

    def test_save_then_load_preserves_values(self):
        profile = default_profile()
        again = load_profile(save_profile(profile))
        assert again == profile

    def test_default_profile_zones(self):
        distances = [s.distance_m for s in default_profile().slots]
        assert distances == [0.4, 1.0, 3.0]

    def test_duplicate_slot_ids_rejected(self):
        doc = json.loads(default_profile_bytes())
        doc["slots"][1]["id"] = "close"
        with pytest.raises(ProfileError, match="duplicate"):
            load_profile(json.dumps(doc))

    def test_collinear_quad_names_slot(self):
        doc = json.loads(default_profile_bytes())
        doc["slots"][2]["quad"] = [[0, 0], [0.5, 0], [1, 0], [0, 1]]
        with pytest.raises(ProfileError, match="'far'"):
            load_profile(json.dumps(doc))

    def test_multiple_problems_all_reported(self):
        doc = json.loads(default_profile_bytes())
        doc["slots"][0]["distance_m"] = -1
        doc["slots"][2]["quad"] = [[0, 0], [0.5, 0], [1, 0], [0, 1]]
        with pytest.raises(ProfileError) as excinfo:
            load_profile(json.dumps(doc))
        assert len(excinfo.value.problems) == 2

    def test_non_json_rejected(self):
        with pytest.raises(ProfileError):
            load_profile(b"not json at all {")

    def test_save_quantizes_to_nine_fractional_digits(self):
        quad = Quad(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))
        profile = CalibrationProfile(1, (CalibratedSlot("s", "x", 1.0 / 3.0, quad),))
        text = save_profile(profile).decode()
        assert '"distance_m": 0.333333333,' in text


class TestSharedWarpGolden:
    """The browser console solves the same corner-pin systems; the committed
    golden file must stay in lockstep with this module."""

    def test_golden_matrices_match_solver(self):
        cases = json.loads(WARP_GOLDEN.read_text())
        assert len(cases) >= 8
        for case in cases:
            source = Quad(tuple((x, y) for x, y in case["source"]))
            target = Quad(tuple((x, y) for x, y in case["target"]))
            h = solve_homography(source, target)
            assert np.allclose(h.m, np.array(case["matrix"]), atol=1e-12), case["name"]
