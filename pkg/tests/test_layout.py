import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxicast.layout import (
    DEFAULT_RANK_TABLE,
    GainConfigError,
    GainMode,
    GainPolicy,
    LayoutError,
    LayoutState,
    ProjectionSlot,
    ProxemicZone,
    RotationDirection,
    UnknownParticipantError,
    UnknownSlotError,
    classify_zone,
    gains_for_layout,
    order_by_distance,
    rotate_layout,
    set_assignment,
)


def three_slots():
    return [
        ProjectionSlot("close", "desk", 0.4),
        ProjectionSlot("middle", "shelf", 1.0),
        ProjectionSlot("far", "wall", 3.0),
    ]


class TestClassifyZone:
    @pytest.mark.parametrize(
        "distance,zone",
        [
            (0.30, ProxemicZone.INTIMATE),
            (1.0, ProxemicZone.PERSONAL),
            (2.0, ProxemicZone.SOCIAL),
            (4.0, ProxemicZone.PUBLIC),
        ],
    )
    def test_band_examples(self, distance, zone):
        assert classify_zone(distance) is zone

    @pytest.mark.parametrize(
        "boundary,zone",
        [
            (0.45, ProxemicZone.INTIMATE),
            (1.20, ProxemicZone.PERSONAL),
            (3.60, ProxemicZone.SOCIAL),
        ],
    )
    def test_boundaries_belong_to_nearer_zone(self, boundary, zone):
        assert classify_zone(boundary) is zone

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf, -math.inf])
    def test_rejects_non_positive_and_non_finite(self, bad):
        with pytest.raises(ValueError):
            classify_zone(bad)

    @given(
        st.floats(min_value=1e-6, max_value=100.0),
        st.floats(min_value=1e-6, max_value=100.0),
    )
    def test_monotone_in_distance(self, d1, d2):
        if d1 > d2:
            d1, d2 = d2, d1
        assert classify_zone(d1) <= classify_zone(d2)


class TestSlotsAndPolicy:
    def test_slot_requires_positive_distance(self):
        with pytest.raises(ValueError):
            ProjectionSlot("s", "x", 0.0)
        with pytest.raises(ValueError):
            ProjectionSlot("s", "x", math.nan)

    def test_quad_ref_defaults_to_slot_id(self):
        assert ProjectionSlot("close", "desk", 0.4).quad_ref == "close"

    def test_order_by_distance_rejects_duplicates(self):
        with pytest.raises(LayoutError):
            order_by_distance([ProjectionSlot("a", "", 1.0), ProjectionSlot("a", "", 2.0)])

    def test_default_rank_table(self):
        assert GainPolicy().rank_table == DEFAULT_RANK_TABLE

    @pytest.mark.parametrize(
        "table",
        [(), (0.5, 0.25), (1.0, 0.25, 0.5), (1.0, 1.5), (1.0, -0.1)],
    )
    def test_rank_table_validation(self, table):
        with pytest.raises(GainConfigError):
            GainPolicy(rank_table=table)

    def test_layout_rejects_shared_slot(self):
        with pytest.raises(LayoutError):
            LayoutState({"A": "close", "B": "close"})


class TestGains:
    def test_paper_table_on_full_layout(self):
        layout = LayoutState({"A": "close", "B": "middle", "C": "far"})
        assert gains_for_layout(layout, three_slots()) == {"A": 1.0, "B": 0.25, "C": 0.1}

    def test_single_participant_on_nearest(self):
        layout = LayoutState({"A": "close"})
        assert gains_for_layout(layout, three_slots()) == {"A": 1.0}

    def test_rank_is_absolute_slot_rank(self):
        # A lone member on the far wall is still quiet.
        layout = LayoutState({"A": "far"})
        assert gains_for_layout(layout, three_slots()) == {"A": 0.1}

    def test_inverse_square_by_hand(self):
        slots = [
            ProjectionSlot("c", "", 0.5),
            ProjectionSlot("m", "", 1.0),
            ProjectionSlot("f", "", 2.0),
        ]
        layout = LayoutState({"A": "c", "B": "m", "C": "f"})
        policy = GainPolicy(GainMode.INVERSE_SQUARE)
        assert gains_for_layout(layout, slots, policy) == {
            "A": 1.0,
            "B": 0.25,
            "C": 0.0625,
        }

    def test_inverse_square_nearest_occupied_is_exactly_one(self):
        slots = three_slots()
        layout = LayoutState({"B": "middle", "C": "far"})
        gains = gains_for_layout(layout, slots, GainPolicy(GainMode.INVERSE_SQUARE))
        assert gains["B"] == 1.0
        assert gains["C"] < gains["B"]

    def test_default_table_multiset_invariant(self):
        slots = three_slots()
        for assignment in (
            {"A": "close", "B": "middle", "C": "far"},
            {"A": "far", "B": "close", "C": "middle"},
            {"A": "middle", "B": "far", "C": "close"},
        ):
            gains = gains_for_layout(LayoutState(assignment), slots)
            assert sorted(gains.values()) == sorted(DEFAULT_RANK_TABLE)

    def test_relabeling_permutes_keys_only(self):
        slots = three_slots()
        layout = LayoutState({"A": "close", "B": "middle", "C": "far"})
        rename = {"A": "X", "B": "Y", "C": "Z"}
        renamed = LayoutState({rename[p]: s for p, s in layout.assignment.items()})
        original = gains_for_layout(layout, slots)
        assert gains_for_layout(renamed, slots) == {rename[p]: g for p, g in original.items()}

    def test_more_slots_than_table_entries(self):
        slots = three_slots() + [ProjectionSlot("beyond", "hall", 5.0)]
        with pytest.raises(GainConfigError):
            gains_for_layout(LayoutState({"A": "close"}), slots)

    def test_unknown_assigned_slot(self):
        with pytest.raises(UnknownSlotError):
            gains_for_layout(LayoutState({"A": "ghost"}), three_slots())

    def test_empty_layout(self):
        assert gains_for_layout(LayoutState(), three_slots()) == {}


class TestRotation:
    def test_forward_cycles_toward_farther(self):
        layout = LayoutState({"A": "close", "B": "middle", "C": "far"})
        result = rotate_layout(layout, three_slots(), RotationDirection.FORWARD)
        assert result.rotated
        assert result.layout.assignment == {"A": "middle", "B": "far", "C": "close"}
        assert result.layout.version == layout.version + 1

    def test_three_forwards_restore_original(self):
        layout = LayoutState({"A": "close", "B": "middle", "C": "far"})
        for _ in range(3):
            layout = rotate_layout(layout, three_slots(), RotationDirection.FORWARD).layout
        assert layout.assignment == {"A": "close", "B": "middle", "C": "far"}
        assert layout.version == 3

    def test_forward_then_backward_is_identity_with_version_2(self):
        layout = LayoutState({"A": "close", "B": "middle", "C": "far"})
        forward = rotate_layout(layout, three_slots(), RotationDirection.FORWARD).layout
        back = rotate_layout(forward, three_slots(), RotationDirection.BACKWARD).layout
        assert back.assignment == layout.assignment
        assert back.version == layout.version + 2

    def test_single_participant_is_flagged_noop(self):
        layout = LayoutState({"A": "close"})
        result = rotate_layout(layout, three_slots(), RotationDirection.FORWARD)
        assert not result.rotated
        assert result.layout is layout
        assert result.layout.version == layout.version

    def test_rotation_skips_empty_slots(self):
        # Two members on close and far: the cycle runs over occupied slots.
        layout = LayoutState({"A": "close", "B": "far"})
        result = rotate_layout(layout, three_slots(), RotationDirection.FORWARD)
        assert result.layout.assignment == {"A": "far", "B": "close"}
        again = rotate_layout(result.layout, three_slots(), RotationDirection.FORWARD)
        assert again.layout.assignment == layout.assignment

    @given(st.integers(min_value=0, max_value=5), st.data())
    def test_n_rotations_are_identity(self, n_assigned, data):
        ids = [f"p{i}" for i in range(6)]
        slot_ids = ["s0", "s1", "s2", "s3", "s4", "s5"]
        slots = [ProjectionSlot(s, "", 0.5 + i) for i, s in enumerate(slot_ids)]
        chosen = data.draw(
            st.permutations(slot_ids).map(lambda p: list(p)[:n_assigned])
        )
        layout = LayoutState(dict(zip(ids, chosen)))
        out = layout
        for _ in range(max(n_assigned, 1)):
            out = rotate_layout(out, slots, RotationDirection.FORWARD).layout
        assert out.assignment == layout.assignment


class TestSetAssignment:
    def test_swap_when_slot_occupied(self):
        layout = LayoutState({"A": "close", "B": "middle"})
        out = set_assignment(layout, three_slots(), "B", "close")
        assert out.assignment == {"A": "middle", "B": "close"}
        assert out.version == 1

    def test_idempotent_placement_still_versions(self):
        layout = LayoutState({"A": "close"})
        out = set_assignment(layout, three_slots(), "A", "close")
        assert out.assignment == {"A": "close"}
        assert out.version == layout.version + 1

    def test_unknown_slot(self):
        with pytest.raises(UnknownSlotError):
            set_assignment(LayoutState({"A": "close"}), three_slots(), "A", "nowhere")

    def test_unknown_participant(self):
        with pytest.raises(UnknownParticipantError):
            set_assignment(LayoutState({"A": "close"}), three_slots(), "B", "middle")

    def test_known_participants_allows_new_assignment(self):
        layout = LayoutState({"A": "close"})
        out = set_assignment(
            layout, three_slots(), "B", "middle", known_participants={"A", "B"}
        )
        assert out.assignment == {"A": "close", "B": "middle"}

    def test_unassigned_participant_displaces_occupant(self):
        layout = LayoutState({"A": "close"})
        out = set_assignment(
            layout, three_slots(), "B", "close", known_participants={"A", "B"}
        )
        assert out.assignment == {"B": "close"}

    def test_move_to_free_slot(self):
        layout = LayoutState({"A": "close"})
        out = set_assignment(layout, three_slots(), "A", "far")
        assert out.assignment == {"A": "far"}

    def test_inputs_are_not_mutated(self):
        layout = LayoutState({"A": "close", "B": "middle"})
        set_assignment(layout, three_slots(), "B", "close")
        rotate_layout(layout, three_slots(), RotationDirection.FORWARD)
        assert layout.assignment == {"A": "close", "B": "middle"}
        assert layout.version == 0
