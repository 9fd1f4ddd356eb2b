import re

import pytest

from longwire.audit import (
    GuardPlan,
    LongWireSpan,
    RoutingGrid,
    apply_guard_plan,
    exposures_to_csv,
    find_exposures,
    parse_grid,
    placement_success_probability,
    plan_guards,
    serialize_grid,
)
from longwire.errors import (
    CapacityError,
    DuplicateOccupancy,
    GridSyntaxError,
    GuardBlocked,
)


def span(wire_id, core, track, y0, y1, column=0, sensitive=False, trust="untrusted"):
    return LongWireSpan(wire_id, core, trust, sensitive, column, track, y0, y1)


class TestParseGrid:
    def test_two_valid_lines(self):
        grid = parse_grid(
            "LONG a core1 trusted sensitive 0 3 0 10\n"
            "LONG b core2 untrusted normal 0 5 0 10\n"
        )
        assert len(grid.spans) == 2
        assert grid.span("a").sensitive
        assert not grid.span("b").sensitive

    def test_empty_file(self):
        grid = parse_grid("")
        assert grid.spans == ()

    def test_comments_and_capacity(self):
        grid = parse_grid("# hello\nCAPACITY 8 100\nLONG a c trusted normal 0 1 0 5 # tail\n")
        assert grid.tracks_per_column == 8
        assert grid.n_longs == 100

    def test_duplicate_occupancy_names_both_lines(self):
        text = (
            "LONG a core1 trusted normal 0 3 0 10\n"
            "LONG b core2 untrusted normal 0 3 8 20\n"
        )
        with pytest.raises(DuplicateOccupancy) as err:
            parse_grid(text)
        message = str(err.value)
        assert "a" in message and "b" in message
        assert re.search(r"lines 1 and 2", message)

    def test_non_overlapping_same_track_is_fine(self):
        grid = parse_grid(
            "LONG a core1 trusted normal 0 3 0 10\n"
            "LONG b core2 untrusted normal 0 3 11 20\n"
        )
        assert len(grid.spans) == 2

    def test_syntax_errors_carry_line_numbers(self):
        with pytest.raises(GridSyntaxError, match="line 2"):
            parse_grid("LONG a c trusted normal 0 1 0 5\nWIRE nope\n")
        with pytest.raises(GridSyntaxError, match="line 1"):
            parse_grid("LONG too few fields\n")
        with pytest.raises(GridSyntaxError, match="line 1"):
            parse_grid("LONG a c trusted spicy 0 1 0 5\n")

    def test_track_capacity_enforced(self):
        with pytest.raises(CapacityError):
            parse_grid("CAPACITY 4 100\nLONG a c trusted normal 0 4 0 5\n")

    def test_total_longs_enforced(self):
        text = "CAPACITY 4 2\n" + "".join(
            f"LONG w{i} c trusted normal 0 {i} 0 5\n" for i in range(3)
        )
        with pytest.raises(CapacityError):
            parse_grid(text)

    def test_duplicate_wire_id(self):
        with pytest.raises(DuplicateOccupancy, match="wire_id"):
            parse_grid(
                "LONG a c trusted normal 0 1 0 5\nLONG a c trusted normal 0 2 0 5\n"
            )


class TestSerializeRoundTrip:
    def test_parse_serialize_parse_is_identity(self, docs_dir):
        text = (docs_dir / "sample_grid.txt").read_text()
        grid = parse_grid(text)
        canonical = serialize_grid(grid)
        assert parse_grid(canonical) == grid
        assert serialize_grid(parse_grid(canonical)) == canonical


class TestFindExposures:
    def grid(self):
        return RoutingGrid(
            (
                span("secret", "crypto", 8, 10, 29, sensitive=True, trust="trusted"),
                span("near", "spy", 9, 15, 40),
                span("far", "spy", 10, 0, 50),
                span("too_far", "spy", 11, 0, 50),
                span("elsewhere", "spy", 8, 0, 50, column=2),
                span("own", "crypto", 7, 0, 50, trust="trusted"),
            )
        )

    def test_reports_up_to_distance_two(self):
        exposures = find_exposures(self.grid())
        assert [(e.foreign.wire_id, e.distance, e.overlap) for e in exposures] == [
            ("near", 1, 15),
            ("far", 2, 20),
        ]

    def test_distance_three_not_reported(self):
        names = {e.foreign.wire_id for e in find_exposures(self.grid(), d_max=2)}
        assert "too_far" not in names

    def test_other_column_not_reported(self):
        names = {e.foreign.wire_id for e in find_exposures(self.grid())}
        assert "elsewhere" not in names

    def test_same_core_not_reported(self):
        names = {e.foreign.wire_id for e in find_exposures(self.grid())}
        assert "own" not in names

    def test_translation_invariance(self):
        base = [(e.foreign.wire_id, e.distance, e.overlap) for e in find_exposures(self.grid())]
        moved = RoutingGrid(
            tuple(
                LongWireSpan(
                    s.wire_id, s.core_id, s.trust, s.sensitive,
                    s.column + 5, s.track + 3, s.y_start + 100, s.y_end + 100,
                )
                for s in self.grid().spans
            ),
            tracks_per_column=16,
        )
        assert [(e.foreign.wire_id, e.distance, e.overlap) for e in find_exposures(moved)] == base

    def test_csv_output(self):
        text = exposures_to_csv(find_exposures(self.grid()))
        assert text.splitlines()[0] == "sensitive_id,foreign_id,distance,overlap"
        assert text.splitlines()[1] == "secret,near,1,15"


class TestGuardPlanning:
    def isolated_grid(self):
        return RoutingGrid(
            (
                span("key_bus", "crypto", 8, 0, 19, sensitive=True, trust="trusted"),
                span("own_neighbor", "crypto", 9, 0, 19, trust="trusted"),
            )
        )

    def test_four_track_plan_mid_channel(self):
        plan = plan_guards(self.isolated_grid(), "key_bus")
        assert plan.required_tracks == (6, 7, 9, 10)
        # track 9 is fully covered by the same core: no guard span needed there
        assert sorted({g.track for g in plan.guards}) == [6, 7, 10]

    def test_edge_span_gets_clipped_plan(self):
        grid = RoutingGrid(
            (span("edge", "crypto", 0, 0, 9, sensitive=True, trust="trusted"),)
        )
        plan = plan_guards(grid, "edge")
        assert plan.required_tracks == (1, 2)
        assert len(plan.guards) == 2

    def test_foreign_neighbor_blocks(self):
        grid = RoutingGrid(
            (
                span("key_bus", "crypto", 8, 0, 19, sensitive=True, trust="trusted"),
                span("intruder", "spy", 9, 5, 12),
            )
        )
        with pytest.raises(GuardBlocked) as err:
            plan_guards(grid, "key_bus")
        assert "intruder" in str(err.value)

    def test_partial_same_core_coverage_fills_gaps(self):
        grid = RoutingGrid(
            (
                span("key_bus", "crypto", 8, 0, 19, sensitive=True, trust="trusted"),
                span("stub", "crypto", 9, 5, 9, trust="trusted"),
            )
        )
        plan = plan_guards(grid, "key_bus")
        track9 = sorted((g.y_start, g.y_end) for g in plan.guards if g.track == 9)
        assert track9 == [(0, 4), (10, 19)]

    def test_apply_plan_empties_report_and_stays_valid(self):
        grid = self.isolated_grid()
        guarded = apply_guard_plan(grid, plan_guards(grid, "key_bus"))
        remaining = [
            e for e in find_exposures(guarded) if e.sensitive.wire_id == "key_bus"
        ]
        assert remaining == []
        # guard spans occupy the tracks: an intruder there is now a conflict
        with pytest.raises(DuplicateOccupancy):
            RoutingGrid(guarded.spans + (span("intruder", "spy", 7, 3, 6),))

    def test_guarding_a_non_sensitive_wire_is_an_error(self):
        with pytest.raises(ValueError):
            plan_guards(self.isolated_grid(), "own_neighbor")
        with pytest.raises(ValueError):
            plan_guards(self.isolated_grid(), "ghost")

    def test_fill_mode_recorded(self):
        plan = plan_guards(self.isolated_grid(), "key_bus", fill_mode="random_signal")
        assert plan.fill_mode == "random_signal"
        with pytest.raises(ValueError):
            GuardPlan("x", 0, (), (), fill_mode="lava")


class TestPlacementProbability:
    def test_paper_design_point(self):
        p = placement_success_probability(8500, 4, 5, 5)
        assert p == pytest.approx(0.0042353, abs=1e-6)
        assert round(p, 4) == 0.0042

    def test_caps_at_one(self):
        assert placement_success_probability(100, 100, 1, 1) == 1.0

    def test_single_long_each(self):
        assert placement_success_probability(8500, 4, 1, 1) == 4 / 8500

    def test_preconditions(self):
        with pytest.raises(ValueError):
            placement_success_probability(10, 4, 6, 6)
        with pytest.raises(ValueError):
            placement_success_probability(10, 0, 1, 1)


class TestShippedFixture:
    def test_exposure_count_matches_annotation(self, docs_dir):
        text = (docs_dir / "sample_grid.txt").read_text()
        annotated = int(re.search(r"expected-exposures:\s*(\d+)", text).group(1))
        grid = parse_grid(text)
        assert len(find_exposures(grid)) == annotated

    def test_guardable_wire_guards_cleanly(self, docs_dir):
        grid = parse_grid((docs_dir / "sample_grid.txt").read_text())
        plan = plan_guards(grid, "rsa_exp_bus")
        guarded = apply_guard_plan(grid, plan)
        assert [
            e for e in find_exposures(guarded) if e.sensitive.wire_id == "rsa_exp_bus"
        ] == []

    def test_exposed_wire_cannot_be_guarded(self, docs_dir):
        grid = parse_grid((docs_dir / "sample_grid.txt").read_text())
        with pytest.raises(GuardBlocked):
            plan_guards(grid, "aes_key_bus")
