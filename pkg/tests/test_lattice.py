import json
import random

import pytest

from conftest import DATA, GOLDEN
from kdvsing.errors import DegenerateSample, IndeterminateStep, SameStepUnsupported, WindowUndetermined
from kdvsing.exactnum import INF_LIKE, ZERO_LIKE, InfLike, Regular, ZeroLike, qq
from kdvsing.lattice import (
    ANTICONFINING,
    CASE1,
    CASE2,
    CASE3,
    CASE4,
    CASE5,
    NE,
    NO_INTERACTION,
    NONSINGULAR,
    OPEN,
    SW,
    Staircase,
    Step,
    case_scenario,
    classify_interaction,
    evolve,
    padded_staircase,
    render_pattern,
)
from kdvsing.mapping import MapParams, orbit, random_rational, random_state

CASES = [CASE1, CASE2, CASE3, CASE4, CASE5]


def corner_zero(pad=4):
    return padded_staircase([1], [(0, 2)], pad, pad, anchor_corner=(1, 1))


def load_staircase(path):
    data = json.loads(path.read_text())
    return Staircase(tuple(data["steps"]), tuple(data["anchor"]))


# -- staircases ---------------------------------------------------------------


def test_step_validation():
    with pytest.raises(ValueError):
        Step(0, ())
    with pytest.raises(ValueError):
        Step(2, (1, 2))
    with pytest.raises(ValueError):
        Staircase(())


def test_staircase_geometry():
    st = Staircase.from_widths([2, 1, 3], zeros=[(0, 3), (2, 2)], anchor=(0, 0))
    assert st.step_origin(1) == (-1, 2)
    assert st.step_origin(2) == (-2, 3)
    assert st.zero_marks == {(0, 2), (-2, 4)}
    assert st.locate((-2, 4)) == (2, 2)
    assert st.zero_type(0, 3) == OPEN
    assert st.zero_type(2, 2) == ANTICONFINING
    assert st.zero_type(2, 1) == NONSINGULAR
    assert st.bounds == (-2, 0, 0, 6)
    with pytest.raises(KeyError):
        st.locate((5, 5))
    with pytest.raises(ValueError):
        Staircase.from_widths([1], zeros=[(0, 3)])


def test_periodic_staircase_layout():
    st = Staircase.periodic(2, (1, 2, 0), rows=[1, 0, -1], zero_rows=[0])
    cells = st.cells()
    assert cells[(0, 0)] == 1 and cells[(0, 2)] == 0
    assert cells[(1, -2)] == 1 and cells[(1, 0)] == 1
    assert cells[(-1, 2)] == 1 and cells[(-1, 4)] == 1
    with pytest.raises(ValueError):
        Staircase.periodic(2, (1, 2, 3), rows=[0, 2])


# -- the single corner zero ----------------------------------------------------


def test_corner_zero_pattern_integrable():
    grid = evolve(load_staircase(DATA / "one_one_corner_zero.json"), MapParams(1, 1, 1))
    assert grid.mode == "laurent"
    pm = grid.pattern()
    assert pm.marks == {
        (1, 1): ZeroLike(1),
        (2, 1): InfLike(1),
        (1, 2): InfLike(1),
        (2, 2): ZeroLike(1),
    }
    assert grid.signature(3, 2) == Regular
    assert grid.signature(2, 3) == Regular


@pytest.mark.parametrize("ab", [("2", "3"), ("1", "-5/2"), ("7/3", "1/4")])
def test_corner_zero_second_zero_coefficient(ab):
    p = MapParams(*ab, 1)
    grid = evolve(corner_zero(), p)
    x22 = grid.value(2, 2)
    assert x22.valuation == 1
    assert x22.leading == 1 - p.a / p.b - p.b / p.a
    assert grid.signature(3, 2).kind == INF_LIKE
    assert grid.signature(2, 3).kind == INF_LIKE


def test_corner_zero_nonintegrable_band_persists():
    grid = evolve(corner_zero(pad=6), MapParams(2, 3, 1))
    for k in range(2, 7):
        assert grid.signature(k, k).kind == ZERO_LIKE
        assert grid.signature(k, k + 1).kind == INF_LIKE
        assert grid.signature(k + 1, k).kind == INF_LIKE


def test_corner_zero_projective_mode_fails():
    with pytest.raises(IndeterminateStep):
        evolve(corner_zero(), MapParams(1, 1, 1), mode="projective")


def test_regular_staircase_has_no_marks():
    st = Staircase.from_widths([2, 3, 1, 2], seed=5)
    grid = evolve(st, MapParams(1, 1, 1))
    assert grid.mode == "projective"
    assert grid.pattern().marks == {}


def test_window_undetermined():
    grid = evolve(corner_zero(), MapParams(1, 1, 1))
    with pytest.raises(WindowUndetermined):
        grid.value(40, 40)


def test_identically_vanishing_cell():
    # x[1,1] = 1 + 1/1 - 1/(1/2) = 0 exactly, and x[1,2] then divides by it
    st = Staircase(
        (
            {"width": 1, "values": (5, 1)},
            {"width": 2, "values": (1, "1/2", 3)},
            {"width": 1, "values": (2, 7)},
        ),
        (1, -1),
    )
    with pytest.raises(DegenerateSample):
        evolve(st, MapParams(1, 1, 1), mode="laurent")


def test_direction_checked():
    with pytest.raises(ValueError):
        evolve(corner_zero(), MapParams(1, 1, 1), direction="N")


# -- zeros on every corner ------------------------------------------------------


def test_all_corner_zeros_with_distinct_values_stay_regular():
    k = 8
    st = Staircase.from_widths([1] * k, [(j, 2) for j in range(k)], seed=3)
    pm = evolve(st, MapParams(1, 1, 1)).pattern()
    assert set(pm.marks) == st.zero_marks


def test_all_corner_zeros_with_equal_values_spawn_zeros():
    k = 8
    st = Staircase.from_widths([1] * k, [(j, 2) for j in range(k)], values=[[5, 0]] * k)
    pm = evolve(st, MapParams(1, 1, 1)).pattern()
    assert set(pm.marks) > st.zero_marks
    assert pm.cells_of(INF_LIKE) == set()


# -- reduction to phi_q -----------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("ab", [(1, 1), (1, "7/5")])
def test_lattice_reproduces_forward_orbit(q, ab):
    p = MapParams(*ab, q)
    u = random_state(random.Random(q), p)
    steps = 10
    seq = list(u[:q]) + [s[-1] for s in orbit(u, p, steps)]
    grid = evolve(Staircase.periodic(q, u, range(0, -steps - 1, -1)), p, NE)
    seen = set()
    for (m, n), v in grid.cells.items():
        i = n + m * q
        if 0 <= i < len(seq):
            assert v.value == seq[i]
            seen.add(i)
    assert seen == set(range(len(seq)))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_lattice_reproduces_backward_orbit(q):
    p = MapParams(1, "7/5", q)
    u = random_state(random.Random(10 + q), p)
    steps = 10
    back = [s[0] for s in orbit(u, p, steps, backward=True)]
    grid = evolve(Staircase.periodic(q, u, range(steps, -1, -1)), p, SW)
    seen = set()
    for (m, n), v in grid.cells.items():
        i = n + m * q
        if -steps <= i <= 0:
            assert v.value == back[-i]
            seen.add(i)
    assert seen == set(range(-steps, 1))


def test_sw_undoes_ne():
    p = MapParams(2, 3, 1)
    k = 6
    st = Staircase.from_widths([1] * k, seed=9, anchor=(0, 0))
    m_lo, m_hi, n_lo, n_hi = st.bounds
    ne = evolve(st, p, NE, window=(m_lo, m_hi + 2, n_lo, n_hi + 2))
    # the staircase moved one cell NE, filled with NE-evolved values
    moved = Staircase(
        tuple(
            {"width": 1, "values": (ne.value(1 - j, j + 1).value, ne.value(1 - j, j + 2).value)}
            for j in range(1, k - 1)
        ),
        (0, 2),
    )
    sw = evolve(moved, p, SW, window=(m_lo, m_hi + 1, n_lo, n_hi + 1))
    for (m, n), v in st.cells().items():
        if (m, n) in sw.cells:
            assert sw.value(m, n).value == v
    inner = [pos for pos in st.cells() if pos in sw.cells]
    assert len(inner) >= k - 2


# -- interactions and cases -----------------------------------------------------


@pytest.mark.parametrize("label", CASES)
def test_case_scenarios_are_labelled(label):
    found = classify_interaction(case_scenario(label))
    assert [i.label for i in found] == [label]


def test_pair_on_same_step_rejected():
    st = Staircase.from_widths([3, 1], zeros=[(0, 2), (0, 4)])
    with pytest.raises(SameStepUnsupported):
        classify_interaction(st)


def test_non_adjacent_and_slot_one_pairs():
    st = Staircase.from_widths([2, 2, 2], zeros=[(0, 3), (2, 3)])
    assert [i.label for i in classify_interaction(st)] == [NO_INTERACTION]
    st = Staircase.from_widths([2, 2], zeros=[(0, 3), (1, 1)])
    assert [i.label for i in classify_interaction(st)] == [NO_INTERACTION]


def golden(label):
    text = (GOLDEN / f"{label.lower()}.txt").read_text()
    ne, sw = text.split("# SW\n")
    return ne.removeprefix("# NE\n"), sw


@pytest.mark.parametrize("label", [CASE1, CASE3, CASE5])
def test_case_renderings_match_golden(label):
    st = case_scenario(label)
    p = MapParams(1, 1, 1)
    ne, sw = golden(label)
    assert render_pattern(evolve(st, p, NE)) == ne
    assert render_pattern(evolve(st, p, SW)) == sw


def test_case1_rhombus_topology():
    pm = evolve(case_scenario(CASE1), MapParams(1, 1, 1)).pattern()
    assert pm.cells_of(ZERO_LIKE) == {(0, 0), (-1, 1), (2, 2), (1, 3)}
    assert pm.cells_of(INF_LIKE) == {(1, 0), (-1, 2), (2, 1), (0, 3)}


def test_case3_infinity_line_above_open_zero():
    pm = evolve(case_scenario(CASE3), MapParams(1, 1, 1)).pattern()
    infs = pm.cells_of(INF_LIKE)
    assert {(1, 0), (2, 1), (3, 2)} <= infs
    # the zero at the open corner no longer closes into a rhombus
    assert (1, 1) not in pm.marks and (2, 2) not in pm.cells_of(ZERO_LIKE)


def test_case5_parallel_lines_both_directions():
    p = MapParams(1, 1, 1)
    for direction in (NE, SW):
        infs = evolve(case_scenario(CASE5), p, direction).pattern().cells_of(INF_LIKE)
        lines = {}
        for m, n in infs:
            lines.setdefault(m - n, []).append((m, n))
        long_lines = [d for d, cells in lines.items() if len(cells) >= 4]
        assert len(long_lines) == 2
        # the lines run side by side, one diagonal apart, and never meet
        assert abs(long_lines[0] - long_lines[1]) == 2


# -- rendering -------------------------------------------------------------------


def test_render_formats_and_glyphs():
    grid = evolve(corner_zero(), MapParams(1, 1, 1))
    text = render_pattern(grid, glyphs={"inf": "*"})
    assert "*0" in text and "0*" in text
    data = json.loads(render_pattern(grid, "json"))
    assert {(d["m"], d["n"], d["class"]) for d in data["marks"]} == {
        (1, 1, "ZeroLike"),
        (2, 1, "InfLike"),
        (1, 2, "InfLike"),
        (2, 2, "ZeroLike"),
    }
    svg = render_pattern(grid, "svg")
    assert svg.startswith("<svg") and svg.count("&#8734;") == 2
    with pytest.raises(ValueError):
        render_pattern(grid, "png")


def test_staircase_values_are_exact():
    st = Staircase.from_widths([1], values=[["1/3", "-2"]])
    assert st.steps[0].values == (qq("1/3"), qq(-2))
    assert isinstance(random_rational(random.Random(0)), type(qq(1)))
