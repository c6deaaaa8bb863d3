import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from rtwl.covering import (
    AUTO,
    BETTER,
    Dims,
    INCLUSIVE,
    ONE_SINGLETON,
    PsiTable,
    STRICT,
    TWO_SINGLETONS,
    BudgetExceeded,
    covered_set,
    find_star_witness,
    is_bad_bruteforce,
    is_bad_structural,
    singleton_witness,
    star_holds_for,
    transversal_count,
    transversals,
)
from rtwl.streams import ValidationError

PAPER_GRID = "0 3 2 6\n0 4 5 7\n1 2 3 7\n1 4 5 6"


def bijection_22() -> PsiTable:
    return PsiTable(Dims((2, 2)), 4, {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3})


def random_table(rng, ks, n_colors, total=False):
    dims = Dims(ks)
    while True:
        assignment = {}
        for cell in dims.tuples():
            v = rng.randrange(n_colors if total else n_colors + 1)
            if v < n_colors:
                assignment[cell] = v
        if set(assignment.values()) == set(range(n_colors)):
            return PsiTable(dims, n_colors, assignment)


class TestDims:
    def test_validation(self):
        with pytest.raises(ValidationError):
            Dims((1, 3))
        with pytest.raises(ValidationError):
            Dims(())

    def test_cells_and_tuples(self):
        d = Dims((2, 3))
        assert d.cells == 6
        assert len(list(d.tuples())) == 6
        assert d.contains((1, 2))
        assert not d.contains((2, 0))


class TestPsiTable:
    def test_surjectivity_required(self):
        with pytest.raises(ValidationError):
            PsiTable(Dims((2, 2)), 3, {(0, 0): 0, (0, 1): 1})

    def test_fibers(self):
        psi = bijection_22()
        assert psi.fiber(2) == ((1, 0),)
        assert psi.singleton_colors() == [0, 1, 2, 3]
        assert psi.is_total()

    def test_grid_text_round_trip(self):
        psi = PsiTable.from_grid_text(PAPER_GRID)
        assert psi.dims.ks == (4, 4)
        assert psi.n_colors == 8
        assert PsiTable.from_grid_text(psi.to_grid_text()) == psi

    def test_grid_text_undefined_cells(self):
        psi = PsiTable.from_grid_text("0 .\n1 0")
        assert psi.get((0, 1)) is None
        assert not psi.is_total()
        assert "." in psi.to_grid_text()

    def test_grid_text_ragged_rejected(self):
        with pytest.raises(ValidationError):
            PsiTable.from_grid_text("0 1\n2")

    def test_json_round_trip(self):
        psi = PsiTable.from_grid_text("0 .\n1 2")
        assert PsiTable.from_json(psi.to_json()) == psi


class TestCoveredSet:
    def test_box_product(self):
        box = covered_set([(0, 1), (2, 0)], Dims((3, 2)))
        assert box == {(0, 0), (0, 1), (2, 0), (2, 1)}

    def test_single_tuple_covers_itself(self):
        assert covered_set([(1, 1)], Dims((2, 2))) == {(1, 1)}

    @given(
        st.lists(
            st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=5
        )
    )
    def test_matches_pointwise_definition(self, xs):
        dims = Dims((3, 3))
        box = covered_set(xs, dims)
        for b in dims.tuples():
            covered = all(any(x[m] == b[m] for x in xs) for m in range(2))
            assert (b in box) == covered


class TestTransversals:
    def test_count_and_enumeration(self):
        psi = PsiTable.from_grid_text("0 0\n1 1")
        tvs = list(transversals(psi, {0, 1}))
        assert len(tvs) == transversal_count(psi, {0, 1}) == 4

    def test_budget_raises(self):
        psi = bijection_22()
        with pytest.raises(BudgetExceeded):
            star_holds_for(psi, {0, 3}, budget=0)


class TestStar:
    def test_rejects_improper_sets(self):
        psi = bijection_22()
        with pytest.raises(ValidationError):
            star_holds_for(psi, set())
        with pytest.raises(ValidationError):
            star_holds_for(psi, {0, 1, 2, 3})

    def test_bijection_pair_witness(self):
        # two cells differing in both coordinates cover an escaping corner
        psi = bijection_22()
        assert star_holds_for(psi, {0, 3})
        assert not star_holds_for(psi, {0, 1})

    def test_modes_coincide_on_total_tables(self):
        psi = PsiTable.from_grid_text(PAPER_GRID)
        for size in (1, 2):
            for S in itertools.combinations(range(8), size):
                assert star_holds_for(psi, S, INCLUSIVE) == star_holds_for(
                    psi, S, STRICT
                )

    def test_inclusive_counts_undefined_as_escape(self):
        psi = PsiTable.from_grid_text("0 . 2\n. 1 2")
        # the only transversal of {0, 1} covers two undefined corners and
        # no defined cell outside the set
        assert star_holds_for(psi, {0, 1}, INCLUSIVE)
        assert not star_holds_for(psi, {0, 1}, STRICT)

    def test_find_witness_orders_by_size_then_lex(self):
        psi = bijection_22()
        search = find_star_witness(psi)
        assert search.status == "found"
        assert search.witness.sorted() == [0, 3]

    def test_find_witness_exhausted(self):
        psi = PsiTable.from_grid_text("0 0\n1 1")
        search = find_star_witness(psi)
        assert search.status == "none"
        assert search.witness is None

    def test_find_witness_budget_status(self):
        psi = PsiTable.from_grid_text(PAPER_GRID)
        search = find_star_witness(psi, budget=1)
        assert search.status == "budget"


class TestBadCollections:
    def test_line_configuration(self):
        # colors 0,1,2 each once in row 0
        psi = PsiTable.from_grid_text("0 1 2\n3 3 4\n4 5 5")
        assert is_bad_structural(psi, (0, 1, 2))
        assert is_bad_bruteforce(psi, (0, 1, 2))

    def test_rectangle_configuration(self):
        psi = PsiTable.from_grid_text("0 1 2\n0 2 1\n3 4 4")
        # rectangle rows {0,1} x cols {1,2} has corners 1,2,2,1: two fibers
        # rows {0,1} x cols {0,1} has corners 0,1,0,2 -> three fibers
        assert is_bad_structural(psi, (0, 1, 2))

    def test_good_collection(self):
        psi = PsiTable.from_grid_text(PAPER_GRID)
        # the documented witness {0,1,2} has the escape property, so it is
        # not bad
        assert not is_bad_bruteforce(psi, (0, 1, 2))
        assert not is_bad_structural(psi, (0, 1, 2))

    def test_requires_three_colors(self):
        psi = bijection_22()
        with pytest.raises(ValidationError):
            is_bad_structural(psi, (0, 1))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32))
    def test_structural_agrees_with_bruteforce(self, seed):
        psi = random_table(random.Random(seed), (3, 3), 5, total=True)
        for triple in itertools.combinations(range(5), 3):
            assert is_bad_structural(psi, triple) == is_bad_bruteforce(psi, triple)


class TestSingletonWitness:
    def test_two_singletons(self):
        psi = bijection_22()
        w = singleton_witness(psi, TWO_SINGLETONS)
        assert w is not None
        assert star_holds_for(psi, w.colors)

    def test_one_singleton_disjoint_fiber(self):
        grid = "0 1 2\n3 4 4"  # 2x3 -> 5: singleton 0 at (0,0), fiber 4 avoids row 0/col 0
        psi = PsiTable.from_grid_text(grid)
        w = singleton_witness(psi, ONE_SINGLETON)
        assert w is not None and star_holds_for(psi, w.colors)

    def test_precondition_enforced(self):
        psi = PsiTable.from_grid_text("0 1\n2 2")  # N=3 <= k0+k1-1
        with pytest.raises(ValidationError):
            singleton_witness(psi, ONE_SINGLETON)
        with pytest.raises(ValidationError):
            singleton_witness(psi, TWO_SINGLETONS)

    def test_auto_self_verifies(self):
        psi = PsiTable.from_grid_text(PAPER_GRID)
        w = singleton_witness(psi, AUTO)
        assert w is None or star_holds_for(psi, w.colors)

    def test_better_strategy_varying_singletons(self):
        # three singletons 0,1,2 in one column, small fiber 3 avoiding it
        grid = "0 3 4\n1 3 5\n2 4 5"
        psi = PsiTable.from_grid_text(grid)
        w = singleton_witness(psi, BETTER)
        assert w is not None and star_holds_for(psi, w.colors)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32))
    def test_auto_never_returns_unverified(self, seed):
        psi = random_table(random.Random(seed), (3, 3), 6)
        w = singleton_witness(psi, AUTO)
        if w is not None:
            assert star_holds_for(psi, w.colors)
