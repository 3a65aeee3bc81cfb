"""
Unit Tests für coset_search.py
Exakte Nebenklassensuche (Syndromtabelle, Informationsmengen) und ISD
"""

import random

import pytest

from coset_search import (
    InformationSetEnumeration,
    SearchBudgetExceeded,
    SyndromeTable,
    exact_engine,
    information_set_decoding,
    polish,
)
from geometry import quadric
from gf2 import rank
from incidence import build_incidence


def _random_code(rng, length, n_cols):
    columns = [rng.randrange(1, 1 << length) for _ in range(n_cols)]
    target = rng.randrange(1 << length)
    return columns, target


def _min_coset_weight(columns, target):
    best = target.bit_count()
    for mask in range(1 << len(columns)):
        v = target
        for j, c in enumerate(columns):
            if mask >> j & 1:
                v ^= c
        best = min(best, v.bit_count())
    return best


def _in_coset(v, columns, target):
    return rank(columns + [v ^ target]) == rank(columns)


class TestExactEngines:
    """Tests für SyndromeTable und InformationSetEnumeration"""

    @pytest.mark.parametrize("engine_cls", [SyndromeTable, InformationSetEnumeration])
    def test_minimum_matches_brute_force(self, engine_cls):
        """Test: Minimales Gewicht stimmt mit vollständiger Aufzählung überein"""
        rng = random.Random(11)
        for _ in range(40):
            length = rng.randrange(3, 13)
            columns, target = _random_code(rng, length, rng.randrange(1, 9))
            expected = _min_coset_weight(columns, target)
            engine = engine_cls(columns, target, length)
            v = engine.search(expected)
            assert v is not None
            assert v.bit_count() <= expected
            assert _in_coset(v, columns, target)
            if expected > 0:
                fresh = engine_cls(columns, target, length)
                assert fresh.search(expected - 1) is None

    def test_resumable_search(self):
        """Test: Wiederholte Anfragen mit sinkender Schranke"""
        rng = random.Random(5)
        columns, target = _random_code(rng, 12, 6)
        expected = _min_coset_weight(columns, target)
        engine = InformationSetEnumeration(columns, target, 12)
        for bound in range(12, expected - 1, -1):
            v = engine.search(bound)
            assert v is not None and v.bit_count() <= bound
        if expected:
            assert engine.search(expected - 1) is None

    def test_lower_bound_after_exhausted_search(self):
        """Test: Nach erfolgloser Suche liegt die Schranke über der Anfrage"""
        rng = random.Random(13)
        for _ in range(30):
            length = rng.randrange(4, 14)
            columns, target = _random_code(rng, length, rng.randrange(1, 7))
            expected = _min_coset_weight(columns, target)
            if expected == 0:
                continue
            engine = InformationSetEnumeration(columns, target, length)
            assert engine.search(expected - 1) is None
            assert engine.lower_bound > expected - 1
            assert engine.deficits[0] == 0

    def test_hyperbolic_quadric_has_three_disjoint_sets(self):
        """Test: Hyperbolische Quadrik von W_3 zerfällt in drei volle Informationsmengen"""
        s = build_incidence(quadric(3, 0)[0])
        engine = InformationSetEnumeration(s.columns(), s.valuation, s.n_rows)
        assert (s.n_rows, engine.rank) == (105, 29)
        assert engine.deficits.count(0) == 3

    def test_zero_columns(self):
        """Test: Ohne Spalten ist die Nebenklasse nur das Ziel selbst"""
        engine = InformationSetEnumeration([0, 0], 0b1011, 4)
        assert engine.search(3) == 0b1011
        assert engine.search(2) is None
        table = SyndromeTable([0], 0b1011, 4)
        assert table.search(2) is None
        assert table.search(3) == 0b1011

    def test_engine_choice(self):
        """Test: Kleine Redundanz ergibt die Syndromtabelle"""
        assert isinstance(exact_engine([0b011, 0b110], 0b101, 3), SyndromeTable)
        columns = [1 << i for i in range(2)]
        assert isinstance(exact_engine(columns, 1, 30), InformationSetEnumeration)

    def test_syndrome_table_too_large(self):
        """Test: Redundanz über der Grenze wird abgelehnt"""
        with pytest.raises(ValueError):
            SyndromeTable([1], 0, 30)

    def test_deadline(self):
        """Test: Abgelaufene Frist bricht die Suche ab"""
        table = SyndromeTable([0b011], 0b100, 3)
        with pytest.raises(SearchBudgetExceeded):
            table.search(3, deadline=0.0)


class TestInformationSetDecoding:
    """Tests für information_set_decoding und polish"""

    def test_polish_never_increases(self):
        """Test: Gierige Verbesserung senkt oder hält das Gewicht"""
        rng = random.Random(7)
        for _ in range(50):
            columns, target = _random_code(rng, 16, 8)
            assert polish(target, columns).bit_count() <= target.bit_count()

    def test_result_in_coset_and_bounded(self):
        """Test: Ergebnis liegt in der Nebenklasse und ist nie besser als das Minimum"""
        rng = random.Random(8)
        for _ in range(20):
            columns, target = _random_code(rng, 14, 7)
            result = information_set_decoding(columns, target, 14, iterations=20, seed=1)
            assert result.weight == result.vector.bit_count()
            assert result.weight >= _min_coset_weight(columns, target)
            assert _in_coset(result.vector, columns, target)
            assert result.trace[0] == (-1, target.bit_count())

    def test_deterministic_per_seed(self):
        """Test: Gleicher Seed ergibt gleiches Ergebnis"""
        rng = random.Random(9)
        columns, target = _random_code(rng, 20, 10)
        a = information_set_decoding(columns, target, 20, iterations=30, seed=4)
        b = information_set_decoding(columns, target, 20, iterations=30, seed=4)
        assert a == b

    def test_threads_do_not_change_result(self):
        """Test: Ergebnis unabhängig von threads"""
        rng = random.Random(10)
        columns, target = _random_code(rng, 20, 10)
        single = information_set_decoding(columns, target, 20, iterations=24, seed=2, threads=1)
        multi = information_set_decoding(columns, target, 20, iterations=24, seed=2, threads=2)
        assert single == multi

    def test_more_iterations_never_worse(self):
        """Test: Mehr Iterationen verschlechtern die Schranke nie"""
        rng = random.Random(12)
        columns, target = _random_code(rng, 24, 10)
        few = information_set_decoding(columns, target, 24, iterations=5, seed=3)
        many = information_set_decoding(columns, target, 24, iterations=40, seed=3)
        assert many.weight <= few.weight

    def test_trivial_cases(self):
        """Test: Ziel 0 oder keine Spalten"""
        assert information_set_decoding([0b11], 0, 2, iterations=5).weight == 0
        result = information_set_decoding([], 0b101, 3, iterations=5)
        assert result.vector == 0b101 and result.iterations == 0
