import numpy as np
import pytest

from subfitlab.core.exceptions import NotInAError, PreconditionViolatedError
from subfitlab.services.cofinite import FinOrCofin
from subfitlab.services.counterexample import (
    A_CLASSES,
    CLAIM5_CASES,
    CLAIM6_CASES,
    TraceClass,
    claim1_witness,
    claim1_witness_traced,
    claim2_witness,
    claim3_refute,
    claim4_closure_holds,
    claim5_extension,
    claim5_witness,
    claim6_extension,
    claim6_witness,
    class_frequencies,
    in_A,
    in_B,
    in_up_c,
    class_members,
    meet_A,
    meet_table,
    sample_A,
    sample_claim5_triple,
    sample_claim6_triple,
    sample_in_class,
    trace_class,
)

fin = FinOrCofin.finite
cofin = FinOrCofin.cofinite


class TestMembership:
    @pytest.mark.parametrize(
        "E, expected",
        [
            (fin([]), TraceClass.F),
            (fin([0, 5]), TraceClass.F0),
            (fin([1]), TraceClass.F1),
            (fin([0, 1]), TraceClass.F01),
            (fin([1, 2, 9]), TraceClass.F12),
            (cofin([4]), TraceClass.C012),
            (fin([0, 1, 2]), TraceClass.F012),
            (fin([2]), None),
            (cofin([1]), None),
        ],
    )
    def test_trace_class(self, E, expected):
        assert trace_class(E) is expected

    def test_envelope_adds_one_class(self):
        E = fin([0, 1, 2])
        assert in_B(E) and not in_A(E)

    def test_upset_of_c(self):
        assert in_up_c(fin([1, 2]))
        assert in_up_c(FinOrCofin.naturals())
        assert not in_up_c(fin([1]))

    def test_meet_stays_in_A(self):
        assert meet_A(fin([0, 1]), fin([1, 2])) == fin([1])
        with pytest.raises(NotInAError):
            meet_A(fin([0, 2]), fin([1]))

    def test_claim4(self):
        assert claim4_closure_holds(fin([0]), fin([0, 1, 7]))
        assert claim4_closure_holds(fin([0, 4]), cofin([9]))


class TestMeetTable:
    def test_class_members(self):
        assert list(class_members(TraceClass.C012, 3)) == [cofin([]), cofin([3])]
        members = list(class_members(TraceClass.F12, 4))
        assert members == [fin([1, 2]), fin([1, 2, 3]), fin([1, 2, 4]), fin([1, 2, 3, 4])]
        assert all(trace_class(E) is TraceClass.F12 for E in members)

    def test_every_class_pair_is_closed(self):
        table = meet_table(5)
        assert len(table.classes) == len(A_CLASSES) ** 2
        # eight members per class
        assert table.pairs == (6 * 8) ** 2

    @pytest.mark.parametrize(
        "pair, expected",
        [
            ((TraceClass.F0, TraceClass.F12), TraceClass.F),
            ((TraceClass.F01, TraceClass.F12), TraceClass.F1),
            ((TraceClass.F01, TraceClass.F0), TraceClass.F0),
            ((TraceClass.F12, TraceClass.C012), TraceClass.F12),
            ((TraceClass.C012, TraceClass.C012), TraceClass.C012),
        ],
    )
    def test_meet_classes(self, pair, expected):
        assert meet_table(4).classes[pair] is expected

    def test_bound(self):
        with pytest.raises(PreconditionViolatedError):
            meet_table(2)


class TestSeparation:
    def test_claim1_small_gap(self):
        w = claim1_witness_traced(fin([0]), fin([0, 1]))
        assert w.case == "n_ne_2"
        assert w.z == fin([0, 1])

    def test_claim1_gap_at_two(self):
        w = claim1_witness_traced(fin([0, 1]), FinOrCofin.naturals())
        assert w.case == "n_eq_2"
        assert w.z == fin([0, 3])

    def test_claim1_rejects_contained(self):
        with pytest.raises(PreconditionViolatedError):
            claim1_witness(fin([0, 1]), fin([0]))

    def test_claim1_rejects_outside_upset(self):
        with pytest.raises(PreconditionViolatedError):
            claim1_witness(fin([1]), fin([0]))

    def test_claim2(self):
        assert claim2_witness(fin([1]), fin([1, 2])) == fin([1, 2])
        assert claim2_witness(fin([1, 2]), cofin([5])) == fin([0, 1])

    def test_claim3(self):
        report = claim3_refute()
        assert report.refuted
        assert report.witness_pair == (fin([1]), fin([1, 2]))
        assert report.below_c == (fin([]), fin([1]), fin([1, 2]))
        assert [c.trace_class for c in report.classes] == list(A_CLASSES)


class TestExtension:
    def test_claim5_cofinite_case(self):
        w = claim5_extension(fin([1, 2]), fin([1]), fin([0, 1]))
        assert w.case == "b_cofinite"
        assert w.x_prime == FinOrCofin.naturals()
        assert w.y_prime == fin([0, 1])

    def test_claim5_plain_case(self):
        x_prime, y_prime = claim5_witness(fin([1, 4]), fin([1, 5]), fin([1]))
        assert (x_prime, y_prime) == (fin([1, 4]), fin([1, 5]))

    def test_claim5_needs_meet_below_z(self):
        with pytest.raises(PreconditionViolatedError):
            claim5_witness(fin([1, 4]), fin([1, 4]), fin([1]))

    def test_claim6_cofinite_case(self):
        w = claim6_extension(fin([1, 2]), fin([7]), fin([0]))
        assert w.case == "ii_cofinite"
        assert w.x_prime == cofin([7])
        assert w.y_prime == fin([0, 7])

    def test_claim6_first_case(self):
        x_prime, y_prime = claim6_witness(fin([3]), fin([4]), fin([]))
        assert x_prime & y_prime == fin([])

    def test_claim6_rejects_outside_A(self):
        with pytest.raises(PreconditionViolatedError):
            claim6_witness(fin([2]), fin([]), fin([]))


class TestSampling:
    def test_sample_in_each_class(self):
        rng = np.random.default_rng(0)
        for cls in A_CLASSES:
            for _ in range(20):
                assert trace_class(sample_in_class(cls, 12, rng)) is cls

    def test_bound_must_leave_room(self):
        with pytest.raises(PreconditionViolatedError):
            sample_A(3, np.random.default_rng(0))

    def test_claim5_triples_are_valid(self):
        rng = np.random.default_rng(1)
        seen = {claim5_extension(*sample_claim5_triple(16, rng)).case for _ in range(300)}
        assert seen <= set(CLAIM5_CASES)
        assert "b_cofinite" in seen

    def test_claim6_triples_are_valid(self):
        rng = np.random.default_rng(2)
        seen = {claim6_extension(*sample_claim6_triple(16, rng)).case for _ in range(300)}
        assert seen <= set(CLAIM6_CASES)
        assert {"i", "ii_cofinite", "iii_cofinite"} <= seen

    def test_class_frequencies(self):
        counts = class_frequencies([fin([0]), fin([0, 3]), cofin([]), fin([2])])
        assert counts["F0"] == 2
        assert counts["C012"] == 1
        assert sum(counts.values()) == 3
