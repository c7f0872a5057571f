import numpy as np
import pytest

from coordproj.core import (
    CoordinateSubset,
    FunctionClass,
    InputError,
    RngStream,
    SizeCapError,
    as_vector,
    banach_norm,
    digest_inputs,
    normalized_lp,
    project,
    project_class,
)


def test_as_vector_rejects_matrices_and_nan():
    with pytest.raises(InputError):
        as_vector([[1.0, 2.0]])
    with pytest.raises(InputError):
        as_vector([1.0, float("nan")])
    v = as_vector([1, 2, 3])
    assert v.dtype == float and v.shape == (3,)


class TestCoordinateSubset:
    def test_one_based_strictly_increasing(self):
        s = CoordinateSubset((1, 3, 4), 5)
        assert s.size == 3
        assert list(s.zero_based()) == [0, 2, 3]

    def test_rejects_bad_indices(self):
        with pytest.raises(InputError):
            CoordinateSubset((0, 1), 4)
        with pytest.raises(InputError):
            CoordinateSubset((2, 2), 4)
        with pytest.raises(InputError):
            CoordinateSubset((3, 1), 4)
        with pytest.raises(InputError):
            CoordinateSubset((5,), 4)

    def test_empty_subset_is_legal(self):
        s = CoordinateSubset((), 7)
        assert s.size == 0

    def test_full_and_mask_constructors(self):
        assert CoordinateSubset.full(3).indices == (1, 2, 3)
        s = CoordinateSubset.from_mask([True, False, True])
        assert s.indices == (1, 3) and s.ambient_n == 3


class TestRngStream:
    def test_same_stream_same_bits(self):
        a = RngStream(7, 3).generator().random(100)
        b = RngStream(7, 3).generator().random(100)
        assert np.array_equal(a, b)

    def test_different_streams_differ(self):
        a = RngStream(7, 3).generator().random(100)
        b = RngStream(7, 4).generator().random(100)
        assert not np.array_equal(a, b)

    def test_substreams_disjoint_across_parents(self):
        # derived ids collide only if the label span is violated
        seen = set()
        for sid in range(5):
            parent = RngStream(0, sid)
            for k in range(5):
                child = parent.substream(k)
                assert child.stream_id not in seen
                seen.add(child.stream_id)

    def test_substream_label_range(self):
        with pytest.raises(InputError):
            RngStream(0).substream(-1)
        with pytest.raises(InputError):
            RngStream(0).substream(1_000_003)


class TestFunctionClass:
    def test_shape_and_accessors(self):
        F = FunctionClass(np.arange(6.0).reshape(2, 3))
        assert (F.m, F.n) == (2, 3)

    def test_values_are_frozen_copies(self):
        base = np.ones((2, 2))
        F = FunctionClass(base)
        base[0, 0] = 99.0
        assert F.values[0, 0] == 1.0
        with pytest.raises(ValueError):
            F.values[0, 0] = 5.0

    def test_bounded_flag_enforced(self):
        FunctionClass(np.array([[1.0, -1.0]]), bounded_by_one=True)
        with pytest.raises(InputError):
            FunctionClass(np.array([[1.0001, 0.0]]), bounded_by_one=True)

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(InputError):
            FunctionClass(np.zeros((0, 3)))
        with pytest.raises(InputError):
            FunctionClass(np.array([[np.inf, 0.0]]))


def test_project_and_project_class():
    v = np.array([10.0, 20.0, 30.0, 40.0])
    s = CoordinateSubset((2, 4), 4)
    assert list(project(v, s)) == [20.0, 40.0]
    F = FunctionClass(np.array([[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]]))
    G = project_class(F, s)
    assert G.values.tolist() == [[2.0, 4.0], [6.0, 8.0]]
    with pytest.raises(InputError):
        project(v, CoordinateSubset((), 4))
    with pytest.raises(InputError):
        project(v, CoordinateSubset((1,), 3))


def test_normalized_lp_oracles():
    v = np.array([3.0, -4.0])
    # mean-power form: ((9 + 16)/2)^(1/2)
    assert normalized_lp(v, 2.0) == pytest.approx(np.sqrt(12.5))
    assert normalized_lp(v, 1.0) == pytest.approx(3.5)
    with pytest.raises(InputError):
        normalized_lp(v, 0.5)


def test_banach_norm_oracles():
    v = np.array([3.0, -4.0])
    assert banach_norm(v, "sup") == 4.0
    assert banach_norm(v, 2.0) == pytest.approx(5.0)
    assert banach_norm(v, 1.0) == pytest.approx(7.0)
    with pytest.raises(InputError):
        banach_norm(v, 0.25)


def test_digest_sensitive_to_values_and_shape():
    a = np.arange(4.0)
    assert digest_inputs(a) == digest_inputs(a.copy())
    assert digest_inputs(a) != digest_inputs(a.reshape(2, 2))
    assert digest_inputs(a, 1) != digest_inputs(a, 2)


def test_error_types_carry_codes():
    err = InputError("BAD_INPUT", "nope")
    assert isinstance(err, ValueError) and err.code == "BAD_INPUT"
    cap = SizeCapError("too big", cost_estimate=1e9)
    assert isinstance(cap, RuntimeError) and cap.code == "SIZE_CAP"
    assert cap.cost_estimate == 1e9
