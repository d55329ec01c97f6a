import random

import pytest
from hypothesis import given, strategies as st

from propertopes.core import ArityError, profile_act, profile_ract
from propertopes.perms import Perm, block_perm, block_sum


def test_identity_action_on_profile():
    p = ("c", "d", "c")
    assert profile_act(Perm.identity(3), p) == p


def test_transposition_action():
    swap = Perm.from_one_based([2, 1])
    assert profile_act(swap, ("c", "d")) == ("d", "c")


def test_three_cycle_matches_composed_transpositions():
    # sigma = (1,2,3 -> 3,1,2) as a composite of two transpositions, applied stepwise
    sigma = Perm.from_one_based([3, 1, 2])
    t1 = Perm.from_one_based([2, 1, 3])  # swap positions 1,2
    t2 = Perm.from_one_based([1, 3, 2])  # swap positions 2,3
    assert t2.compose(t1).images == sigma.images
    p = ("a", "b", "c")
    stepwise = profile_act(t2, profile_act(t1, p))
    assert profile_act(sigma, p) == stepwise == ("b", "c", "a")


def test_length_mismatch_rejected():
    with pytest.raises(ArityError):
        profile_act(Perm.identity(2), ("a", "b", "c"))


perm_sizes = st.integers(min_value=1, max_value=6)


@st.composite
def perms(draw, k=None):
    n = k if k is not None else draw(perm_sizes)
    images = draw(st.permutations(range(n)))
    return Perm(tuple(images))


@given(st.data())
def test_left_action_is_functorial(data):
    n = data.draw(perm_sizes)
    a = data.draw(perms(k=n))
    b = data.draw(perms(k=n))
    seq = tuple(range(100, 100 + n))
    assert a.compose(b).act(seq) == a.act(b.act(seq))


@given(st.data())
def test_right_action_is_antitonic(data):
    n = data.draw(perm_sizes)
    a = data.draw(perms(k=n))
    b = data.draw(perms(k=n))
    seq = tuple(range(100, 100 + n))
    assert b.ract(a.ract(seq)) == a.compose(b).ract(seq)


@given(st.data())
def test_ract_is_act_of_inverse(data):
    n = data.draw(perm_sizes)
    a = data.draw(perms(k=n))
    seq = tuple(range(n))
    assert profile_ract(seq, a) == a.inverse().act(seq)


def test_block_sum_and_block_perm():
    s = block_sum(Perm.from_one_based([2, 1]), Perm.identity(1))
    assert s.images == (1, 0, 2)
    # move block 0 (size 2) to slot 1 and block 1 (size 1) to slot 0
    bp = block_perm(Perm.from_one_based([2, 1]), [2, 1])
    assert bp.act(("a", "b", "c")) == ("c", "a", "b")


def test_random_perm_deterministic_under_seed():
    assert Perm.random(5, random.Random(7)) == Perm.random(5, random.Random(7))
