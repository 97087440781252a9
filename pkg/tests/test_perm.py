from collections import Counter

import pytest

from brownian_replica.errors import DomainError, SizeError
from brownian_replica.perm import (
    Perm,
    all_perms,
    class_members,
    class_size,
    compose,
    conditioned_class,
    conditioned_two_cycles,
    cycle_types,
    product_counts,
)


def test_composition_applies_right_factor_first():
    p = Perm.from_cycles(3, (0, 1))
    q = Perm.from_cycles(3, (1, 2))
    r = compose(p, q)
    assert all(r(i) == p(q(i)) for i in range(3))
    assert p * q == r


def test_inverse_and_identity():
    for p in all_perms(4):
        assert (p * p.inverse()).is_identity()


def test_one_line_round_trip():
    p = Perm.from_one_line([2, 3, 1])
    assert p.one_line() == [2, 3, 1]
    assert p.cycle_type() == (3,)


@pytest.mark.parametrize("n", range(1, 7))
def test_classes_partition_symmetric_group(n):
    seen = set()
    total = 0
    for ct in cycle_types(n):
        members = class_members(n, ct) if n <= 5 else None
        size = class_size(n, ct)
        if members is not None:
            assert len(members) == size
            assert not seen & members
            seen |= members
        total += size
    assert total == len(all_perms(n))


def test_conditioned_two_cycles_partition_class():
    pairs = [(0, 0)]
    parts = [conditioned_two_cycles(3, pairs, s) for s in ("0", "1")]
    assert [len(x) for x in parts] == [1, 2]
    assert parts[0] | parts[1] == class_members(3, (2,))
    assert parts[0] == {Perm.from_cycles(3, (1, 2))}


def test_conditioned_class_two_pairs():
    pairs = [(0, 1), (1, 0)]
    total = sum(len(conditioned_class(4, (2,), pairs, s)) for s in ("00", "01", "10", "11"))
    assert total == class_size(4, (2,))


def test_n3_product_relations():
    X = class_members(3, (2,))
    XX = class_members(3, (3,))
    prod = product_counts(X, X)
    # X.X = 3 I + 3 [XX]
    assert prod == Counter({Perm.identity(3): 3} | {p: 3 for p in XX})
    assert product_counts(XX, X) == Counter({p: 2 for p in X})


def test_errors():
    with pytest.raises(DomainError):
        Perm([0, 0, 1])
    with pytest.raises(SizeError):
        compose(Perm.identity(2), Perm.identity(3))
    with pytest.raises(DomainError):
        class_size(3, (4,))
    with pytest.raises(DomainError):
        conditioned_class(3, (2,), [(0, 0)], "01")
