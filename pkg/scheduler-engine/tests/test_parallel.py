import pytest

from utils.parallel import first_success


def _probe(item):
    return (item * 10 if item % 7 == 3 else None), 2


@pytest.mark.parametrize("threads", [1, 2, 5])
def test_first_success_is_smallest_index(threads):
    index, result, probed, nodes = first_success(range(40), _probe, threads=threads, batch_size=4)
    assert (index, result) == (3, 30)
    assert probed >= 4
    assert nodes == 2 * probed


@pytest.mark.parametrize("threads", [1, 3])
def test_no_success_probes_everything(threads):
    index, result, probed, nodes = first_success([0, 1, 2], _probe, threads=threads)
    assert (index, result) == (None, None)
    assert (probed, nodes) == (3, 6)


def _count_leaves(item):
    return None, (1, {"leaves": item})


@pytest.mark.parametrize("threads", [1, 3])
def test_extra_counts_are_summed(threads):
    extra = {"leaves": 5}
    _, _, probed, nodes = first_success(range(10), _count_leaves, threads=threads, batch_size=3, extra=extra)
    assert (probed, nodes) == (10, 10)
    assert extra == {"leaves": 5 + sum(range(10))}
