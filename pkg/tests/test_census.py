import pytest

from lingequiv.census import brute_force_partition, census
from lingequiv.digraph import Digraph
from lingequiv.equivalence import canonical_config, config_orbit, latent_bit_maps, traverse_class
from lingequiv.errors import SizeCapError

TABLE3_SMALL = {
    (3, 0): (54, 54, 54, 41),
    (3, 1): (54, 16, 16, 4),
    (4, 0): (3834, 3834, 3834, 1788),
    (4, 1): (3834, 2000, 2000, 201),
    (4, 2): (3834, 896, 464, 4),
}


@pytest.mark.parametrize("cell", sorted(TABLE3_SMALL))
def test_census_small_cells(cell):
    n, l = cell
    row = census(n, l)
    got = (row.wc_digraphs, row.irreducible_with_variants,
           row.irreducible_unique, row.class_count)
    assert got == TABLE3_SMALL[cell]


def test_census_histograms_tile_the_counts():
    row = census(4, 2)
    assert sum(s * c for s, c in row.class_size_histogram.items()) == \
        row.irreducible_with_variants
    assert sum(s * c for s, c in row.class_size_histogram_unique.items()) == \
        row.irreducible_unique
    assert sum(row.class_size_histogram.values()) == row.class_count


def test_census_matches_bruteforce_partition_membership():
    for (n, l) in ((3, 0), (3, 1), (4, 2)):
        cells = brute_force_partition(n, l)
        row = census(n, l)
        assert len(cells) == row.class_count
        sizes = sorted(len(c) for c in cells)
        assert sizes == sorted(
            s for s, c in row.class_size_histogram.items() for _ in range(c))
        # each brute-force cell is exactly one traversal class
        for cell in cells:
            g = Digraph.from_config(min(cell), n, l)
            ec = traverse_class(g, with_transitions=False)
            maps = latent_bit_maps(n, l)
            labeled = set()
            for m in ec.members:
                labeled |= config_orbit(m.to_config(), maps)
            assert labeled == cell


def test_census_members_stay_weakly_connected():
    for (n, l) in ((3, 1), (4, 2)):
        for cell in brute_force_partition(n, l):
            for cfg in cell:
                assert Digraph.from_config(cfg, n, l).is_weakly_connected()


def test_census_parallel_matches_serial():
    serial = census(4, 1)
    parallel = census(4, 1, parallelism=2)
    assert serial == parallel


def test_census_size_caps():
    with pytest.raises(SizeCapError):
        census(6, 1)
    with pytest.raises(SizeCapError):
        census(7, 1, allow_n6=True)
    with pytest.raises(SizeCapError):
        brute_force_partition(5, 1)
