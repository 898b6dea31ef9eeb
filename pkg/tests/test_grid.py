import itertools

import pytest
from hypothesis import given, strategies as st

from ltdps.exceptions import DomainError, IdentificationError
from ltdps.grid import GridTopology

# Region-AP map for the first twelve regions, as published.
REGION_MAP = {
    0: {0}, 1: {0, 1}, 2: {1, 2}, 3: {2, 3}, 4: {3, 4}, 6: {0, 5},
    7: {0, 1, 5, 6}, 8: {1, 2, 6, 7}, 9: {2, 3, 7, 8}, 10: {3, 4, 8, 9}, 11: {4, 9},
}


def geometric_region_aps(grid, region):
    """Independent oracle: APs sitting on a corner of the region's unit square."""
    i, j = divmod(region, grid.ap_cols + 1)
    corners = {(j + dx, i + dy) for dx in (0, 1) for dy in (0, 1)}
    out = set()
    for ap in range(grid.ap_rows * grid.ap_cols):
        r, c = divmod(ap, grid.ap_cols)
        if (c + 1, r + 1) in corners:
            out.add(ap)
    return out


def chebyshev_neighbors(grid, ap):
    r, c = divmod(ap, grid.ap_cols)
    return {b for b in range(grid.n_aps)
            if b != ap and max(abs(b // grid.ap_cols - r), abs(b % grid.ap_cols - c)) == 1}


def test_region_map_rows(grid):
    for region, aps in REGION_MAP.items():
        assert set(grid.region_aps(region)) == aps


def test_region_map_corner_row_as_printed(grid):
    # The published row lists AP5 for corner region 5. The lattice puts AP4 at that
    # corner (region 4 is {3, 4}, region 11 is {4, 9}); no consistent map can
    # satisfy the printed row, so this check stays red.
    assert set(grid.region_aps(5)) == {5}


def test_corner_region_5_follows_lattice(grid):
    assert grid.region_aps(5) == (4,)


@pytest.mark.parametrize("ap,expected", [
    (19, {13, 14, 18, 23, 24}),
    (13, {7, 8, 9, 12, 14, 17, 18, 19}),
    (21, {15, 16, 17, 20, 22}),
    (15, {10, 11, 16, 20, 21}),
    (22, {16, 17, 18, 21, 23}),
    (0, {1, 5, 6}),
    (12, {6, 7, 8, 11, 13, 16, 17, 18}),
])
def test_published_neighbor_sets(grid, ap, expected):
    assert set(grid.ap_neighbors(ap)) == expected


@pytest.mark.parametrize("ap,region,expected", [
    (19, 15, {13}),
    (13, 9, {7, 8}),
    (21, 18, {15}),
    (22, 25, {16, 21}),
    (15, 19, {10, 11, 16}),
])
def test_candidate_sets(grid, ap, region, expected):
    assert set(grid.candidate_next_aps(ap, region)) == expected


def test_region_examples(grid):
    assert set(grid.region_aps(15)) == {7, 8, 12, 13}
    assert grid.region_aps(35) == (24,)
    assert grid.region_of({0, 1, 5, 6}) == 7
    assert grid.region_of([0]) == 0
    assert grid.region_of({4, 9}) == 11


@pytest.mark.parametrize("rows,cols", [(5, 5), (3, 3), (2, 4), (4, 2), (2, 2)])
def test_region_aps_match_geometry(rows, cols):
    g = GridTopology(rows, cols)
    assert g.n_regions == (rows + 1) * (cols + 1)
    for region in range(g.n_regions):
        assert set(g.region_aps(region)) == geometric_region_aps(g, region)
        assert g.region_of(g.region_aps(region)) == region
    for ap in range(g.n_aps):
        assert set(g.ap_neighbors(ap)) == chebyshev_neighbors(g, ap)
        assert len(g.regions_of_ap(ap)) == 4


def test_exhaustive_candidate_sizes(grid):
    sizes = set()
    for ap, region in itertools.product(range(25), range(36)):
        s = grid.candidate_next_aps(ap, region)
        assert set(s) == set(grid.ap_neighbors(ap)) & set(grid.region_aps(region))
        assert list(s) == sorted(s)
        sizes.add(len(s))
    assert sizes == {0, 1, 2, 3}


def test_symmetry_and_cover(grid):
    for a, b in itertools.product(range(25), repeat=2):
        assert (b in grid.ap_neighbors(a)) == (a in grid.ap_neighbors(b))
    union = set().union(*(grid.region_aps(g) for g in range(36)))
    assert union == set(range(25))
    assert [len(grid.ap_neighbors(a)) for a in (0, 2, 12)] == [3, 5, 8]


def test_bounds_errors(grid):
    for bad in (-1, 25, 1.5, "3"):
        with pytest.raises(DomainError):
            grid.ap_neighbors(bad)
    with pytest.raises(DomainError):
        grid.region_aps(36)
    with pytest.raises(IdentificationError):
        grid.region_of({0, 2})
    with pytest.raises(IdentificationError):
        grid.region_of(set())
    for dims in ((0, 5), (1, 1), (1, 4)):
        with pytest.raises(DomainError):
            GridTopology(*dims)


def test_non_adjacent_region_gives_empty_set(grid):
    assert grid.candidate_next_aps(0, 35) == ()


@given(st.integers(0, 5), st.integers(0, 5), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_region_at_inverts_cells(i, j, fx, fy):
    g = GridTopology()
    assert g.region_at(j + fx, i + fy) == i * 6 + j


def test_adjacent_regions_are_moore(grid):
    for g in range(36):
        i, j = grid.region_cell(g)
        expect = {h for h in range(36) if h != g
                  and max(abs(h // 6 - i), abs(h % 6 - j)) == 1}
        assert set(grid.adjacent_regions(g)) == expect
