import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsf.errors import EvenTrendWindow, InvalidClockTime, LengthMismatch, WindowTooLarge
from tsf.patching import (
    PatchOrder,
    composite_tokens,
    meta_tokens,
    nonoverlapping_patches,
    overlapping_patches,
    reverse_patches,
    slot_index,
    str_decompose,
)

contexts = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=3, max_size=200
)


class TestOverlapping:
    def test_basic_example(self):
        ps = overlapping_patches([1, 2, 3, 4], w=3, s=1)
        assert [p.values for p in ps.patches] == [(1, 2, 3), (2, 3, 4)]

    def test_count_default_window(self):
        ps = overlapping_patches(list(range(96)), w=3, s=1)
        assert len(ps.patches) == 94

    def test_identity_case(self):
        ps = overlapping_patches([1, 2, 3], w=3, s=1)
        assert [p.values for p in ps.patches] == [(1, 2, 3)]

    def test_window_too_large(self):
        with pytest.raises(WindowTooLarge):
            overlapping_patches([1, 2], w=3, s=1)

    @given(contexts)
    def test_count_and_heads(self, ctx):
        ps = overlapping_patches(ctx, w=3, s=1)
        assert len(ps.patches) == len(ctx) - 2
        assert [p.values[0] for p in ps.patches] == ctx[: len(ctx) - 2]


class TestReverse:
    def test_example(self):
        ps = overlapping_patches([1, 2, 3, 4], w=3, s=1)
        rev = reverse_patches(ps)
        assert [p.values for p in rev.patches] == [(2, 3, 4), (1, 2, 3)]
        assert rev.order is PatchOrder.REVERSED

    def test_single_patch(self):
        ps = overlapping_patches([1, 2, 3], w=3, s=1)
        assert reverse_patches(ps).patches == ps.patches

    @given(contexts)
    def test_involution_and_multiset(self, ctx):
        ps = overlapping_patches(ctx, w=3, s=1)
        rev = reverse_patches(ps)
        assert tuple(reversed(rev.patches)) == ps.patches
        assert sorted(p.values for p in rev.patches) == sorted(p.values for p in ps.patches)


class TestNonOverlapping:
    def test_paper_example(self):
        ctx = [8.35, 8.36, 8.32, 8.45, 8.35, 8.25, 8.20, 8.09, 8.13, 8.00, 7.94, 7.86]
        ps = nonoverlapping_patches(ctx, 3)
        assert [list(p.values) for p in ps.patches] == [
            [8.35, 8.36, 8.32],
            [8.45, 8.35, 8.25],
            [8.20, 8.09, 8.13],
            [8.00, 7.94, 7.86],
        ]

    def test_96_by_5_drops_oldest(self):
        ctx = list(range(96))
        ps = nonoverlapping_patches(ctx, 5)
        assert len(ps.patches) == 19
        covered = [v for p in ps.patches for v in p.values]
        assert covered == ctx[1:]

    def test_identity(self):
        ps = nonoverlapping_patches([1, 2, 3], 3)
        assert [p.values for p in ps.patches] == [(1, 2, 3)]

    def test_window_too_large(self):
        with pytest.raises(WindowTooLarge):
            nonoverlapping_patches([1, 2], 3)

    @given(contexts, st.integers(min_value=1, max_value=12))
    def test_disjoint_suffix_cover(self, ctx, h):
        if h > len(ctx):
            h = len(ctx)
        ps = nonoverlapping_patches(ctx, h)
        covered = [v for p in ps.patches for v in p.values]
        assert covered == ctx[len(ctx) % h :]
        assert all(len(p.values) == h for p in ps.patches)


class TestStrDecompose:
    def test_constant(self):
        d = str_decompose([5, 5, 5, 5, 5], 5)
        assert d.trend == (5, 5, 5, 5, 5)
        assert d.residual == (0, 0, 0, 0, 0)

    def test_window_one_identity(self):
        d = str_decompose([1.5, 2.5, 3.5], 1)
        assert d.trend == (1.5, 2.5, 3.5)
        assert d.residual == (0, 0, 0)

    def test_hand_computed(self):
        d = str_decompose([1, 2, 3, 4, 5], 3)
        assert d.trend == (1.5, 2, 3, 4, 4.5)
        assert d.residual == (-0.5, 0, 0, 0, 0.5)

    def test_even_window_rejected(self):
        with pytest.raises(EvenTrendWindow):
            str_decompose([1, 2, 3, 4], 4)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=5, max_size=200))
    def test_identity_exact(self, ctx):
        d = str_decompose(ctx, 5)
        assert all(t + r == x for x, t, r in zip(ctx, d.trend, d.residual))

    def test_composite_tokens(self):
        d = str_decompose([1, 2, 3, 4, 5], 3)
        pairs = composite_tokens(d)
        assert pairs[0] == (1.5, -0.5)
        assert len(pairs) == 5
        assert pairs == list(zip(d.trend, d.residual))


class TestSlotIndex:
    @pytest.mark.parametrize("h,m,slot", [(10, 30, 63), (0, 0, 0), (23, 59, 143)])
    def test_examples(self, h, m, slot):
        assert slot_index(h, m) == slot

    def test_invalid(self):
        with pytest.raises(InvalidClockTime):
            slot_index(24, 0)
        with pytest.raises(InvalidClockTime):
            slot_index(10, 60)

    def test_nondecreasing_and_surjective_at_10min(self):
        slots = [slot_index(t // 60, t % 60) for t in range(0, 1440, 10)]
        assert slots == sorted(slots)
        assert sorted(set(slots)) == list(range(144))


class TestMetaTokens:
    def test_slot_pairing(self):
        # 10:30 UTC on day one
        ts = 10 * 3600 + 30 * 60
        assert meta_tokens([8.35], [ts]) == [(8.35, 63)]

    def test_midnight(self):
        assert meta_tokens([1.0], [0]) == [(1.0, 0)]

    def test_96_at_10min_cadence(self):
        values = [float(i) for i in range(96)]
        stamps = [600 * i for i in range(96)]
        assert [slot for _, slot in meta_tokens(values, stamps)] == list(range(96))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            meta_tokens([1.0, 2.0], [0])
