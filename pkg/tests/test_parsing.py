import pytest

from tsf.errors import MalformedPatchList, NoListFound, NonNumericElement, WrongCount
from tsf.parsing import parse_patches, parse_prediction, patch_fidelity
from tsf.patching import Patch, overlapping_patches


class TestParsePrediction:
    def test_prediction_marker(self):
        text = "Patches:\n[[2,3,4],[1,2,3]]\nPrediction:\n[0.1, 0.2, 0.3]"
        assert parse_prediction(text, 3) == [0.1, 0.2, 0.3]

    def test_bare_list(self):
        assert parse_prediction("[7.5]", 1) == [7.5]

    def test_wrong_count(self):
        with pytest.raises(WrongCount) as exc:
            parse_prediction("Prediction: [1, 2]", 3)
        assert exc.value.found == 2
        assert exc.value.expected == 3

    def test_last_list_wins_without_marker(self):
        text = "Input was [1, 2, 3] and the answer is [4, 5, 6]"
        assert parse_prediction(text, 3) == [4, 5, 6]

    def test_surrounding_prose_tolerated(self):
        text = "Sure! Here is the forecast:\nPrediction: [1.5, 2.5] .\nHope that helps."
        assert parse_prediction(text, 2) == [1.5, 2.5]

    def test_scientific_notation(self):
        assert parse_prediction("[1e-3, 2.5E2]", 2) == [0.001, 250.0]

    def test_no_list(self):
        with pytest.raises(NoListFound):
            parse_prediction("no numbers here", 1)

    def test_non_numeric(self):
        with pytest.raises(NonNumericElement):
            parse_prediction("[a, b]", 2)

    def test_lenient_truncates(self):
        assert parse_prediction("[1, 2, 3, 4]", 2, lenient=True) == [1, 2]

    def test_lenient_pads_with_last(self):
        assert parse_prediction("[1, 2]", 4, lenient=True) == [1, 2, 2, 2]

    def test_round_trip_with_rendering(self):
        from tsf.dataset import format_value

        values = [0.80325, 1.0, -2.4689]
        text = "[" + ", ".join(format_value(v) for v in values) + "]"
        parsed = parse_prediction(text, 3)
        assert [format_value(p) for p in parsed] == [format_value(v) for v in values]

    def test_deterministic(self):
        text = "Prediction:\n[9.1, 9.2]"
        assert parse_prediction(text, 2) == parse_prediction(text, 2)


class TestParsePatches:
    def test_basic(self):
        text = "Patches:\n[[2,3,4],[1,2,3]]\nPrediction:\n[5]"
        patches = parse_patches(text)
        assert [p.values for p in patches] == [(2, 3, 4), (1, 2, 3)]

    def test_absent_marker(self):
        assert parse_patches("[1, 2, 3]") is None

    def test_malformed(self):
        with pytest.raises(MalformedPatchList):
            parse_patches("Patches:\n[[1,2,")

    def test_non_numeric_patch(self):
        with pytest.raises(MalformedPatchList):
            parse_patches("Patches:\n[[1,x]]")


class TestPatchFidelity:
    def test_identity(self):
        truth = overlapping_patches([1, 2, 3, 4], w=3, s=1)
        rep = patch_fidelity(list(truth.patches), truth)
        assert rep.exact_fraction == 1.0
        assert rep.mean_abs_dev == 0

    def test_empty_echo(self):
        truth = overlapping_patches([1, 2, 3, 4], w=3, s=1)
        rep = patch_fidelity([], truth)
        assert rep.exact_fraction == 0.0
        assert rep.mean_abs_dev is None

    def test_one_of_two_perturbed(self):
        truth = overlapping_patches([1, 2, 3, 4], w=3, s=1)
        echoed = [Patch(values=(1, 2, 3)), Patch(values=(2, 3, 4.5))]
        rep = patch_fidelity(echoed, truth)
        assert rep.exact_fraction == 0.5
        assert rep.mean_abs_dev == pytest.approx(0.5 / 6)

    def test_surplus_counts_as_mismatch(self):
        truth = overlapping_patches([1, 2, 3], w=3, s=1)
        echoed = [Patch(values=(1, 2, 3)), Patch(values=(9, 9, 9))]
        rep = patch_fidelity(echoed, truth)
        assert rep.exact_fraction == 0.5

    def test_within_tolerance(self):
        truth = overlapping_patches([1, 2, 3], w=3, s=1)
        echoed = [Patch(values=(1.00005, 2, 3))]
        rep = patch_fidelity(echoed, truth, tol=1e-4)
        assert rep.exact_fraction == 1.0
