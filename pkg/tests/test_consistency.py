import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legalsumm.consistency import (
    LexicalOverlapScorer,
    audit_summary,
    detect_merge_artifacts,
    document_summac,
    extract_entities,
    extract_numbers,
    ne_prec,
    num_prec,
    summac_score,
)
from legalsumm.errors import ValidationError

MATRICES = st.integers(1, 6).flatmap(
    lambda rows: st.integers(1, 6).flatmap(
        lambda cols: st.lists(
            st.lists(st.floats(0, 1, allow_nan=False), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
)


def summac_oracle(matrix):
    total = 0.0
    n_cols = len(matrix[0])
    for j in range(n_cols):
        best = 0.0
        for row in matrix:
            best = max(best, row[j])
        total += best
    return total / n_cols


class TestExtractNumbers:
    def test_dates_and_amounts(self):
        assert extract_numbers("On December 20, 1963, fined Rs. 1,000") == {
            "20",
            "1963",
            "1000",
        }

    def test_statute_subsection(self):
        assert extract_numbers("Section 10(b)") == {"10"}

    def test_no_digits(self):
        assert extract_numbers("no digits here") == set()

    def test_decimal_kept_distinct(self):
        assert extract_numbers("rates of 25 and 25.0 per cent") == {"25", "25.0"}

    def test_ordinal_suffix_stripped(self):
        assert extract_numbers("the 21st day") == {"21"}


class TestExtractEntities:
    def test_person(self):
        assert extract_entities("Mahabir filed an application") == {"mahabir"}

    def test_no_capitals(self):
        assert extract_entities("the court agreed") == set()

    def test_sentence_initial_stopword_excluded(self):
        assert extract_entities("The court agreed") == set()

    def test_long_run_with_connectors(self):
        text = "U.S. District Court for the Southern District of New York entered"
        assert "u.s. district court for the southern district of new york" in extract_entities(text)

    def test_gazetteer(self):
        names = extract_entities("the matter of daulatram was heard", gazetteer=["Daulatram"])
        assert "daulatram" in names


class TestNumPrec:
    def test_partial_overlap(self):
        summary = "In 1963 and again in 2019 the fine stood."
        document = "In 1963 a fine of Rs. 25 was imposed."
        assert num_prec(summary, document) == 0.5

    def test_vacuous(self):
        assert num_prec("no numbers at all", "some 42 here") == 1.0

    def test_verbatim_subset(self):
        document = "On May 21, 1964, Mahabir paid Rs. 1,000."
        assert num_prec(document, document) == 1.0


class TestNePrec:
    def test_confused_judge_name_unmatched(self):
        summary = "The Honorable M.K. Ramaswami of the Madras High Court presided."
        document = (
            "The judgement of V. Ramaswami was delivered in court. "
            "M.K. Ramamurthi appeared for the appellant."
        )
        assert ne_prec(summary, document) < 1.0

    def test_copied_entities_match(self):
        document = "Mahabir Prasad appeared before the Bombay High Court in January."
        assert ne_prec(document, document) == 1.0

    def test_vacuous(self):
        assert ne_prec("no entities here at all", "whatever document") == 1.0


class TestSummac:
    def test_singleton(self):
        assert summac_score([[0.7]]) == pytest.approx(0.7)

    def test_max_over_premises(self):
        assert summac_score([[0.9], [0.2]]) == pytest.approx(0.9)

    def test_max_then_mean(self):
        assert summac_score([[0.9, 0.1], [0.3, 0.8]]) == pytest.approx(0.85)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            summac_score([])

    @settings(max_examples=200, deadline=None)
    @given(MATRICES)
    def test_matches_oracle(self, matrix):
        assert summac_score(matrix) == pytest.approx(summac_oracle(matrix), abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(MATRICES, st.randoms())
    def test_monotone_and_permutation_invariant(self, matrix, rng):
        base = summac_score(matrix)
        i = rng.randrange(len(matrix))
        j = rng.randrange(len(matrix[0]))
        bumped = [row[:] for row in matrix]
        bumped[i][j] = min(1.0, bumped[i][j] + rng.random())
        assert summac_score(bumped) >= base - 1e-12

        rows = matrix[:]
        rng.shuffle(rows)
        assert summac_score(rows) == pytest.approx(base, abs=1e-12)

        perm = list(range(len(matrix[0])))
        rng.shuffle(perm)
        cols = [[row[j] for j in perm] for row in matrix]
        assert summac_score(cols) == pytest.approx(base, abs=1e-12)


class TestMergeArtifacts:
    def test_the_the(self):
        text = "under sections 4 and 5 of theThe case involves allegations"
        flags = detect_merge_artifacts(text)
        assert len(flags) == 1
        assert text[flags[0].start : flags[0].end] == "theThe"

    def test_order_there(self):
        text = "Exports (Control) OrderThere is no circumstance"
        flags = detect_merge_artifacts(text)
        assert len(flags) == 1
        assert text[flags[0].start : flags[0].end] == "OrderThere"

    def test_mc_exception(self):
        assert detect_merge_artifacts("McDonald testified") == []

    def test_custom_exception_list(self):
        assert detect_merge_artifacts("the iPhone case", exceptions=["iPhone"]) == []
        assert len(detect_merge_artifacts("the iPhone case")) == 1


class TestAudit:
    DOCUMENT = (
        "On May 21, 1964, Mahabir filed an application under ss. 4 and 5 of the "
        "Contempt of Courts Act, 1952. The court heard the parties at length. "
        "The application was dismissed with costs of Rs. 100."
    )

    def test_verbatim_summary_clean(self):
        flags = audit_summary(self.DOCUMENT, self.DOCUMENT)
        assert flags == []

    def test_unsupported_number_flagged(self):
        summary = "The application was dismissed with costs of Rs. 100 in 2019."
        flags = audit_summary(summary, self.DOCUMENT)
        numbers = [f for f in flags if f.kind == "unsupported_number"]
        assert len(numbers) == 1
        assert summary[numbers[0].start : numbers[0].end] == "2019"

    def test_threshold_zero_no_low_nli(self):
        summary = "Entirely unrelated words about ships and harbors."
        flags = audit_summary(summary, self.DOCUMENT, nli_threshold=0.0)
        assert not [f for f in flags if f.kind == "low_nli_sentence"]

    def test_low_nli_flagged_at_default_threshold(self):
        summary = "Entirely unrelated words about ships and harbors."
        flags = audit_summary(summary, self.DOCUMENT)
        assert [f for f in flags if f.kind == "low_nli_sentence"]

    def test_flags_sorted_and_in_bounds(self):
        summary = (
            "In 2019 the OrderThere was quashed. Wholly unrelated ramblings about "
            "spacecraft and glaciers persist."
        )
        flags = audit_summary(summary, self.DOCUMENT)
        starts = [f.start for f in flags]
        assert starts == sorted(starts)
        for f in flags:
            assert 0 <= f.start <= f.end <= len(summary)

    def test_invalid_threshold(self):
        with pytest.raises(ValidationError):
            audit_summary("x", "y", nli_threshold=1.5)


class TestLexicalScorer:
    def test_matrix_shape_and_range(self):
        scorer = LexicalOverlapScorer()
        matrix = scorer.nli(["a b c", "c d"], ["a b", "z z", "c"])
        assert len(matrix) == 2 and all(len(row) == 3 for row in matrix)
        assert all(0.0 <= v <= 1.0 for row in matrix for v in row)
        assert matrix[0][0] == 1.0  # both tokens of "a b" occur in "a b c"

    def test_document_summac_identity(self):
        text = "The court agreed. The appeal was dismissed."
        assert document_summac(text, text) == pytest.approx(1.0)
