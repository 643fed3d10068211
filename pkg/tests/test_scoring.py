import pytest

from src.analyzers.scoring import (
    TaskScore,
    aggregate_scores,
    baseline_normalized,
    human_normalized,
    iqm,
    median_aggregate,
    normalize,
    success_normalized,
)
from src.errors import InvalidInputError, InvalidReferenceError
from src.parsers.tables import fill_references, load_reference_scores, parse_score_table
from src.services.scoring_service import score_table


@pytest.fixture
def references():
    return load_reference_scores()


def test_reference_table_is_complete(references):
    assert len(references) == 14
    assert references["h1-walk"] == (2.38, 700.0)
    assert references["h1-reach"] == (260.30, 12000.0)


def test_success_normalization_reference_rows(references):
    assert success_normalized(700.0, *references["h1-walk"]) == 1.0
    assert success_normalized(272.66, *references["h1-crawl"]) == 0.0
    assert success_normalized(360.045, *references["h1-pole"]) == pytest.approx(0.5, abs=1e-12)


def test_references_normalize_to_zero_and_one():
    assert baseline_normalized(3.0, 3.0, 9.0) == 0.0
    assert baseline_normalized(9.0, 3.0, 9.0) == 1.0
    assert human_normalized(-20.0, -20.0, 15.0) == 0.0
    assert human_normalized(15.0, -20.0, 15.0) == 1.0


def test_degenerate_references():
    with pytest.raises(InvalidReferenceError):
        baseline_normalized(1.0, 5.0, 5.0)
    with pytest.raises(InvalidReferenceError):
        baseline_normalized(1.0, 6.0, 5.0)
    with pytest.raises(InvalidReferenceError):
        human_normalized(1.0, 2.0, 2.0)
    with pytest.raises(InvalidReferenceError):
        success_normalized(1.0, 2.0, 2.0)


def test_missing_reference_names_the_task():
    with pytest.raises(InvalidReferenceError, match="h1-run"):
        normalize(TaskScore(task="h1-run", score=1.0), "success")


def test_unknown_method():
    with pytest.raises(InvalidInputError):
        normalize(TaskScore(task="t", score=1.0, random=0.0, target=1.0), "zscore")


def test_median_averages_seeds_first():
    assert median_aggregate({"a": [1.0, 3.0], "b": [5.0], "c": [0.0, 0.0]}) == 2.0


def test_median_even_task_count():
    assert median_aggregate({"a": [1.0], "b": [2.0], "c": [3.0], "d": [10.0]}) == 2.5


def test_median_ignores_task_order():
    forward = {"a": [1.0], "b": [7.0], "c": [4.0]}
    backward = dict(reversed(list(forward.items())))
    assert median_aggregate(forward) == median_aggregate(backward)


def test_iqm_drops_quartiles():
    assert iqm([8, 1, 7, 2, 6, 3, 5, 4]) == 4.5
    assert iqm([1.0, 2.0, 9.0]) == 4.0


@pytest.mark.parametrize("values,expected", [
    ([1.0, 2.0, 3.0, 4.0, 100.0], 3.0),
    ([-50.0, 1.0, 2.0, 3.0, 4.0, 100.0], 2.5),
    ([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 3.0),
])
def test_iqm_cuts_floor_of_a_quarter(values, expected):
    assert iqm(v for v in values) == pytest.approx(expected, abs=1e-15)


def test_iqm_of_symmetric_set_is_median():
    values = [-3.0, -1.0, 0.0, 0.5, 1.0, 3.0, -0.5]
    assert iqm(values) == pytest.approx(0.0, abs=1e-15)


def test_iqm_within_range():
    values = [0.3, 12.0, -4.0, 2.2, 0.0, 7.5]
    assert min(values) <= iqm(values) <= max(values)


def test_empty_aggregates():
    with pytest.raises(InvalidInputError):
        iqm([])
    with pytest.raises(InvalidInputError):
        median_aggregate({})


def test_aggregate_scores_uses_task_seed_pairs():
    rows = [
        TaskScore(task="a", seed=0, score=1.0, random=0.0, target=1.0),
        TaskScore(task="a", seed=1, score=0.0, random=0.0, target=1.0),
        TaskScore(task="b", seed=0, score=0.5, random=0.0, target=1.0),
        TaskScore(task="b", seed=1, score=0.5, random=0.0, target=1.0),
    ]
    assert aggregate_scores(rows, "success", "median") == 0.5
    assert aggregate_scores(rows, "success", "iqm") == 0.5


def test_score_table_fills_references(references):
    rows = parse_score_table("task,seed,score\nh1-walk,0,700\nh1-crawl,0,272.66\nh1-pole,0,360.045\n")
    result = score_table(rows, "success", "median", references)
    assert [r["normalized"] for r in result["rows"]][:2] == [1.0, 0.0]
    assert result["value"] == pytest.approx(0.5, abs=1e-12)


def test_given_references_win_over_bundled(references):
    rows = [TaskScore(task="h1-walk", score=5.0, random=0.0, target=10.0)]
    fill_references(rows, references)
    assert (rows[0].random, rows[0].target) == (0.0, 10.0)


def test_score_table_parsing_errors():
    with pytest.raises(InvalidInputError):
        parse_score_table("task,value\na,1\n")
    with pytest.raises(InvalidInputError):
        parse_score_table("task,score\na,notanumber\n")
    with pytest.raises(InvalidInputError):
        parse_score_table("task,score\n")
