import pytest

from bloomrf.advisor import (AdvisorInput, advise, candidates, config_from_text, config_to_text,
                             evaluate, template)
from bloomrf.config import basic_config
from bloomrf.errors import BudgetTooSmall


def test_template_for_exact_level_28():
    heights, k, seg = template(64, 28)
    assert heights == (28, 2, 2, 4, 7, 7, 7, 7)
    assert k[1:] == (2, 1, 1, 1, 1, 1, 1)
    assert seg == (0, 1, 1, 1, 2, 2, 2, 2)


def test_template_remainder_goes_last():
    heights, _, _ = template(64, 23)
    assert heights == (23, 2, 2, 4, 7, 7, 7, 7, 5)
    assert sum(heights) == 64
    with pytest.raises(ValueError):
        template(16, 10)


def test_large_budget_gives_three_segments():
    res = advise(AdvisorInput(n=50_000_000, m=22 * 50_000_000, range_hint=17))
    cfg = res.config
    assert not res.basic
    assert len(cfg.segment_bits) == 3
    assert cfg.layout.heights[0] == 28
    assert cfg.segment_bits[0] == 2**28 <= 0.6 * 22 * 50_000_000
    assert sum(cfg.segment_bits) <= 22 * 50_000_000


def test_small_budget_gives_basic():
    res = advise(AdvisorInput(n=1_000_000, m=10_000_000, range_hint=5))
    assert res.basic
    assert len(res.config.segment_bits) == 1
    assert set(res.config.k[1:]) == {1}


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        advise(AdvisorInput(n=10, m=10))
    with pytest.raises(BudgetTooSmall):
        advise(AdvisorInput(n=0, m=1000))


def test_choice_minimises_weighted_fpr():
    inp = AdvisorInput(n=100_000, m=2_200_000, range_hint=10)
    best = advise(inp)
    assert all(best.fpr_w <= c.fpr_w for c in candidates(inp))
    assert best.fpr_w == pytest.approx(evaluate(best.config, inp)[2])


def test_exact_layer_share():
    inp = AdvisorInput(n=100_000, m=2_200_000)
    for c in candidates(inp):
        assert c.config.segment_bits[0] <= 0.6 * inp.m


def test_config_text_round_trip():
    cfg = advise(AdvisorInput(n=100_000, m=2_200_000)).config
    text = config_to_text(cfg)
    assert "segment_of=0,1,1,1,2" in text
    assert config_from_text(text) == cfg
    basic = basic_config(8, 64, height=4, early_stop_threshold=None)
    assert config_from_text(config_to_text(basic)) == basic
