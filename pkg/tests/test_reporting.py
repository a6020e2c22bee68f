import csv
import io
import json

import pytest

from pnlattr import EmptyResults, ReportRow, bps, render_report
from pnlattr.reporting import CSV_COLUMNS


def row(position, bucket, fx=0.0, rate=0.0, market=0.0, carry=0.0, costs=0.0, total=None):
    if total is None:
        total = fx + rate + market + carry
    return ReportRow(position, bucket, fx, rate, market, carry, costs, total)


SAMPLE = [
    row("alpha", "SeniorSub", fx=1000.0, rate=-400.0, market=250.0, carry=150.0, costs=20.0),
    row("beta", "SeniorSub", fx=-200.0, rate=100.0, market=50.0, carry=75.0),
    row("gamma", "MatchedBasis", fx=10.0, rate=-5.0, market=500.0, carry=300.0, costs=12.0),
]


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_hedged_is_market_plus_carry_minus_costs():
    r = SAMPLE[0]
    assert r.hedged_eur == 250.0 + 150.0 - 20.0


def test_csv_structure_and_additivity():
    text = render_report(SAMPLE, "csv")
    records = parse_csv(text)
    labels = [(r["position"], r["bucket"]) for r in records]
    assert labels == [
        ("alpha", "SeniorSub"),
        ("beta", "SeniorSub"),
        ("SUBTOTAL", "SeniorSub"),
        ("gamma", "MatchedBasis"),
        ("SUBTOTAL", "MatchedBasis"),
        ("POSITIONS", ""),
        ("TOTAL", ""),
    ]
    # re-parse-and-sum: printed subtotals match printed member sums to
    # printed precision (0 decimals, so half a unit per rounded row)
    by_label = {(r["position"], r["bucket"]): r for r in records}
    for bucket, members in (("SeniorSub", ["alpha", "beta"]), ("MatchedBasis", ["gamma"])):
        subtotal = by_label[("SUBTOTAL", bucket)]
        for column in CSV_COLUMNS[2:]:
            member_sum = sum(float(by_label[(m, bucket)][column]) for m in members)
            assert abs(float(subtotal[column]) - member_sum) <= 0.5 * (len(members) + 1)
    positions = by_label[("POSITIONS", "")]
    for column in CSV_COLUMNS[2:]:
        bucket_sum = sum(float(by_label[("SUBTOTAL", b)][column]) for b in ("SeniorSub", "MatchedBasis"))
        assert abs(float(positions[column]) - bucket_sum) <= 1.5


def test_standalone_lines_roll_into_total_only():
    text = render_report(SAMPLE, "csv", standalone_lines=[("FEES", -300.0), ("OTHER COSTS", -30.0)])
    records = parse_csv(text)
    by_pos = {r["position"]: r for r in records}
    assert by_pos["FEES"]["bucket"] == "STANDALONE"
    assert float(by_pos["FEES"]["total_eur"]) == -300.0
    assert float(by_pos["TOTAL"]["total_eur"]) == float(by_pos["POSITIONS"]["total_eur"]) - 330.0
    # the other columns of the grand total ignore standalone lines
    assert float(by_pos["TOTAL"]["fx_eur"]) == float(by_pos["POSITIONS"]["fx_eur"])


def test_bps_columns_present_iff_nav_supplied():
    plain = parse_csv(render_report(SAMPLE, "csv"))
    assert "total_bps" not in plain[0]
    with_nav = parse_csv(render_report(SAMPLE, "csv", nav=1_000_000.0))
    assert float(with_nav[0]["fx_bps"]) == pytest.approx(1000.0 * 10000 / 1e6, abs=0.05)


def test_bps_is_exact_for_exact_inputs():
    assert bps(490_000.0, 100_000_000.0) == 49.0


def test_bps_rounding_half_even():
    # 0.25 and 0.35 are exact binary values: half-even keeps both at 2
    assert f"{0.25:.1f}" == "0.2"
    nav = 1e8
    r = row("x", "Other", fx=2500.0, rate=0.0, market=0.0, carry=0.0)  # 0.25 bps
    records = parse_csv(render_report([r], "csv", nav=nav))
    assert records[0]["fx_bps"] == "0.2"


def test_format_stability():
    kwargs = dict(nav=2_500_000.0, standalone_lines=[("FEES", -120.0)])
    assert render_report(SAMPLE, "csv", **kwargs) == render_report(SAMPLE, "csv", **kwargs)
    assert render_report(SAMPLE, "json", **kwargs) == render_report(SAMPLE, "json", **kwargs)


def test_json_tree_mirrors_csv_fields():
    tree = json.loads(render_report(SAMPLE, "json", nav=1e6, standalone_lines=[("FEES", -10.0)]))
    assert {p["position"] for p in tree["positions"]} == {"alpha", "beta", "gamma"}
    assert tree["positions"][0]["fx_eur"] == 1000.0
    assert tree["positions"][0]["fx_bps"] == 10.0
    assert [b["bucket"] for b in tree["buckets"]] == ["SeniorSub", "MatchedBasis"]
    assert tree["positions_total"]["position"] == "POSITIONS"
    assert tree["standalones"] == [{"label": "FEES", "total_eur": -10.0, "total_bps": -0.1}]
    assert tree["total"]["total_eur"] == pytest.approx(tree["positions_total"]["total_eur"] - 10.0)


def test_single_row_no_nav():
    records = parse_csv(render_report([row("only", "Cash", carry=-70.0)], "csv"))
    assert records[0]["position"] == "only"
    assert set(records[0]) == set(CSV_COLUMNS)


def test_empty_results_rejected():
    with pytest.raises(EmptyResults):
        render_report([], "csv")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        render_report(SAMPLE, "xml")


def test_negative_zero_never_printed():
    records = parse_csv(render_report([row("z", "Other", fx=-0.0)], "csv"))
    assert records[0]["fx_eur"] == "0"
