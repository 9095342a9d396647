import numpy as np
import pytest

from memsys_evo import EmptyInput, deviation_report, front_stats
from memsys_evo.metrics import (STATISTICS, report_header, report_markdown,
                                report_rows)


def test_quartiles():
    stats = front_stats([[1.0], [2.0], [3.0], [4.0]])
    assert stats['q1'].tolist() == [1.75]
    assert stats['q2'].tolist() == [2.5]
    assert stats['q3'].tolist() == [3.25]
    assert stats['count'].tolist() == [4.0]
    assert stats['sd'][0] == pytest.approx(np.sqrt(5.0 / 3.0))


def test_single_point():
    stats = front_stats([[3.0, 7.0]])
    for stat in ('mean', 'min', 'q1', 'q2', 'q3', 'max'):
        assert stats[stat].tolist() == [3.0, 7.0]
    assert stats['sd'].tolist() == [0.0, 0.0]


def test_constant_values():
    stats = front_stats([[5.0], [5.0], [5.0]])
    for stat in ('mean', 'min', 'q1', 'q2', 'q3', 'max'):
        assert stats[stat].tolist() == [5.0]
    assert stats['sd'].tolist() == [0.0]


def test_empty_front():
    with pytest.raises(EmptyInput):
        front_stats(np.empty((0, 2)))


def test_deviation_min():
    base = [[100.0, 1.0], [150.0, 0.5]]
    found = [[110.0, 1.0], [150.0, 0.5]]
    report = deviation_report([found], base, ('area', 'power'))
    assert report.mean['min'][0] == pytest.approx(0.10)
    assert report.mean['min'][1] == 0.0
    assert report.sd['min'].tolist() == [0.0, 0.0]


def test_deviation_count():
    base = np.arange(99, dtype=float)[:, None]
    found = np.arange(49, dtype=float)[:, None] + 1.0
    report = deviation_report([found], base)
    assert report.mean['count'][0] == pytest.approx(-0.5050505)
    assert report_rows(report)[0] == ['count', '-50.51%', '0.00%']


def test_identical_fronts():
    base = np.random.default_rng(0).random((12, 2)) + 1.0
    report = deviation_report([base, base.copy(), base.copy()], base,
                              ('area', 'power'))
    for stat in STATISTICS:
        assert report.mean[stat].tolist() == [0.0, 0.0]
        assert report.sd[stat].tolist() == [0.0, 0.0]
    assert report.repetitions == 3


def test_deviation_spread():
    base = [[10.0]]
    report = deviation_report([[[11.0]], [[9.0]], [[10.0]]], base)
    assert report.mean['mean'][0] == pytest.approx(0.0)
    assert report.sd['mean'][0] == pytest.approx(0.1)


def test_zero_base_is_not_computable(caplog):
    base = [[0.0, 1.0], [0.0, 2.0]]
    report = deviation_report([[[0.0, 1.0]]], base, ('area', 'power'))
    assert np.isnan(report.mean['min'][0])
    assert ('min', 'area') in report.not_computable()
    assert ('min', 'power') not in report.not_computable()
    assert 'not computable' in caplog.text
    row = report_rows(report)[STATISTICS.index('min')]
    assert row[1] == 'n/a'


def test_no_repetitions():
    with pytest.raises(EmptyInput):
        deviation_report([], [[1.0]])


def test_report_shape():
    base = np.array([[1.0, 4.0], [2.0, 3.0], [4.0, 1.0]])
    report = deviation_report([base[:2], base[1:]], base, ('area', 'power'))
    rows = report_rows(report)
    assert len(rows) == 8
    assert [row[0] for row in rows] == ['count', 'mean', 'SD', 'min', 'Q1',
                                        'Q2', 'Q3', 'max']
    assert all(len(row) == 5 for row in rows)
    assert report_header(report) == [
            'statistic', 'area deviation mean', 'area deviation SD',
            'power deviation mean', 'power deviation SD']


def test_report_markdown():
    base = np.array([[1.0, 4.0], [2.0, 3.0]])
    report = deviation_report([base], base, ('area', 'power'))
    lines = report_markdown(report).splitlines()
    assert lines[0].startswith('| statistic')
    assert lines[1].startswith('|---')
    assert len(lines) == 2 + 8 + 2
    assert lines[-1] == 'Mean and SD across 1 repetitions.'
    assert len({len(line) for line in lines[:10]}) == 1


def test_stats_ignore_order():
    rng = np.random.default_rng(3)
    front = rng.random((25, 3))
    stats = front_stats(front)
    shuffled = front_stats(front[rng.permutation(25)])
    for stat in STATISTICS:
        assert shuffled[stat] == pytest.approx(stats[stat])


def test_deviation_is_scale_free():
    rng = np.random.default_rng(4)
    base = rng.random((20, 2)) + 0.5
    found = [rng.random((15, 2)) + 0.5 for _ in range(3)]
    report = deviation_report(found, base)
    scale = np.array([1000.0, 0.001])
    scaled = deviation_report([f * scale for f in found], base * scale)
    for stat in STATISTICS:
        assert scaled.mean[stat] == pytest.approx(report.mean[stat])
        assert scaled.sd[stat] == pytest.approx(report.sd[stat], abs=1e-12)


def test_deviation_of_subset():
    rng = np.random.default_rng(5)
    for _ in range(50):
        base = rng.random((30, 2)) + 0.1
        subset = base[rng.choice(30, size=int(rng.integers(1, 31)),
                                 replace=False)]
        report = deviation_report([subset], base)
        assert np.all(report.mean['min'] >= 0.0)
        assert np.all(report.mean['max'] <= 0.0)
