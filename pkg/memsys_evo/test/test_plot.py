import numpy as np
import os

from memsys_evo.plot import label_for, normalization, plot_fronts


BASELINE = np.array([[1.0, 4.0], [2.0, 2.0], [3.0, 1.0]])


def test_normalization():
    lo, span = normalization(BASELINE)
    assert lo.tolist() == [1.0, 1.0]
    assert span.tolist() == [2.0, 3.0]
    lo, span = normalization(np.array([[2.0, 5.0]]))
    assert span.tolist() == [1.0, 1.0]


def test_baseline_only(tmp_path):
    out = tmp_path / 'fronts.svg'
    plotted = plot_fronts([], ('area', 'power'), str(out),
                          baseline=('baseline', BASELINE))
    assert len(plotted) == 1
    points = plotted[0][1]
    assert points.min() == 0.0 and points.max() == 1.0
    assert out.read_text().lstrip().startswith('<?xml')


def test_better_than_baseline(tmp_path):
    found = np.array([[0.0, 4.0], [2.0, 1.5]])
    plotted = plot_fronts([('rep0', found)], ('area', 'power'),
                          str(tmp_path / 'fronts.svg'),
                          baseline=('baseline', BASELINE))
    assert [label for label, _ in plotted] == ['baseline', 'rep0']
    assert plotted[1][1][0, 0] == -0.5


def test_unnormalized(tmp_path):
    plotted = plot_fronts([('rep0', BASELINE)], ('area', 'power'),
                          str(tmp_path / 'fronts.svg'))
    assert np.array_equal(plotted[0][1], BASELINE)


def test_three_objectives(tmp_path, caplog):
    front = np.array([[1.0, 2.0, 3.0], [2.0, 1.0, 3.0]])
    plotted = plot_fronts([('rep0', front)], ('area', 'power', 'delay'),
                          str(tmp_path / 'fronts.svg'))
    assert plotted[0][1].shape == (2, 2)
    assert 'plotting area and power only' in caplog.text


def test_deterministic_svg(tmp_path):
    for name in ('a.svg', 'b.svg'):
        plot_fronts([('rep0', BASELINE)], ('area', 'power'),
                    str(tmp_path / name))
    assert (tmp_path / 'a.svg').read_bytes() == \
            (tmp_path / 'b.svg').read_bytes()


def test_label_for():
    assert label_for(os.path.join('out', 'rep2', 'front.csv')) == \
            os.path.join('rep2', 'front.csv')
