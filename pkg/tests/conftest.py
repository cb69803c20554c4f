import os
from pathlib import Path

import numpy as np
import pytest

from selfrocket import TimeSeriesDataset


def ucr_directory():
    """Directory holding ``<name>_TRAIN.tsv`` files, or None."""
    env = os.environ.get("SELFROCKET_UCR_DIR")
    if env:
        return Path(env) if Path(env).is_dir() else None
    try:
        import ucr_datasets
    except ImportError:
        return None
    path = Path(ucr_datasets.__file__).parent / "data"
    return path if path.is_dir() else None


@pytest.fixture(scope="session")
def ucr_dir():
    path = ucr_directory()
    if path is None:
        pytest.skip("UCR archive not available (set SELFROCKET_UCR_DIR)")
    return path


def toy_dataset(n=24, length=40, n_classes=2, seed=0, name="toy"):
    """Classes differ by a class-dependent sine frequency plus noise."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % n_classes
    t = np.linspace(0, 1, length)
    series = np.sin(2 * np.pi * (labels[:, None] + 1) * t) + 0.3 * rng.normal(size=(n, length))
    return TimeSeriesDataset(series, labels, tuple(f"c{i}" for i in range(n_classes)), name)


def write_ucr(path, ds, class_names=None):
    names = class_names or ds.class_names
    with open(path, "w") as fh:
        for y, x in zip(ds.labels, ds.series):
            fh.write("\t".join([names[y]] + [repr(float(v)) for v in x]) + "\n")
    return path


@pytest.fixture
def toy():
    return toy_dataset()


_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` for one numbered acceptance criterion."""

    def record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
