import numpy as np
import pytest

from mfdshape import dataset

_CRITERIA = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    passed = call.excinfo is None
    detail = "" if passed else str(call.excinfo.value).splitlines()[0][:160] if str(call.excinfo.value) else call.excinfo.typename
    _CRITERIA.setdefault((str(number), title), []).append((item.name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), runs in sorted(_CRITERIA.items(), key=lambda kv: kv[0][0]):
        for name, passed, detail in runs:
            status = "PASS" if passed else "FAIL"
            line = f"criterion {number} [{status}] {title} :: {name}"
            if detail:
                line += f" -- {detail}"
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def default_dataset(tmp_path_factory):
    """The default 26 x 5 x 10 synthetic dataset, generated once per session."""
    root = tmp_path_factory.mktemp("letters")
    return dataset.generate(root)
