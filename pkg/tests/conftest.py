import numpy as np
import pytest

from headclust.normalize import PORTUGUESE_EXAMPLE_TABLE, NormalizerConfig, TableStemmer

SENTENCE_1 = "João gosta de assistir filmes. Maria gosta de filmes também."
SENTENCE_2 = "João também gosta de assistir a jogos de futebol !"


@pytest.fixture
def pt_config():
    """Table stemmer + {de, a}: reproduces the Portuguese worked example."""
    return NormalizerConfig(frozenset({"de", "a"}), TableStemmer(PORTUGUESE_EXAMPLE_TABLE))


@pytest.fixture
def sentences():
    return [SENTENCE_1, SENTENCE_2]


@pytest.fixture
def four_rows():
    return np.array([[1, 1, 0], [1, 0, 0], [0, 1, 1], [0, 0, 1]], dtype=float)


@pytest.fixture(scope="session")
def blobs():
    from oracles import three_blobs

    return three_blobs()


def write_csv(path, rows, header=("publish_date", "headline_text")):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


# -- acceptance summary ----------------------------------------------------------

ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Label of the acceptance criterion under test; outcome is recorded by the report hook."""
    marker = request.node.get_closest_marker("criterion")
    return marker.args[0] if marker else request.node.name


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if report.skipped:
        ACCEPTANCE[label] = "SKIP"
    elif report.failed:
        ACCEPTANCE[label] = "FAIL"
    elif report.when == "call":
        ACCEPTANCE.setdefault(label, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0][1:])):
        terminalreporter.write_line(f"{ACCEPTANCE[label]:4}  {label}")
