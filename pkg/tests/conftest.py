from importlib import resources
from pathlib import Path

import pytest

from hybridsum.corpus import DocumentCluster, load_corpus


@pytest.fixture(scope="session")
def mini_path() -> Path:
    return Path(str(resources.files("hybridsum").joinpath("data/mini")))


@pytest.fixture(scope="session")
def mini_corpus(mini_path):
    return load_corpus(mini_path)


@pytest.fixture
def two_doc_cluster():
    return DocumentCluster.from_texts(
        "c1",
        ["Anh ấy đến. Trời mưa!", "Giá 3.5 triệu đồng. Hà Nội 100%?"],
        ["anh ấy đến hà nội"],
    )


def write_cluster_dir(root: Path, cid: str, files: dict[str, str]) -> Path:
    d = root / cid
    d.mkdir(parents=True)
    for name, text in files.items():
        (d / name).write_text(text, encoding="utf-8")
    return d


ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_makereport(item, call):
    crit = item.get_closest_marker("criterion")
    if crit is None or call.when != "call":
        return
    label = crit.args[0]
    ACCEPTANCE[label] = "FAIL" if call.excinfo is not None else "PASS"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"{ACCEPTANCE[label]}  {label}")
