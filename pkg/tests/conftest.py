import pytest

from bitsim import dl
from bitsim.encoding import build_context

DIAMOND = """\
# diamond hierarchy with two roles
concept A
concept B
concept C
concept D
B sub A
C sub A
D sub B
D sub C
role r
role s
"""


@pytest.fixture(scope="session")
def diamond_tbox():
    return dl.parse_tbox(DIAMOND)


@pytest.fixture(scope="session")
def diamond_ctx(diamond_tbox):
    return build_context(diamond_tbox)


@pytest.fixture()
def diamond_file(tmp_path):
    path = tmp_path / "diamond.tbox"
    path.write_text(DIAMOND)
    return str(path)
