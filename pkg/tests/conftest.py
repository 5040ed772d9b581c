import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from covergame import CoverageGame, gen_voim_tight  # noqa: E402


@pytest.fixture
def voim():
    return gen_voim_tight("1/2", "1/2")


@pytest.fixture
def two_agent_game():
    # agent 0: {0} or {1}; agent 1: {1} or {2}
    return CoverageGame.from_lists(3, [[{0}, {1}], [{1}, {2}]])
