from fractions import Fraction

import pytest

from nmds_expander.expander import assemble
from nmds_expander.fields import build_tower
from nmds_expander.graph import build_graph
from nmds_expander.preferences import reset_preferences


@pytest.fixture(autouse=True)
def isolated_preferences(tmp_path, monkeypatch):
    """Every test sees the default settings, whatever the working directory holds."""
    monkeypatch.setenv("NMDS_CONFIG", str(tmp_path / "missing.toml"))
    monkeypatch.delenv("NMDS_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("NMDS_DEBUG", raising=False)
    reset_preferences()
    yield
    reset_preferences()


@pytest.fixture
def tower():
    return build_tower(4, 16)


@pytest.fixture
def k22_repetition(tower):
    """K2,2 with [2,1,2] repetition codes on both sides and no F1 edges."""
    g = build_graph("complete", 2, 2)
    return assemble(g, tower, Fraction(1, 2), Fraction(1, 2), 0)


@pytest.fixture
def k33_repetition(tower):
    """K3,3 with [3,1,3] repetition codes on both sides and no F1 edges."""
    g = build_graph("complete", 3, 3)
    return assemble(g, tower, Fraction(1, 3), Fraction(1, 3), 0)


@pytest.fixture
def k33_mixed(tower):
    """K3,3 with [3,2,2] codes on both sides and one F1 edge per left vertex."""
    g = build_graph("complete", 3, 3)
    return assemble(g, tower, Fraction(2, 3), Fraction(2, 3), Fraction(1, 3), seed=5)
