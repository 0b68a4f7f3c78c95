"""Test package initialization."""

import hyperstab


def test_version() -> None:
    """Test that version is defined."""
    assert hasattr(hyperstab, "__version__")
    assert isinstance(hyperstab.__version__, str)
    assert hyperstab.__version__ == "0.1.0"
