import shutil
import sys
from pathlib import Path

import pytest
from hypothesis import settings

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

CORPUS = HERE / "corpus"

settings.register_profile("default", deadline=None, max_examples=150)
settings.load_profile("default")

needs_z3 = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 not installed")
