import numpy as np
import pytest

from ltdps.grid import GridTopology
from ltdps.paths import MobilePath

# Ten published test paths and the per-scheme predicted paths printed alongside them.
PUBLISHED_PATHS = [
    "7(8),2(2),6(7),1(1)",
    "13(15),7(8),1(1),0(0),6(7)",
    "23(27),17(20),16(19),11(13),6(7)",
    "22(26),21(25),15(18),16(19)",
    "11(13),5(6),0(0)",
    "14(16),9(10),8(9),2(2),1(1),0(0)",
    "17(20),12(14),6(7),11(13)",
    "12(14),11(13),5(6),6(7)",
    "8(9),7(8),2(2),1(1),0(0)",
    "19(22),13(15),8(9),9(10),4(4),3(3)",
]

LTDPS_TABLE = [
    ("7→1(2, 2)→6→0(1, 2)", 33),
    ("13→7→1→0→5(6, 2)", 75),
    ("23→17→16→11→5(6, 2)", 75),
    ("22→21→15→10(16, 2)", 67),
    ("11→5→0", 100),
    ("14→9→8→2→1→0", 100),
    ("17→11(12, 2)→6→11", 67),
    ("12→11→5→0(6, 2)", 67),
    ("8→7→2→1→0", 100),
    ("19→13→8→3(9, 2)→4→3", 80),
]

TM_TABLE = [
    ("7→2→1(6,4)→5(1,2)", 33),
    ("13→8(7,3)→2(1,2)→0→5(6,2)", 25),
    ("23→22(17,3)→16→15(11,2)→10(6,3)", 25),
    ("22→21→20(15,2)→10(16,3)", 33),
    ("11→10(5,2)→0", 50),
    ("14→9→14(8,3)→3(2,2)→1→0", 60),
    ("17→16(12,3)→11(6,3)→5(1,3)", 0),
    ("12→11→5→0(6,5)", 67),
    ("8→3(7,3)→2→1→0", 75),
    ("19→14(13,8)→8→3(9,5)→14(4,2)→9(3,2)", 20),
]

# Percentages exactly as printed for the ignorant baseline. Row 4 prints 75
# for two correct out of three; the published mean is built from these values.
IP_PRINTED = [0, 75, 25, 75, 50, 40, 0, 33, 25, 40]


@pytest.fixture
def grid():
    return GridTopology()


@pytest.fixture
def small_grid():
    return GridTopology(3, 3)


@pytest.fixture
def published_paths():
    return [MobilePath.parse(p) for p in PUBLISHED_PATHS]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
