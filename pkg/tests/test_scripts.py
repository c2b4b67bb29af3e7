import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize(
    "name,args,needle",
    [
        ("reproduce_table3.py", [], "0.684017"),
        ("reproduce_table2.py", ["--k", "2"], "10"),
        ("figure4_grid.py", ["--n-max", "3"], "3,3,0.79056941504209"),
        ("figure5_scaling.py", ["--n-max", "8"], "8,73/128,77/128"),
    ],
)
def test_script_runs(name, args, needle):
    out = subprocess.run(
        [sys.executable, str(SCRIPTS / name), *args], capture_output=True, text=True, check=True
    ).stdout
    assert needle in out
