"""
Driving experiments through the command line
============================================

The same runs are available as shipped presets. This script calls the entry
point in-process and reads back the files it wrote.
"""

import json
import tempfile
from pathlib import Path

from z2lpg.cli import main
from z2lpg.timeseries import TimeSeries

out = Path(tempfile.mkdtemp())
main(["presets"])

main(["sequence-audit", "--preset", "audit-seventeenths", "--out", str(out)])
for row in json.loads((out / "audit.json").read_text())["rows"]:
    print(row["L"], row["compliant"], row["R"])

main(["quench-circuit", "--preset", "fig5", "--V", "0,4", "--steps", "50", "--out", str(out)])
ts = TimeSeries.from_csv((out / "V4.csv").read_text())
print("config hash:", ts.metadata["config_hash"], " final eps_raw:", ts.eps_raw[-1])
