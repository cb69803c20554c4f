"""
A small seeded benchmark
========================

Compare the fixed PPV baseline, the selected model and the test-set oracle
over a few resamples, then read back the CSV reports. Needs a UCR directory
in ``SELFROCKET_UCR_DIR``. The same run from the shell::

    selfrocket benchmark $SELFROCKET_UCR_DIR --datasets Coffee,Chinatown \\
        --resamples 3 --variants PPV,selfrocket,oracle --out-dir bench
"""

import os
import sys
import tempfile
from pathlib import Path

from selfrocket.benchmark import read_results, run_benchmark
from selfrocket.selection import SelectionConfig

ucr = os.environ.get("SELFROCKET_UCR_DIR")
if not ucr:
    sys.exit("set SELFROCKET_UCR_DIR to a directory of UCR .tsv files")

out = Path(tempfile.mkdtemp(prefix="selfrocket-bench-"))
failed = run_benchmark(ucr, ["Coffee", "Chinatown"], 3, ["PPV", "selfrocket", "oracle"],
                       SelectionConfig(seed=0), out)
print("failed:", failed or "none")

for row in read_results(out / "results.csv"):
    print(f"{row['dataset']:10s} r{row['resample']} {row['variant']:10s} {row['combo']:9s} "
          f"{float(row['accuracy']):.4f}")

# summary.csv holds per-dataset means; combos.csv counts the chosen
# combinations before and after vote validation.
print((out / "summary.csv").read_text())
print((out / "wdl.csv").read_text())
print("reports in", out)
