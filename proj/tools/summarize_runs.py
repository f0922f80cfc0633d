#!/usr/bin/env python3
# Copyright 2026 The tgrl-gridworld Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Mean and 95% interval of the final success rate over a set of run CSVs.

Runs are grouped by (algorithm, file stem with the seed suffix removed), so
`tiger_s0.csv ... tiger_s4.csv` collapse into one line. The interval is the
normal approximation mean +/- 1.96 * stdev / sqrt(n).
"""

import argparse
import csv
import math
import re
import statistics
import sys
from collections import defaultdict
from pathlib import Path


def final_value(path, column):
    last = None
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if row.get(column):
                last = (row["algorithm"], float(row[column]))
    return last


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csvs", nargs="+", type=Path)
    parser.add_argument("--column", default="success_rate_pi")
    args = parser.parse_args(argv)

    groups = defaultdict(list)
    for path in args.csvs:
        found = final_value(path, args.column)
        if found is None:
            print(f"{path}: no {args.column} values", file=sys.stderr)
            continue
        algorithm, value = found
        stem = re.sub(r"_(s|seed-?)?\d+$", "", path.stem)
        groups[(algorithm, stem)].append(value)

    print("algorithm,group,n,mean,ci95_low,ci95_high")
    for (algorithm, stem), values in sorted(groups.items()):
        mean = statistics.fmean(values)
        half = 1.96 * statistics.stdev(values) / math.sqrt(len(values)) if len(values) > 1 else 0.0
        print(f"{algorithm},{stem},{len(values)},{mean:.4f},{mean - half:.4f},{mean + half:.4f}")


if __name__ == "__main__":
    main()
