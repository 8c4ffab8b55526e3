#!/usr/bin/env python3
# Copyright 2026 The SSI Authors
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

"""Plot mean-subtracted energy series and the SSI phase portrait for a preset.

usage: demos/plot_energy.py <out_dir> <preset>
Run demos/run_preset.sh first.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    out, preset = Path(sys.argv[1]), sys.argv[2]
    fig, (ax_e, ax_p) = plt.subplots(1, 2, figsize=(11, 4))
    for kind in ("ssi", "direct", "flowmap"):
        path = out / f"{preset}_{kind}_energy_centred.csv"
        if path.exists():
            df = pd.read_csv(path)
            ax_e.plot(df["t"], df.iloc[:, 1], lw=0.6, label=kind)
    ax_e.set_xlabel("t")
    ax_e.set_ylabel("H - mean(H)")
    ax_e.legend()
    traj = pd.read_csv(out / f"{preset}_ssi_trajectory.csv")
    ax_p.plot(traj["q1"], traj["p1"], ",")
    ax_p.set_xlabel("q1")
    ax_p.set_ylabel("p1")
    fig.tight_layout()
    dest = out / f"{preset}_energy.png"
    fig.savefig(dest, dpi=150)
    print(dest)


if __name__ == "__main__":
    main()
