"""Find the anomalous day in a daily-binned count series.

Real event data often arrives as daily totals, not timestamps.  With
delta locked to whole days the stencil needs only the daily counts, and
its output stays exactly integer.  We fabricate 120 days of counts with
a slow seasonal trend plus one reporting spike, then localize the spike.
"""

import numpy as np

from ratejump import analyze_binned
from ratejump.ingest import RegionSeries

import datetime

rng = np.random.default_rng(3)
days = 120
trend = 200 + 80 * np.sin(np.arange(days) / 19.0)  # slow seasonal wave
counts = rng.poisson(trend)
spike_day = 77
counts[spike_day] += 900

series = RegionSeries(
    region="demo-county",
    counts=counts.astype(np.int64),
    start_date=datetime.date(2021, 1, 1),
)

for k in (1, 2, 3):
    analysis = analyze_binned(series, k=k, delta_days=1)
    print(f"k={k}: {analysis.summary()}")

analysis = analyze_binned(series, k=2, delta_days=1)
print(f"\ntrue spike day: {spike_day} "
      f"({series.date_of(spike_day)}), daily count {counts[spike_day]}")
print("profile around the spike (exact integers):")
for day, value in zip(analysis.profile.times, analysis.profile.values):
    if abs(day - spike_day) <= 3:
        print(f"  day {int(day):3d}: {int(value):+6d}")
