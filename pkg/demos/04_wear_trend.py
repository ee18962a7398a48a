"""
Texture drift across days of wear
=================================

Averages each measure per usage day over a batch of synthetic textures and
prints the trend table. Contrast climbs with wear while energy and
homogeneity decay, which is what makes the features separable at all.
"""

from collections import defaultdict

import numpy as np

from texstage import (
    FEATURE_NAMES,
    GlcmConfig,
    day_for_class,
    image_features,
    synth_texture,
)

config = GlcmConfig()

# Twelve textures per class, tagged with the usage day each class stands for.
by_day = defaultdict(list)
for cls in range(3):
    day = day_for_class(cls)
    for seed in range(12):
        fv = image_features(synth_texture(cls, seed=seed), config)
        by_day[day].append(fv)

print("day  " + "".join(f"{name:>14}" for name in FEATURE_NAMES))
for day in sorted(by_day):
    means = np.mean(by_day[day], axis=0)
    print(f"{day:<5}" + "".join(f"{v:14.6f}" for v in means))
print()

# The same table is what `texstage trend --out trend.csv` writes, ready for
# plotting day against each measure.
days = sorted(by_day)
c_means = [np.mean([fv.contrast for fv in by_day[d]]) for d in days]
h_means = [np.mean([fv.homogeneity for fv in by_day[d]]) for d in days]
print("contrast rises monotonically:   ", all(a < b for a, b in zip(c_means, c_means[1:])))
print("homogeneity falls monotonically:", all(a > b for a, b in zip(h_means, h_means[1:])))
