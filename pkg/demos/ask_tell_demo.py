"""Ask/tell driving without a closed-loop objective.

This is the pattern a lab loop uses: create a campaign, run the initial
design "at the bench" (simulated here), then alternate suggest and tell.
The campaign JSON round-trips through a file between steps, exactly like the
CLI and the HTTP service do.
"""

import json

import numpy as np

from catbox import (
    Campaign,
    CategoricalVar,
    ContinuousVar,
    SearchSpace,
    SuggestConfig,
    campaign_from_json,
    campaign_to_json,
)

space = SearchSpace(
    categoricals=(CategoricalVar("catalyst", ("A", "B", "C")),),
    continuous=(ContinuousVar("temperature", 500.0, 900.0),),
)


def bench_measurement(point):
    # stand-in for the real experiment: peak at catalyst B, 700 C
    temp = point.con[0]
    bonus = {0: 0.0, 1: 2.0, 2: 0.5}[point.cat[0]]
    return float(bonus + 3.0 * np.exp(-((temp - 700.0) / 120.0) ** 2))


campaign = Campaign.new(space, config=SuggestConfig(n_init=8, seed=3))
print(f"initial design of {len(campaign.initial_points)} experiments:")
for point in campaign.initial_points:
    y = bench_measurement(point)
    campaign.tell(point, y, tag="init")
    print(f"  {space.categoricals[0].levels[point.cat[0]]} at {point.con[0]:6.1f} C -> {y:.3f}")

for round_i in range(6):
    # serialize/deserialize between steps, as a persistent deployment would
    campaign = campaign_from_json(json.loads(json.dumps(campaign_to_json(campaign))))
    point = campaign.suggest()
    y = bench_measurement(point)
    campaign.tell(point, y)
    print(
        f"round {round_i + 1}: suggested {space.categoricals[0].levels[point.cat[0]]}"
        f" at {point.con[0]:6.1f} C -> {y:.3f}   incumbent {campaign.incumbent[1]:.3f}"
    )

best_point, best_y = campaign.incumbent
print(
    f"best: {space.categoricals[0].levels[best_point.cat[0]]} at {best_point.con[0]:.1f} C"
    f" with response {best_y:.3f}"
)
