# Draw the example histogram from the packaged data plus simulated noise.

import csv

import matplotlib.pyplot as plt
import numpy as np

rng = np.random.default_rng(20240501)
noise = rng.normal(0.0, 1.0, size=200)

with open("data/d.csv") as handle:
    values = [float(row["value"]) for row in csv.DictReader(handle)]

# Produces Figure 1
plt.hist(values + list(noise), bins=20)
plt.savefig("results/figures/figure_1.png")
