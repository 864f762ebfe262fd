"""The reservoir-computing baseline in isolation.

Run:  python demos/03_echo_state_baseline.py

An echo-state network keeps a fixed random recurrent reservoir and only
learns a linear readout by ridge regression.
"""

import numpy as np

from vanya.baselines import ESNParams, esn_rolling_forecast, esn_training_predictions, spectral_radius, train_esn
from vanya.data import generate_synthetic
from vanya.evaluation import rmse

series = generate_synthetic()
params = ESNParams(reservoir_size=50, spectral_radius=0.9, ridge=1e-6, seed=0)
print(f"reservoir spectral radius: {spectral_radius(params.reservoir):.12f}")

fitted = train_esn(series.head(33), params)
pred, target = esn_training_predictions(fitted, series.head(33))
persist = fitted.normalization.apply(series.values[:33])[fitted.warmup:-1]
print(f"training RMSE (normalized units): esn {rmse(pred, target):.4f}, persistence {rmse(persist, target):.4f}")

test = esn_rolling_forecast(fitted, series, 33)
print("test forecasts:", np.round(test, 1))
print("truth:         ", np.round(series.values[33:], 1))

# The ridge term matters: a larger penalty pulls the readout towards its bias.
for ridge in (1e-6, 1e-2, 1e2):
    w = train_esn(series.head(33), ESNParams(ridge=ridge)).readout
    print(f"ridge {ridge:g}: |weights| = {np.linalg.norm(w[:-1]):.3f}, bias = {w[-1]:.3f}")
