"""The two-phase model on a synthetic annual series.

Run:  python demos/02_pretrain_finetune_forecast.py [out_dir]

Phase one trains an LSTM to predict the next (value, slope, curvature)
triple of simulated prey dynamics. Phase two copies those weights and
keeps training on a real-looking annual series, this time matching the
physics residual of the predicted triple to that of the observed one.
"""

import sys
from pathlib import Path

import numpy as np

from vanya.baselines import persistence_forecast, train_vanilla_lstm
from vanya.data import generate_synthetic, write_csv
from vanya.evaluation import mae, rmse
from vanya.plotting import emit_plot
from vanya.training import TrainConfig, finetune, forecast_one_step, pretrain, rolling_forecast, transfer

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

# 37 years (1986-2022) of an LV-shaped, slowly declining series with noise.
series = generate_synthetic()
write_csv(series, out / "synthetic.csv")
train_count = 33
train = series.head(train_count)

config = TrainConfig(seed=0)
pre = pretrain(config)
print(f"pretraining loss {pre.loss_history[0]:.4f} -> {pre.loss_history[-1]:.4f}")

# Transfer copies the pretrained weights unchanged; only the data changes.
state = transfer(pre, train, config)
assert all(np.array_equal(a, b) for a, b in zip(pre.net.arrays().values(), state.net.arrays().values()))
model = finetune(state, config)
print(f"fine-tuning residual loss {model.loss_history[0]:.4f} -> {model.loss_history[-1]:.4f}")

# Teacher-forced one-step forecasts over the held-out years.
truth = series.values[train_count:]
vanya_pred = rolling_forecast(model, series, train_count)
vanilla_pred = rolling_forecast(train_vanilla_lstm(train, config), series, train_count)
persist_pred = persistence_forecast(series, train_count)
for name, pred in [("vanya", vanya_pred), ("vanilla lstm", vanilla_pred), ("persistence", persist_pred)]:
    print(f"{name:>13}: RMSE {rmse(pred, truth):9.1f}  MAE {mae(pred, truth):9.1f}")

print(f"forecast for {series.years[-1] + 1}: {forecast_one_step(model, series):.1f}")

test_years = series.years[train_count:]
emit_plot(
    {"observed": (series.years, series.values), "vanya": (test_years, vanya_pred),
     "vanilla lstm": (test_years, vanilla_pred)},
    "lines", out / "forecast.svg", title="One-step forecasts on the last four years",
)
model.save(out / "vanya_model.json")
print("wrote", out / "forecast.svg", "and", out / "vanya_model.json")
