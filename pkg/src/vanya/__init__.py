"""LSTM forecasting pretrained on Lotka-Volterra dynamics and fine-tuned with a
predator-equation residual loss, plus the baselines and evaluation protocol
used to compare it."""

__version__ = "0.1.0"
