# Copyright 2026 The qrc Authors
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

"""Quantum reservoir computing simulator.

Configs are plain dicts (or JSON strings) in the same schema the ``qrc`` CLI
reads; results come back as Python objects.
"""

import json as _json

import numpy as _np

from . import _core
from ._core import (ConfigError, DimensionError, IntegratorError, IoError, QrcError, RangeError, ShapeError,
                    InvalidValueError, add_shot_noise, legendre, nrmse, preset_names, train_readout)

__all__ = [
    "ConfigError", "DimensionError", "IntegratorError", "IoError", "QrcError", "RangeError", "ShapeError",
    "InvalidValueError", "add_shot_noise", "compute_ipc", "config_hash", "hamiltonian", "legendre", "lorenz",
    "mackey_glass", "nrmse", "preset_names", "records_to_csv", "resolve_config", "run_experiment", "run_protocol",
    "run_sweep", "train_readout",
]


def _text(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else _json.dumps(config)


def resolve_config(config=None):
    """Full configuration dict after applying presets and overrides."""
    return _json.loads(_core.resolve_config(_text(config)))


def config_hash(config=None):
    return _core.config_hash(_text(config))


def hamiltonian(config=None, ham_index=0):
    return _core.hamiltonian(_text(config), ham_index)


def run_protocol(config, inputs, ham_index=0):
    """Noiseless readout trace, shape (len(inputs) - washout, n_nodes)."""
    return _core.run_protocol(_text(config), _np.asarray(inputs, dtype=float).tolist(), ham_index)


def compute_ipc(trace, inputs, max_total_degree=6, max_delay_per_degree=None, n_shuffles=100, quantile=0.999,
                seed=0, record_targets=False):
    caps = {int(k): int(v) for k, v in (max_delay_per_degree or {}).items()}
    return _json.loads(_core.compute_ipc(_np.asarray(trace, dtype=float), _np.asarray(inputs, dtype=float).tolist(),
                                         max_total_degree, caps, n_shuffles, quantile, seed, record_targets))


def lorenz(n_samples, dt=0.001):
    x, y, z = _core.lorenz(n_samples, dt)
    return _np.array(x), _np.array(y), _np.array(z)


def mackey_glass(n_samples, dt=0.1):
    return _np.array(_core.mackey_glass(n_samples, dt))


def run_experiment(config=None):
    return _json.loads(_core.run_experiment(_text(config)))


def run_sweep(config):
    return _json.loads(_core.run_sweep(_text(config)))


def records_to_csv(records):
    return _core.records_to_csv(records if isinstance(records, str) else _json.dumps(records))
