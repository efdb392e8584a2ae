"""Python bindings for the pcvkit powered-caster toolkit.

Configs are plain dicts (or None for defaults); reports come back as dicts.
"""

import json as _json

from . import _pcvkit
from ._pcvkit import (
    CommandLengthMismatch,
    ConfigInvalid,
    FrameMismatch,
    ParseError,
    PcvError,
    RankDeficient,
    SingularOffset,
    Timeout,
    TraceMismatch,
    se2_compose,
    se2_exp,
    se2_inverse,
    se2_log,
    wrap_angle,
)


def _cfg(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config():
    return _json.loads(_pcvkit.default_config())


def load_config(config):
    """Validates a config dict (or JSON text) and fills in defaults."""
    return _json.loads(_pcvkit.normalize_config(_cfg(config)))


def caster_ik(index, phi, twist, config=None):
    return _pcvkit.caster_ik(_cfg(config), index, phi, tuple(twist))


def base_ik(phis, twist, config=None):
    return _pcvkit.base_ik(_cfg(config), list(phis), tuple(twist))


def base_fk(phis, phi_dots, rho_dots, config=None):
    """Returns ((vx, vy, omega), residual)."""
    return _pcvkit.base_fk(_cfg(config), list(phis), list(phi_dots), list(rho_dots))


def check_kinematics(samples=10000, seed=0, config=None):
    return _json.loads(_pcvkit.check_kinematics(_cfg(config), samples, seed))


def bench_odometry(shape="square", length=1.0, seeds=20, seed=0, revolutions=5, config=None):
    return _json.loads(_pcvkit.bench_odometry(_cfg(config), shape, length, seeds, seed, revolutions))


def compare_drive(goal, timeout=60.0, config=None):
    return _json.loads(_pcvkit.compare_drive(_cfg(config), tuple(goal), timeout))


def drive(waypoints, mode="holonomic", timeout=60.0, config=None):
    """Closed-loop run through waypoints; includes the per-tick log."""
    return _json.loads(_pcvkit.drive(_cfg(config), [tuple(w) for w in waypoints], mode, timeout))


def replay_episode(path):
    return _json.loads(_pcvkit.replay_episode(str(path)))
