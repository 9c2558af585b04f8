"""Variational quantum solver for 2D open-pit profile optimization."""

from importlib import resources


def bundled_instance_path(name: str):
    """Path to a bundled instance file, e.g. 'mini4'."""
    return resources.files(__package__) / "instances" / f"{name}.pit"


BUNDLED_INSTANCES = ("mini4", "step9", "stringer12", "smooth12")
