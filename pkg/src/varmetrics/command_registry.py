from typing import Any, Dict, Tuple, Type

from varmetrics import asymptotics, calibration, marketdata, montecarlo, properties, variability

# Map of command name to (input schema class, command function)
_commands: Dict[str, Tuple[Type[Any], Any]] = {
    # Measures
    "measure": (variability.MeasureInput, variability.measure),
    "asymvar": (asymptotics.AsymvarInput, asymptotics.asymvar),
    # Experiments
    "simulate": (montecarlo.SimulateInput, montecarlo.simulate),
    "calibrate": (calibration.CalibrateInput, calibration.calibrate),
    # Market data
    "rolling": (marketdata.RollingInput, marketdata.rolling),
    "synth-losses": (marketdata.SynthLossesInput, marketdata.synth_losses_command),
    # Property suites
    "selftest": (properties.SelftestInput, properties.selftest),
}

COMMANDS = tuple(_commands)


def get_schema(command: str) -> Type[Any]:
    """Return the dataclass schema for the given command name."""
    if command not in _commands:
        raise KeyError(f"Command '{command}' not found")
    return _commands[command][0]


async def call_command(command: str, args: dict) -> Any:
    """Instantiate the command's input schema with args and execute it."""
    if command not in _commands:
        raise KeyError(f"Command '{command}' not found")
    schema_cls, func = _commands[command]
    input_obj = schema_cls(**args)
    return await func(input_obj)
