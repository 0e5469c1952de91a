from mwmw.model.charges import (
    ChargeFamily,
    ChargeFamilyReport,
    builtin_charges,
    verify_charge_family,
)
from mwmw.model.decay import (
    check_decay_gamma,
    check_decay_k,
    check_simple_decay,
    f_norm,
    simple_decay_series,
)
from mwmw.model.ffunction import (
    FFunction,
    check_f_function,
    constant,
    f_function_series,
    is_power_law_f_function,
    power_law,
    sufficient_decay_exponent,
)
from mwmw.model.interaction import Interaction, surface_energy
from mwmw.model.io import dump_interaction, interaction_from_spec, load_interaction
from mwmw.model.zoo import builtin_interaction, builtin_names

__all__ = [
    "ChargeFamily",
    "ChargeFamilyReport",
    "FFunction",
    "Interaction",
    "builtin_charges",
    "builtin_interaction",
    "builtin_names",
    "check_decay_gamma",
    "check_decay_k",
    "check_f_function",
    "check_simple_decay",
    "constant",
    "dump_interaction",
    "f_function_series",
    "f_norm",
    "interaction_from_spec",
    "is_power_law_f_function",
    "load_interaction",
    "power_law",
    "simple_decay_series",
    "sufficient_decay_exponent",
    "surface_energy",
    "verify_charge_family",
]
