"""Built-in example systems: Suslov gyrostat and Chaplygin sphere with gyrostat."""
from .chaplygin import ChaplyginParams, KGammaPoint, chaplygin_gauge, chaplygin_system
from .suslov import SuslovParams, suslov_system

BUILTIN = ("suslov", "chaplygin-sphere")

__all__ = [
    "BUILTIN",
    "ChaplyginParams",
    "KGammaPoint",
    "SuslovParams",
    "chaplygin_gauge",
    "chaplygin_system",
    "suslov_system",
]
