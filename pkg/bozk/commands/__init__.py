from .base import Command
from .classify import ClassifyCommand
from .solve import SolveCommand
from .evolve import EvolveCommand, StabilityCommand
from .kernel import KernelCommand
from .sweep import SweepCommand

REGISTRY = {
    command.name: command
    for command in (ClassifyCommand, SolveCommand, EvolveCommand, KernelCommand, SweepCommand, StabilityCommand)
}

__all__ = [
    "Command",
    "ClassifyCommand",
    "SolveCommand",
    "EvolveCommand",
    "StabilityCommand",
    "KernelCommand",
    "SweepCommand",
    "REGISTRY"
]
