from typing import Dict, Any

from .base import Command
from ..solver import classify


class ClassifyCommand(Command):
    """Decision table only; no grid is built."""

    name = "classify"
    needs_grid = False

    async def execute(self) -> Dict[str, Any]:
        result = classify(self.params).to_dict()
        self.write_json("classification.json", result)
        return result
