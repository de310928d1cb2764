"""
Instance files for the workbench.

This module provides a single class, `InstanceLoader`, for reading and
writing instances in two formats:

- Python dictionaries
- JSON/YAML instance files

Rationals are "num/den" strings, sets are sorted index arrays, partitions
are arrays of arrays and the skew product is a dense ``[x][y]`` matrix:

    {
      "name": "seed-1",
      "X": {"partition": [[0], [1, 2]], "weights": ["1/2", "1/4", "1/4"]},
      "Y": {"partition": [[0, 1]], "weights": ["1/2", "1/2"]},
      "R": [["1/4", "1/4"], ["1/8", "1/8"], ["1/8", "1/8"]],
      "disintegration": [{"partition": [[0], [1, 2]], "weights": [...]}, ...],
      "C": [[0], [1, 2]],
      "generators": [[0]],
      "process": {"matrix": [["1", "0"], ...], "raw": false}
    }

``disintegration``, ``C``, ``generators`` and ``process`` are optional:
missing ones are derived from R.
"""

import json
import os
from typing import Any, Dict, Optional, Sequence, Union

from .densities import GeneratorSequence
from .finspace import FinMeasure, GroundSet, InputError, SigmaAlg
from .generate import Instance
from .process import Process
from .product import (
    Disintegration,
    ProductSpace,
    SkewProduct,
    disintegrate,
    make_inner_regular_subalgebra,
)
from .schemas import InstanceSpec, default_config
from .utils import bits_of, format_rational, mask_of

# Check if yaml is available
try:
    import yaml
    YAML_INSTALLED = True
except ImportError:
    YAML_INSTALLED = False


class InstanceLoader:
    """Load and save instances from dictionaries and JSON/YAML files."""

    def load(self, source: Union[Dict[str, Any], str]) -> Instance:
        """
        Build an instance from a dictionary or a file path.

        Raises:
            ValueError: If the file is missing, unreadable or describes an
                invalid instance.
        """
        if isinstance(source, dict):
            return self._from_dict(source)
        if isinstance(source, str):
            if not os.path.exists(source):
                raise ValueError(f"Instance file not found: {source}")
            data = self._load_file(source)
            try:
                return self._from_dict(data)
            except (InputError, KeyError, TypeError) as e:
                raise ValueError(f"Error loading instance '{source}': {str(e)}")
        raise ValueError(f"Unsupported instance source: {type(source).__name__}")

    def _load_file(self, file_path: str) -> Dict[str, Any]:
        _, ext = os.path.splitext(file_path)
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                if ext.lower() == ".json":
                    data = json.load(f)
                elif ext.lower() in (".yml", ".yaml"):
                    if not YAML_INSTALLED:
                        raise ValueError(
                            "YAML support requires PyYAML. Install with 'pip install pyyaml'"
                        )
                    data = yaml.safe_load(f)
                else:
                    raise ValueError(f"Unsupported instance file format: {ext}")
        except (json.JSONDecodeError, OSError) as e:
            raise ValueError(f"Error loading instance file {file_path}: {str(e)}")
        except Exception as e:
            if YAML_INSTALLED and isinstance(e, yaml.YAMLError):
                raise ValueError(f"Error loading instance file {file_path}: {str(e)}")
            raise
        if not isinstance(data, dict):
            raise ValueError(f"Instance file {file_path} does not hold a mapping")
        return data

    @staticmethod
    def _algebra(ground: GroundSet, partition: Optional[Sequence[Sequence[int]]]) -> SigmaAlg:
        if partition is None:
            return SigmaAlg.discrete(ground)
        return SigmaAlg.from_blocks(ground, [mask_of(block) for block in partition])

    def _measure(self, block: Dict[str, Any]) -> FinMeasure:
        weights = block["weights"]
        ground = GroundSet(len(weights), cap=default_config().ground_cap)
        return FinMeasure(self._algebra(ground, block.get("partition")), tuple(weights))

    def _from_dict(self, data: Dict[str, Any]) -> Instance:
        p = self._measure(data["X"])
        q = self._measure(data["Y"])
        space = ProductSpace(p, q)
        r = SkewProduct.from_matrix(space, data["R"])
        if "disintegration" in data:
            measures = []
            for block in data["disintegration"]:
                measure = self._measure(block)
                if measure.ground.size != space.nx:
                    raise InputError(f"a section measure has {measure.ground.size} points")
                measures.append(measure)
            dis = Disintegration(r, tuple(measures))
        else:
            dis = disintegrate(r)
        if "C" in data:
            c = self._algebra(p.ground, data["C"])
        else:
            c = make_inner_regular_subalgebra(r, dis)
        if "generators" in data:
            gens = GeneratorSequence(tuple(mask_of(g) for g in data["generators"]))
        else:
            gens = GeneratorSequence.from_algebra(c)
        process = None
        if "process" in data:
            block = data["process"]
            process = Process.from_matrix(space, block["matrix"], bool(block.get("raw", False)))
        spec = InstanceSpec(**data["spec"]) if "spec" in data else None
        return Instance(
            r, dis, c, gens, spec=spec, process=process, name=str(data.get("name", "instance"))
        )

    @staticmethod
    def _measure_dict(m: FinMeasure) -> Dict[str, Any]:
        return {
            "partition": m.algebra.blocks(),
            "weights": [format_rational(w) for w in m.weights],
        }

    def to_dict(self, instance: Instance) -> Dict[str, Any]:
        space = instance.space
        data: Dict[str, Any] = {"name": instance.name}
        if instance.spec is not None:
            data["spec"] = instance.spec.model_dump()
        data["X"] = self._measure_dict(space.p)
        data["Y"] = self._measure_dict(space.q)
        data["R"] = [[format_rational(w) for w in row] for row in instance.skew.matrix()]
        data["disintegration"] = [self._measure_dict(m) for m in instance.dis.measures]
        data["C"] = instance.c.blocks()
        data["generators"] = [bits_of(g) for g in instance.gens]
        if instance.process is not None:
            data["process"] = {
                "matrix": instance.process.matrix(),
                "raw": instance.process.raw,
            }
        return data

    def dumps(self, instance: Instance) -> str:
        return json.dumps(self.to_dict(instance), indent=2, ensure_ascii=False) + "\n"

    def save(self, instance: Instance, file_path: str) -> str:
        """Write ``instance`` as JSON, or YAML for .yml/.yaml paths."""
        output_dir = os.path.dirname(file_path)
        if output_dir and not os.path.exists(output_dir):
            os.makedirs(output_dir, exist_ok=True)
        _, ext = os.path.splitext(file_path)
        with open(file_path, "w", encoding="utf-8") as f:
            if ext.lower() in (".yml", ".yaml"):
                if not YAML_INSTALLED:
                    raise ValueError(
                        "YAML support requires PyYAML. Install with 'pip install pyyaml'"
                    )
                yaml.safe_dump(self.to_dict(instance), f, allow_unicode=True, sort_keys=False)
            else:
                f.write(self.dumps(instance))
        return file_path
