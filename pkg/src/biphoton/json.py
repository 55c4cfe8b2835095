import enum
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import BaseModel

if TYPE_CHECKING:
    import json
else:
    try:
        import simplejson as json
    except ImportError:
        import json


def _complex(value: complex) -> dict:
    return {"re": float(value.real), "im": float(value.imag)}


class CustomEncoder(json.JSONEncoder):
    """
    Encoder for result documents.

    numpy scalars and arrays become plain numbers and (nested) lists, complex values
    become {"re": ..., "im": ...}. Models are dumped with their aliases and any other
    object providing ``data()`` is serialised through it.
    """

    def __init__(self, *args, **kwargs):
        kwargs["allow_nan"] = False
        super().__init__(*args, **kwargs)

    def default(self, o: Any) -> Any:
        if isinstance(o, np.ndarray):
            if np.iscomplexobj(o):
                return [self.default(v) for v in o]
            return o.tolist()
        elif isinstance(o, (complex, np.complexfloating)):
            return _complex(complex(o))
        elif isinstance(o, np.integer):
            return int(o)
        elif isinstance(o, np.floating):
            return float(o)
        elif isinstance(o, np.bool_):
            return bool(o)
        elif isinstance(o, BaseModel):
            return o.model_dump(by_alias=True)
        elif isinstance(o, enum.Enum):
            return o.value
        elif isinstance(o, Path):
            return str(o)
        elif hasattr(o, "data") and callable(o.data):
            return o.data()
        return super().default(o)


def dumps(data: Any) -> str:
    """Serialise a result document with sorted keys and fixed indentation."""
    return json.dumps(data, cls=CustomEncoder, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Any:
    return json.loads(text)


JSONDecodeError = json.JSONDecodeError
