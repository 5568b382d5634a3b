import numbers
import types

import numpy as np


def fullname(o):
    if isinstance(o, (types.MethodType, types.FunctionType)):
        return o.__module__ + "." + o.__qualname__

    if not isinstance(o, type):
        o = o.__class__

    module = o.__module__
    if module is None or module == str.__class__.__module__:
        return o.__name__
    else:
        return module + "." + o.__name__


def is_namedtuple(obj) -> bool:
    return isinstance(obj, tuple) and hasattr(obj, "_asdict") and hasattr(obj, "_fields")


def complex_to_doc(value) -> list:
    value = complex(value)
    return [value.real, value.imag]


def complex_from_doc(doc) -> complex:
    """
    Accepts ``[re, im]`` pairs as well as plain numbers and strings understood by ``complex`` (``"1+2j"``; a trailing
    ``i`` is accepted in place of ``j``).
    """
    if isinstance(doc, (list, tuple)):
        if len(doc) != 2:
            raise ValueError("complex numbers are encoded as [re, im], got %r" % (doc,))
        return complex(float(doc[0]), float(doc[1]))

    if isinstance(doc, str):
        return complex(doc.strip().replace(" ", "").replace("i", "j"))

    if isinstance(doc, numbers.Number):
        return complex(doc)

    raise ValueError("cannot read a complex number from %r" % (doc,))


def matrix_to_doc(matrix) -> dict:
    matrix = np.asarray(matrix, dtype=complex)
    rows, cols = matrix.shape
    entries = [complex_to_doc(v) for v in matrix.reshape(-1)]

    if rows == cols:
        return {"dim": rows, "entries": entries}
    return {"rows": rows, "cols": cols, "entries": entries}


def matrix_from_doc(doc) -> np.ndarray:
    if isinstance(doc, list):
        # nested rows, e.g. [[1, 0], [0, 1]]
        return np.array([[complex_from_doc(v) for v in row] for row in doc], dtype=complex)

    if "dim" in doc:
        rows = cols = int(doc["dim"])
    else:
        rows, cols = int(doc["rows"]), int(doc["cols"])

    entries = doc["entries"]
    if len(entries) != rows * cols:
        raise ValueError("expected %d entries, got %d" % (rows * cols, len(entries)))

    values = np.array([complex_from_doc(v) for v in entries], dtype=complex)
    return values.reshape(rows, cols)


def deep_to_dict(obj):
    """
    Turns results of gammakit operations into JSON-ready documents. Complex numbers become ``[re, im]`` pairs, arrays
    become nested lists, named tuples become dicts and domain objects are converted through their ``to_doc`` method.
    """
    if obj is None:
        return None

    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)

    if isinstance(obj, (int, float, str)):
        return obj

    if isinstance(obj, complex):
        return complex_to_doc(obj)

    if isinstance(obj, np.generic):
        return deep_to_dict(obj.item())

    if isinstance(obj, np.ndarray):
        return deep_to_dict(obj.tolist())

    if hasattr(obj, "to_doc"):
        return deep_to_dict(obj.to_doc())

    if is_namedtuple(obj):
        return {k: deep_to_dict(v) for k, v in obj._asdict().items()}

    if isinstance(obj, (tuple, list, set)):
        return [deep_to_dict(a) for a in obj]

    if isinstance(obj, dict):
        return {str(k): deep_to_dict(v) for k, v in obj.items()}

    if isinstance(obj, (type, types.MethodType, types.FunctionType)):
        return fullname(obj)

    if isinstance(obj, Exception):
        return "%s: %s" % (fullname(obj), obj)

    raise TypeError("Unhandled type %s" % type(obj))
