import functools
import json
import os
import re
from typing import Union

import numpy as np

from gammakit.core import GammaPoint, Verdict
from gammakit.exceptions import DimensionMismatchError
from gammakit.model.blh import InnerSymbol
from gammakit.model.hardy import SymbolTuple
from gammakit.model.symbol import MatrixSymbol
from gammakit.operators import MatrixTuple
from gammakit.typing import complex_from_doc, deep_to_dict, matrix_from_doc

dumps = json.dumps
loads = json.loads

_TUPLE_LITERAL = re.compile(r"^\s*\((.*)\)\s*$")


class DeepDictEncoder(json.JSONEncoder):
    """JSON encoder for gammakit results: anything ``deep_to_dict`` understands can be dumped."""

    def default(self, o):
        return deep_to_dict(o)

    def encode(self, o):
        return super().encode(deep_to_dict(o))


def _reader(fn):
    """Malformed documents surface as ValueError, like every other input error."""

    @functools.wraps(fn)
    def wrapper(doc, *args, **kwargs):
        try:
            return fn(doc, *args, **kwargs)
        except KeyError as e:
            raise ValueError("%s: document lacks key %s" % (fn.__name__, e)) from e
        except TypeError as e:
            raise ValueError("%s: malformed document (%s)" % (fn.__name__, e)) from e

    return wrapper


def to_json(obj, **kwargs) -> str:
    return json.dumps(obj, cls=DeepDictEncoder, **kwargs)


def load_document(source: Union[str, os.PathLike]):
    """
    Reads a JSON document given inline or as a path to a file. Strings that do not look like JSON are taken as paths.
    """
    if isinstance(source, os.PathLike):
        with open(source) as fd:
            return json.load(fd)

    text = source.strip()
    if text[:1] not in ("{", "[") and os.path.isfile(source):
        with open(source) as fd:
            return json.load(fd)

    return json.loads(text)


@_reader
def point_from_doc(doc) -> GammaPoint:
    """
    A GammaPoint from ``{"n": n, "s": [[re, im], ...]}``, a plain list of coordinates or a tuple literal such as
    ``"(3,1)"``.
    """
    if isinstance(doc, str):
        match = _TUPLE_LITERAL.match(doc)
        if match is None:
            return point_from_doc(load_document(doc))
        parts = [p for p in match.group(1).split(",") if p.strip()]
        return GammaPoint([complex_from_doc(p) for p in parts])

    if isinstance(doc, dict):
        point = GammaPoint([complex_from_doc(v) for v in doc["s"]])
        if "n" in doc and int(doc["n"]) != point.n:
            raise DimensionMismatchError(
                "point declares n=%s but has %d coordinates" % (doc["n"], point.n)
            )
        return point

    if isinstance(doc, (list, tuple)):
        return GammaPoint([complex_from_doc(v) for v in doc])

    raise ValueError("cannot read a point from %r" % (doc,))


@_reader
def tuple_from_doc(doc) -> MatrixTuple:
    """A MatrixTuple from ``{"n": n, "mats": [matrix, ...]}`` or a plain list of matrices."""
    mats = doc["mats"] if isinstance(doc, dict) else doc
    result = MatrixTuple([matrix_from_doc(m) for m in mats])
    if isinstance(doc, dict) and "n" in doc and int(doc["n"]) != result.n:
        raise DimensionMismatchError(
            "tuple declares n=%s but has %d matrices" % (doc["n"], result.n)
        )
    return result


@_reader
def symbol_tuple_from_doc(doc) -> SymbolTuple:
    A = [matrix_from_doc(m) for m in doc["A"]]
    if "d" in doc:
        d = int(doc["d"])
    elif A:
        d = A[0].shape[0]
    else:
        raise ValueError("empty parameter tuple needs an explicit d")
    return SymbolTuple(d, A)


@_reader
def symbol_from_doc(doc) -> MatrixSymbol:
    return MatrixSymbol(np.array([matrix_from_doc(c) for c in doc["coeffs"]]))


@_reader
def inner_symbol_from_doc(doc) -> InnerSymbol:
    numerator = symbol_from_doc(doc)
    if "e_in" in doc and "e_out" in doc:
        declared = (int(doc["e_out"]), int(doc["e_in"]))
        if numerator.shape != declared:
            raise DimensionMismatchError(
                "inner symbol declares %s but has shape %s" % (declared, numerator.shape)
            )
    denominator = doc.get("denominator")
    if denominator is not None:
        denominator = [complex_from_doc(c) for c in denominator]
    return InnerSymbol(numerator, denominator)


@_reader
def verdict_from_doc(doc) -> Verdict:
    return Verdict(
        bool(doc["holds"]),
        float(doc["defect"]),
        doc.get("certificate"),
        tuple(doc.get("diagnostics", ())),
    )
