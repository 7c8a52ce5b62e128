"""JSON artifacts: instance, decomposition, tensor and result files.

Every file is a pydantic model; reads go through ``read_model`` so syntax
and schema problems surface as InputError with their location.
"""
import json
import os
from fractions import Fraction
from typing import List, Optional, Type, TypeVar, Union

from pydantic import BaseModel, Field, ValidationError
from typing_extensions import Annotated

from tkrank.errors import InputError

ModelT = TypeVar("ModelT", bound=BaseModel)

# 1-indexed universe element
Element = Annotated[int, Field(ge=1)]
Residue = Annotated[int, Field(ge=0)]


class RationalValue(BaseModel):
    """An exact rational with a float approximation alongside."""
    numerator: int = Field(description="Numerator in lowest terms.")
    denominator: int = Field(description="Positive denominator in lowest terms.")
    value: float = Field(description="Floating approximation, for reading only.")

    @classmethod
    def of(cls, q: Fraction) -> "RationalValue":
        q = Fraction(q)
        return cls(numerator=q.numerator, denominator=q.denominator, value=float(q))

    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}" if self.denominator != 1 else str(self.numerator)


class TripartitionFile(BaseModel):
    """Balanced tripartitioning instance: three families of n-subsets of [3n], 1-indexed."""
    n: int = Field(ge=0, description="Block size; the universe is [3n].")
    families: List[List[List[Element]]] = Field(description="Exactly three families of n-element subsets.")


class SetCoverFile(BaseModel):
    """s-set cover instance over the universe [n]."""
    n: int = Field(ge=0, description="Universe size.")
    t: int = Field(ge=0, description="Budget: at most t sets may be used.")
    s: int = Field(ge=0, description="Largest allowed set size.")
    sets: List[List[Element]] = Field(description="The set family, 1-indexed elements.")


class TermFile(BaseModel):
    u: List[Residue]
    v: List[Residue]
    w: List[Residue]
    scale: Residue


class DecompositionFile(BaseModel):
    """Rank-one terms over Z_p; all values are residues in [0, p)."""
    p: int = Field(description="Field modulus.")
    dims: List[int] = Field(min_length=3, max_length=3, description="Axis sizes (n1, n2, n3).")
    terms: List[TermFile] = Field(description="The rank-one terms.")


class SparseTensorFile(BaseModel):
    """Sparse trilinear form: entries are [i, j, k, coefficient] rows."""
    p: int = Field(description="Field modulus.")
    dims: List[int] = Field(min_length=3, max_length=3, description="Axis sizes (n1, n2, n3).")
    entries: List[List[int]] = Field(description="Nonzero coefficients as [i, j, k, c].")


class SolveResult(BaseModel):
    """Outcome of one decision run."""
    answer: bool = Field(description="True for a yes-instance.")
    witness: Optional[List[List[int]]] = Field(default=None, description="A solution, when the solver produces one.")
    trials_used: int = Field(default=0, description="Randomized trials run (0 for deterministic solvers).")
    p: Optional[str] = Field(default=None, description="Per-trial survival probability as 'num/den'.")
    count: Optional[int] = Field(default=None, description="Exact number of ordered solutions, when counted.")
    algo: str = Field(default="", description="Decider that produced the answer.")
    fallback: bool = Field(default=False, description="True when a reduction fell back to brute force.")


def _location(error: dict) -> str:
    loc = ".".join(str(part) for part in error.get("loc", ()))
    return f"{loc}: {error.get('msg', '')}" if loc else error.get("msg", "")


def parse_model(text: str, model: Type[ModelT], source: str = "<input>") -> ModelT:
    return validate_model(load_json_text(text, source), model, source)


def read_model(path: str, model: Type[ModelT]) -> ModelT:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    return parse_model(text, model, source=path)


def dump_model(model: BaseModel) -> str:
    return model.model_dump_json(indent=2, exclude_none=True) + "\n"


def write_model(model: BaseModel, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_model(model))
    return path


def load_json_text(text: str, source: str = "<input>"):
    """Parse JSON, reporting syntax errors with their line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from e


def validate_model(data, model: Type[ModelT], source: str = "<input>") -> ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        details = "; ".join(_location(err) for err in e.errors())
        raise InputError(f"{source}: {details}") from e


def read_instance(path: str) -> Union[TripartitionFile, SetCoverFile]:
    """Instance file of either kind, told apart by its keys."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    data = load_json_text(text, path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object at the top level")
    if "families" in data:
        return validate_model(data, TripartitionFile, path)
    if "sets" in data:
        return validate_model(data, SetCoverFile, path)
    raise InputError(f"{path}: neither 'families' (tripartition) nor 'sets' (set cover) present")
