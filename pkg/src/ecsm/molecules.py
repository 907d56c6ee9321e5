"""Molecular constants: the bundled registry, CSV ingestion and unit policy."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from importlib import resources

HEADER = ("name", "mu_amu", "De", "delta")

# (hbar c)^2 / (m_u c^2) in eV * Angstrom^2, from CODATA 2018:
# hbar c = 1973.269804 eV*A, m_u c^2 = 931.49410242e6 eV.
HBAR2_OVER_AMU_EV_A2 = 1973.269804**2 / 931.49410242e6


class RegistryError(ValueError):
    """Base class for registry ingestion failures."""


class ParseError(RegistryError):
    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


class RecordValidationError(RegistryError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DuplicateNameError(RegistryError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate molecule name {name!r}")


class MoleculeNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class MoleculeRecord:
    """One row of molecular constants.

    ``mu`` is the reduced mass in amu, ``de`` the dissociation energy and
    ``delta`` the screening parameter, all in the reference units (no conversion).
    """

    name: str
    mu: float
    de: float
    delta: float

    def __post_init__(self) -> None:
        if not self.name:
            raise RecordValidationError("name", "must be non-empty")
        for field in ("mu", "de", "delta"):
            value = getattr(self, field)
            if not math.isfinite(value) or value <= 0:
                raise RecordValidationError(field, f"must be finite and > 0, got {value!r}")


class UnitMode(enum.Enum):
    RAW_PAPER = "raw"
    PHYSICAL = "physical"


@dataclass(frozen=True)
class UnitConvention:
    """How hbar enters the formulas.

    In ``RAW_PAPER`` mode hbar = 1 and the tabulated numbers are used as-is;
    this is the convention under which the bundled reference energies come out.
    ``PHYSICAL`` mode uses ``hbar2_over_amu`` (energy * length^2) so that a
    mass in amu becomes ``mu / hbar2_over_amu`` in inverse energy-length^2.
    """

    mode: UnitMode = UnitMode.RAW_PAPER
    hbar2_over_amu: float = HBAR2_OVER_AMU_EV_A2

    def __post_init__(self) -> None:
        if self.mode is UnitMode.PHYSICAL and not self.hbar2_over_amu > 0:
            raise ValueError("hbar2_over_amu must be > 0 in physical mode")

    def scaled_mass(self, mu: float) -> float:
        """Return mu / hbar^2, the only combination in which hbar appears."""
        if self.mode is UnitMode.RAW_PAPER:
            return mu
        return mu / self.hbar2_over_amu


RAW_PAPER = UnitConvention()

# Reduced mass (amu), dissociation energy and screening parameter.
_TABLE1 = (
    ("H2", 0.5041, 4.746768, 2.993),
    ("ZnH", 0.9928, 0.950352, 0.25),
    ("CdH", 0.9992, 0.766272, 0.218),
    ("HgH", 1.0031, 0.46136, 0.312),
    ("CH", 0.93, 3.64032, 0.534),
    ("OH", 0.9484, 4.58016, 0.714),
    ("HF", 0.9573, 6.6456, 0.77),
    ("HCl", 0.9799, 4.613856, 0.3019),
    ("HBr", 0.9956, 3.916848, 0.226),
    ("HI", 1.0002, 3.198, 0.183),
    ("Li2", 3.509, 1.05144, 0.00704),
    ("Na2", 11.498, 0.73944, 0.00079),
    ("K2", 19.488, 0.51929, 0.000219),
    ("N2", 7.0038, 7.516704, 0.0187),
    ("P2", 15.492, 5.077488, 0.00142),
    ("O2", 8.0, 5.211034, 0.01579),
    ("SO", 10.665, 4.069728, 0.00562),
    ("Cl2", 17.489, 2.509104, 0.0017),
    ("Br2", 39.958, 1.99056, 0.000275),
    ("I2", 63.466, 1.553136, 0.000117),
    ("ICl", 27.422, 2.175264, 0.000536),
    ("CO", 6.8584, 9.02616, 0.01748),
    ("NO", 7.4688, 5.411952, 0.0128),
)


def builtin_table1() -> list[MoleculeRecord]:
    """Return the 23 bundled molecules in reference order."""
    return [MoleculeRecord(*row) for row in _TABLE1]


def lookup(records: list[MoleculeRecord], name: str) -> MoleculeRecord:
    for rec in records:
        if rec.name == name:
            return rec
    raise MoleculeNotFoundError(name)


def load_registry(source: bytes | str | io.IOBase) -> list[MoleculeRecord]:
    """Parse a ``name,mu_amu,De,delta`` CSV into validated records.

    ``source`` may be raw bytes, decoded text, or a binary/text file object.
    Row numbers in errors count the header as row 1.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    reader = csv.reader(io.StringIO(source, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(1, "missing header") from None
    if tuple(h.strip() for h in header) != HEADER:
        raise ParseError(1, f"expected header {','.join(HEADER)}, got {','.join(header)}")

    records: list[MoleculeRecord] = []
    seen: set[str] = set()
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(HEADER):
            raise ParseError(row_no, f"expected {len(HEADER)} fields, got {len(row)}")
        name = row[0].strip()
        try:
            mu, de, delta = (float(v) for v in row[1:])
        except ValueError as exc:
            raise ParseError(row_no, str(exc)) from None
        rec = MoleculeRecord(name, mu, de, delta)
        if name in seen:
            raise DuplicateNameError(name)
        seen.add(name)
        records.append(rec)
    return records


def serialize_registry(records: list[MoleculeRecord]) -> bytes:
    """Inverse of :func:`load_registry`; floats are written with ``repr``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for rec in records:
        writer.writerow([rec.name, repr(rec.mu), repr(rec.de), repr(rec.delta)])
    return buf.getvalue().encode("utf-8")


def bundled_csv() -> bytes:
    """The shipped ``molecules.csv`` data asset."""
    return resources.files("ecsm").joinpath("data/molecules.csv").read_bytes()
