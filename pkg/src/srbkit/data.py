"""Loading, validation and sub-database construction for the input tables.

Four CSV inputs drive every run: observations, a country registry, total
fertility rate series, and total births series. Files are UTF-8, comma
separated, `.` decimal point; lines starting with `#` are ignored so that
generated files can carry provenance headers.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MissingBirths,
    MissingColumn,
    MissingTfr,
    NonPositiveSrb,
    UnknownCountry,
    UnknownSourceType,
)
from .util import ffmt

SOURCE_TYPES = ("CRVS_SRS", "Census", "DHS", "OtherDHS", "Other")
SURVEY_TYPES = ("Census", "DHS", "OtherDHS", "Other")

_SOURCE_ALIASES = {
    "CRVS_SRS": "CRVS_SRS",
    "CRVS/SRS": "CRVS_SRS",
    "CRVS": "CRVS_SRS",
    "SRS": "CRVS_SRS",
    "Census": "Census",
    "DHS": "DHS",
    "OtherDHS": "OtherDHS",
    "Other DHS": "OtherDHS",
    "Other": "Other",
}

GRID_START = 1950
GRID_END = 2100

OBS_HEADER = ["country_code", "year", "srb", "source_type", "sampling_sd"]
REG_HEADER = ["country_code", "name", "region_code", "at_risk"]
TFR_HEADER = ["country_code", "year", "tfr_median"]
BIRTHS_HEADER = ["country_code", "year", "births", "unit"]


def grid_year(year: float) -> int:
    """Map a decimal observation year onto the integer model grid."""
    return int(math.floor(year + 0.5))


@dataclass(frozen=True)
class Observation:
    """One SRB data point: value with source type and sampling error."""

    country_code: str
    year: float
    value: float
    source_type: str
    sampling_sd: float

    def __post_init__(self):
        if self.value <= 0.0:
            raise NonPositiveSrb(f"srb must be positive, got {self.value}")
        if self.sampling_sd < 0.0:
            raise NonPositiveSrb(f"sampling_sd must be >= 0, got {self.sampling_sd}")
        if not (1900.0 <= self.year <= 2100.0):
            raise NonPositiveSrb(f"year {self.year} outside [1900, 2100]")
        if self.source_type not in SOURCE_TYPES:
            raise UnknownSourceType(f"unknown source type {self.source_type!r}")

    @property
    def grid_year(self) -> int:
        return grid_year(self.year)


class ObservationSet:
    """Immutable collection of observations, sorted by (country, year)."""

    def __init__(self, rows):
        self._rows = tuple(sorted(rows, key=lambda o: (o.country_code, o.year,
                                                       o.source_type, o.value)))

    def __len__(self):
        return len(self._rows)

    def __iter__(self):
        return iter(self._rows)

    def __getitem__(self, i):
        return self._rows[i]

    def __eq__(self, other):
        return isinstance(other, ObservationSet) and self._rows == other._rows

    def countries(self):
        return sorted({o.country_code for o in self._rows})

    def for_country(self, code: str):
        return ObservationSet([o for o in self._rows if o.country_code == code])

    def filter(self, pred):
        return ObservationSet([o for o in self._rows if pred(o)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(OBS_HEADER) + "\n")
        for o in self._rows:
            buf.write(f"{o.country_code},{ffmt(o.year)},{ffmt(o.value)},"
                      f"{o.source_type},{ffmt(o.sampling_sd)}\n")
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())


@dataclass(frozen=True)
class Country:
    code: str
    name: str
    region_code: str
    at_risk: bool


@dataclass(frozen=True)
class CountryRegistry:
    """Countries with region membership and the configured at-risk flags."""

    countries: tuple

    def __post_init__(self):
        codes = [c.code for c in self.countries]
        if len(codes) != len(set(codes)):
            raise UnknownCountry("duplicate country codes in registry")

    @property
    def codes(self):
        return tuple(c.code for c in self.countries)

    @property
    def regions(self):
        return tuple(sorted({c.region_code for c in self.countries}))

    @property
    def at_risk_codes(self):
        return tuple(c.code for c in self.countries if c.at_risk)

    def region_of(self, code: str) -> str:
        for c in self.countries:
            if c.code == code:
                return c.region_code
        raise UnknownCountry(code)

    def is_at_risk(self, code: str) -> bool:
        for c in self.countries:
            if c.code == code:
                return c.at_risk
        raise UnknownCountry(code)

    def __contains__(self, code: str) -> bool:
        return any(c.code == code for c in self.countries)


@dataclass
class TfrSeries:
    years: np.ndarray
    median: np.ndarray
    trajectories: np.ndarray | None = None  # (n_years, M) when present


@dataclass
class TfrTable:
    """Median TFR by country-year, optionally with projection trajectories."""

    series: dict = field(default_factory=dict)  # code -> TfrSeries

    def for_country(self, code: str) -> TfrSeries:
        if code not in self.series:
            raise MissingTfr(f"no TFR series for {code}")
        return self.series[code]

    def has_trajectories(self, code: str) -> bool:
        s = self.series.get(code)
        return s is not None and s.trajectories is not None

    def __contains__(self, code):
        return code in self.series


@dataclass(frozen=True)
class TfrAnchors:
    """Start-year prior anchors derived from a country's TFR decline."""

    country_code: str
    f6: int
    f29: int
    z: int
    x: int
    never_crosses: bool = False


@dataclass
class BirthsTable:
    """Total births per country-year; unit is carried, never rescaled."""

    series: dict = field(default_factory=dict)  # code -> (years, births)
    unit: str = "thousands"

    def for_country(self, code: str):
        if code not in self.series:
            raise MissingBirths(f"no births series for {code}")
        return self.series[code]

    def at(self, code: str, years) -> np.ndarray:
        yrs, b = self.for_country(code)
        idx = {int(y): i for i, y in enumerate(yrs)}
        out = np.empty(len(years), dtype=float)
        for j, y in enumerate(years):
            if int(y) not in idx:
                raise MissingBirths(f"no births for {code} in {int(y)}")
            out[j] = b[idx[int(y)]]
        return out


# --- parsing ----------------------------------------------------------------

def _read_rows(path, expected_header, allow_extra=False):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("".join(lines)))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn(f"{path}: empty file")
    header = [h.strip() for h in header]
    for col in expected_header:
        if col not in header:
            raise MissingColumn(f"{path}: missing column {col!r}")
    if not allow_extra and len(header) != len(expected_header):
        extra = [h for h in header if h not in expected_header]
        if extra:
            raise MissingColumn(f"{path}: unexpected columns {extra}")
    return header, list(reader)


def load_observations(path, registry: CountryRegistry | None = None) -> ObservationSet:
    """Parse observations.csv; raises a structured error on the first bad row."""
    header, rows = _read_rows(path, OBS_HEADER)
    col = {name: header.index(name) for name in OBS_HEADER}
    out = []
    for rownum, row in enumerate(rows, start=2):
        if not row:
            continue
        code = row[col["country_code"]].strip()
        stype_raw = row[col["source_type"]].strip()
        if stype_raw not in _SOURCE_ALIASES:
            raise UnknownSourceType(f"row {rownum}: unknown source type {stype_raw!r}")
        try:
            year = float(row[col["year"]])
            value = float(row[col["srb"]])
            sd = float(row[col["sampling_sd"]])
        except ValueError as exc:
            raise NonPositiveSrb(f"row {rownum}: {exc}") from exc
        if registry is not None and code not in registry:
            raise UnknownCountry(f"row {rownum}: country {code!r} not in registry")
        try:
            out.append(Observation(code, year, value, _SOURCE_ALIASES[stype_raw], sd))
        except (NonPositiveSrb, UnknownSourceType) as exc:
            raise type(exc)(f"row {rownum}: {exc}") from exc
    return ObservationSet(out)


def load_registry(path) -> CountryRegistry:
    header, rows = _read_rows(path, REG_HEADER)
    col = {name: header.index(name) for name in REG_HEADER}
    countries = []
    for rownum, row in enumerate(rows, start=2):
        if not row:
            continue
        flag = row[col["at_risk"]].strip()
        if flag not in ("0", "1"):
            raise MissingColumn(f"row {rownum}: at_risk must be 0 or 1, got {flag!r}")
        countries.append(Country(row[col["country_code"]].strip(),
                                 row[col["name"]].strip(),
                                 row[col["region_code"]].strip(),
                                 flag == "1"))
    return CountryRegistry(tuple(countries))


def load_tfr(path) -> TfrTable:
    header, rows = _read_rows(path, TFR_HEADER, allow_extra=True)
    traj_cols = [i for i, h in enumerate(header) if h.startswith("traj_")]
    col = {name: header.index(name) for name in TFR_HEADER}
    acc: dict[str, list] = {}
    for row in rows:
        if not row:
            continue
        code = row[col["country_code"]].strip()
        year = int(float(row[col["year"]]))
        med = float(row[col["tfr_median"]])
        if med <= 0:
            raise MissingTfr(f"TFR must be positive, got {med} for {code},{year}")
        traj = [float(row[i]) for i in traj_cols] if traj_cols else None
        acc.setdefault(code, []).append((year, med, traj))
    table = TfrTable()
    for code, items in acc.items():
        items.sort()
        years = np.array([y for y, _, _ in items], dtype=int)
        med = np.array([m for _, m, _ in items], dtype=float)
        if np.any(np.diff(years) != 1):
            raise MissingTfr(f"TFR years for {code} must be contiguous")
        traj = None
        if traj_cols:
            traj = np.array([t for _, _, t in items], dtype=float)
        table.series[code] = TfrSeries(years, med, traj)
    return table


def load_births(path) -> BirthsTable:
    header, rows = _read_rows(path, BIRTHS_HEADER)
    col = {name: header.index(name) for name in BIRTHS_HEADER}
    acc: dict[str, list] = {}
    unit = "thousands"
    for rownum, row in enumerate(rows, start=2):
        if not row:
            continue
        code = row[col["country_code"]].strip()
        year = int(float(row[col["year"]]))
        b = float(row[col["births"]])
        if b < 0:
            raise MissingBirths(f"row {rownum}: births must be >= 0, got {b}")
        unit = row[col["unit"]].strip() or unit
        acc.setdefault(code, []).append((year, b))
    table = BirthsTable(unit=unit)
    for code, items in acc.items():
        items.sort()
        table.series[code] = (np.array([y for y, _ in items], dtype=int),
                              np.array([b for _, b in items], dtype=float))
    return table


# --- sub-databases ----------------------------------------------------------

RISK_CUTOFF_YEAR = 1970


def build_risk_free_db(obs: ObservationSet, reg: CountryRegistry) -> ObservationSet:
    """All rows from countries not at risk, plus at-risk rows up to 1970."""
    at_risk = set(reg.at_risk_codes)
    return obs.filter(lambda o: o.country_code not in at_risk
                      or o.year <= RISK_CUTOFF_YEAR)


def build_at_risk_db(obs: ObservationSet, reg: CountryRegistry) -> ObservationSet:
    at_risk = set(reg.at_risk_codes)
    return obs.filter(lambda o: o.country_code in at_risk)


def build_country_db(obs: ObservationSet, code: str,
                     registry: CountryRegistry | None = None) -> ObservationSet:
    """All rows of one country; unknown codes raise rather than return empty."""
    if registry is not None:
        if code not in registry:
            raise UnknownCountry(code)
        return obs.filter(lambda o: o.country_code == code)
    sub = obs.filter(lambda o: o.country_code == code)
    if len(sub) == 0:
        raise UnknownCountry(code)
    return sub


def compute_tfr_anchors(tfr: TfrTable, code: str) -> TfrAnchors:
    """First-crossing years of the 6 and 2.9 thresholds on the median series."""
    s = tfr.for_country(code)
    return anchors_from_series(code, s.years, s.median)


def anchors_from_series(code: str, years, values) -> TfrAnchors:
    years = np.asarray(years, dtype=int)
    values = np.asarray(values, dtype=float)
    last = int(years[-1])

    def first_leq(threshold):
        hits = years[values <= threshold]
        if hits.size == 0:
            return last, True
        return int(hits[0]), False

    f6, _ = first_leq(6.0)
    f29, never = first_leq(2.9)
    z = max(RISK_CUTOFF_YEAR, f6)
    x = max(RISK_CUTOFF_YEAR, f29)
    return TfrAnchors(code, f6=f6, f29=f29, z=z, x=x, never_crosses=never)
