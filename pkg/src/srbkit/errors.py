"""Exception types raised across the package.

Every error that callers are expected to catch has its own class so that
batch drivers can map failures to exit codes without string matching.
"""


class SrbError(Exception):
    """Base class for all package errors."""


# --- input / ingest ---------------------------------------------------------

class MissingColumn(SrbError):
    pass


class NonPositiveSrb(SrbError):
    pass


class UnknownSourceType(SrbError):
    pass


class UnknownCountry(SrbError):
    pass


class MissingTfr(SrbError):
    pass


class MissingBirths(SrbError):
    pass


# --- likelihood / model -----------------------------------------------------

class ZeroTotalVariance(SrbError):
    pass


class MissingTheta(SrbError):
    pass


class MissingFixedInput(SrbError):
    pass


class RhoOutOfRange(SrbError):
    pass


class NonPositiveTheta(SrbError):
    pass


# --- mcmc -------------------------------------------------------------------

class NoData(SrbError):
    pass


class NonFiniteDensity(SrbError):
    pass


class SupportViolation(SrbError):
    pass


class TooFewChains(SrbError):
    pass


class ZeroVariance(SrbError):
    pass


class NumericalOverflow(SrbError):
    pass


class DegenerateObjective(SrbError):
    pass


# --- projection / accounting ------------------------------------------------

class MissingPsi(SrbError):
    pass


class MissingFit(SrbError):
    pass


class DrawCountMismatch(SrbError):
    pass


# --- validation -------------------------------------------------------------

class EmptyTest(SrbError):
    pass


class NoTestRows(SrbError):
    pass


class MissingYear(SrbError):
    pass


class MissingHyperDraws(SrbError):
    pass


# --- synth / cli ------------------------------------------------------------

class SpecOutOfSupport(SrbError):
    pass


class MissingPrerequisite(SrbError):
    pass
