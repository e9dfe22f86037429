"""Exception hierarchy shared across the simulator."""


class HydrosimError(Exception):
    """Base class for all package errors."""


# --- map / image ---------------------------------------------------------

class BadMagic(HydrosimError):
    """PGM payload does not start with a supported magic number."""


class TruncatedData(HydrosimError):
    """PGM payload ends before the declared raster is complete."""


class MaxvalUnsupported(HydrosimError):
    """PGM maxval exceeds 255."""


# --- estimation ----------------------------------------------------------

class NonFiniteInput(HydrosimError):
    """A state, control, or measurement contained NaN/inf."""


class SingularInnovation(HydrosimError):
    """Innovation covariance is not invertible."""


# --- planning ------------------------------------------------------------

class AllOccupied(HydrosimError):
    """Grid contains no free cell."""


class NoPath(HydrosimError):
    """Search exhausted the open set without reaching the goal."""


class StartOccupied(HydrosimError):
    """Start pose footprint intersects an obstacle."""


class GoalOccupied(HydrosimError):
    """Goal pose footprint intersects an obstacle."""


class PoseOutOfBounds(HydrosimError):
    """Sensor pose lies outside the grid."""


# --- sampler -------------------------------------------------------------

class OutOfRange(HydrosimError):
    """Encoded motor command carries an out-of-range index."""


class EStopLatched(HydrosimError):
    """Command rejected while the emergency stop is engaged."""


class ExpanderUnresponsive(HydrosimError):
    """Command dropped because its I/O expander is not responding."""


# --- power ---------------------------------------------------------------

class NonPositivePower(HydrosimError):
    """Endurance is undefined for non-positive power draw."""


# --- telemetry -----------------------------------------------------------

class BadSync(HydrosimError):
    """Frame does not begin with the sync marker."""


class BadCrc(HydrosimError):
    """Frame checksum mismatch."""


class BadLength(HydrosimError):
    """Frame length field disagrees with the payload."""


class UnknownType(HydrosimError):
    """Frame carries an unregistered message type."""


# --- mission -------------------------------------------------------------

class DuplicateMotorAssignment(HydrosimError):
    """A mission plan assigns the same sampler motor to two waypoints."""


class EmptyLog(HydrosimError):
    """Metrics requested over a log with no waypoint records."""


# --- engine / scenario ---------------------------------------------------

class ConfigInvalid(HydrosimError):
    """Scenario file is malformed or references missing inputs."""


class MapLoadFailed(HydrosimError):
    """Referenced map/grid file could not be loaded."""


class LogCorrupt(HydrosimError):
    """Simulation log is truncated or structurally invalid."""


# --- bridge --------------------------------------------------------------

class DuplicateLabel(HydrosimError):
    """A sample with this label already exists for the mission."""


class UnknownParameter(HydrosimError):
    """Heatmap requested for a parameter that is not recorded."""


class ArchiveCorrupt(HydrosimError):
    """Sync archive cannot be parsed."""
