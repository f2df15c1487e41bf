"""Exception hierarchy shared across the toolkit."""


class UsageKitError(Exception):
    """Base class for all errors raised by this package."""


# --- recording / video analysis ---

class EmptyRecording(UsageKitError):
    """A recording contained no frames."""


class DimensionMismatch(UsageKitError):
    """Frames in one recording disagree on width/height."""


# --- GUI extraction ---

class TextExtractionError(UsageKitError):
    """The text extraction backend failed on a screen."""


class NoTargetWidget(UsageKitError):
    """No element could be associated with a touch point."""


# --- classification ---

class EmptyTrainingSet(UsageKitError):
    """A classifier was fit on zero examples."""


class SchemaMismatch(UsageKitError):
    """Feature vector length does not match the fitted model."""


class UnknownCategory(UsageKitError):
    """A label is not present in the active taxonomy."""


class InsufficientApps(UsageKitError):
    """Cross-app evaluation needs at least two distinct app ids."""


# --- usage models ---

class UsageMismatch(UsageKitError):
    """Attempted to merge models that describe different usages."""


class UnknownState(UsageKitError):
    """A transition references a state that is not part of the model."""


class ModelParseError(UsageKitError):
    """A serialized usage model file is malformed."""


# --- test generation ---

class NoModelForUsage(UsageKitError):
    """The model index has no entry for the requested usage."""


class AdapterError(UsageKitError):
    """A device adapter violated its protocol or died."""


class NoMatchingState(UsageKitError):
    """The current screen matches no state of the usage model."""


class NoRecommendation(UsageKitError):
    """No widget on the current screen matches any expected transition."""


class InvalidChoice(UsageKitError):
    """A session received a choice outside the offered candidates."""


# --- fixtures / evaluation ---

class FixtureError(UsageKitError):
    """Fixture material on disk is missing or inconsistent."""


class EmptyLog(UsageKitError):
    """A metric was asked to aggregate an empty log."""
