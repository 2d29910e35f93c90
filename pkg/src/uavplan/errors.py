"""Exception hierarchy shared by the planning modules."""


class PlanningError(Exception):
    """Base class for every error raised by uavplan."""


class InvalidTransformError(PlanningError, ValueError):
    pass


class OutOfBoundsError(PlanningError, IndexError):
    pass


class InvalidEndpointError(PlanningError, ValueError):
    """A* was asked to search from or to a blocked/out-of-range cell."""


class InfeasibleEndpointError(PlanningError):
    """A mission endpoint sits on a blocked cell and cannot be snapped."""


class InfeasibleMissionError(PlanningError):
    """Some required leg has no obstacle-free path.

    ``pair`` holds the two node labels (e.g. ``("home", "target 3")``).
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class SceneFormatError(PlanningError, ValueError):
    """Scene or plan document failed to parse or validate.

    ``field`` names the offending location (``"targets[2]"``) and ``line``
    the 1-based line number for line-oriented formats.
    """

    def __init__(self, message, field=None, line=None):
        prefix = ""
        if field is not None:
            prefix = f"{field}: "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class GenerationError(PlanningError):
    pass
