"""Exception types shared across the simulator."""


class DrivesimError(Exception):
    """Base class for all simulator errors."""


class ParseError(DrivesimError):
    """A config or data file could not be parsed; carries file/line context."""

    def __init__(self, message, path=None, line=None, field=None):
        ctx = []
        if path is not None:
            ctx.append(str(path))
        if line is not None:
            ctx.append(f"line {line}")
        if field is not None:
            ctx.append(f"field {field!r}")
        prefix = " @ ".join(ctx)
        super().__init__(f"{message}" + (f" ({prefix})" if prefix else ""))
        self.path = path
        self.line = line
        self.field = field


class ValidationError(DrivesimError):
    """A loaded structure violates one of its invariants."""


class MissingAsset(DrivesimError):
    def __init__(self, path):
        super().__init__(f"referenced asset not found: {path}")
        self.path = path


class EmptyCloud(DrivesimError):
    """Point-cloud operation on an empty cloud."""


class EmptyResult(DrivesimError):
    """Filtering removed every point; caller must widen the crop."""


class NonConvergence(DrivesimError):
    """Registration hit max iterations with the objective above threshold."""

    def __init__(self, message, final_cd=None, iterations=None):
        super().__init__(message)
        self.final_cd = final_cd
        self.iterations = iterations


class EmptyTrajectory(DrivesimError):
    pass


class MissingAgentState(DrivesimError):
    pass


class UnknownBehavior(DrivesimError):
    pass


class InvalidRig(DrivesimError):
    pass


class ShapeMismatch(DrivesimError):
    pass


class DegenerateDenominator(UserWarning):
    """Full-hemisphere shadow integral vanished; intensity defaults to 1."""


class RiccatiDivergence(DrivesimError):
    pass


class EmptyPlan(DrivesimError):
    pass


class NonPositiveInput(DrivesimError):
    pass


class AgentTimeout(DrivesimError):
    def __init__(self, agent_id, step):
        super().__init__(f"agent {agent_id!r} timed out at step {step}")
        self.agent_id = agent_id
        self.step = step


class AgentProtocolError(DrivesimError):
    pass


class VersionMismatch(AgentProtocolError):
    pass


class DuplicateAgentId(AgentProtocolError):
    pass
