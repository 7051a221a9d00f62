"""Utility functions, exceptions and XML namespaces for holosim."""

OMEGA = 'Ω'
SELF = 'self'


class HolosimError(Exception):
    """Base class for all holosim errors."""


class InputError(HolosimError):
    """Raised for unreadable or invalid user input."""


class EngineError(HolosimError):
    """Raised when a simulation cannot proceed."""


class UsageError(HolosimError):
    """Raised when an operation is called outside its domain."""


class CycleDetected(InputError):
    """Raised when the field dependencies of a schema contain a cycle."""

    def __str__(self):
        return 'Field dependencies contain a cycle: %s.' % ' -> '.join(
            self.args[0])


class UndeclaredField(InputError):
    """Raised when a dependency names a field the schema does not declare."""

    def __str__(self):
        return 'Field "%s" is used as a dependency but is not declared.' % (
            self.args[0])


class OutOfRange(InputError):
    """Raised when a numeric value falls outside its accepted range."""

    def __str__(self):
        return ('The value %r is invalid for %s, accepted range is '
                '[%s, %s].' % (self.args[1], self.args[0], self.args[2],
                               self.args[3]))


class UnknownField(InputError):
    """Raised when an agent has no error profile for a field."""

    def __str__(self):
        return 'Agent "%s" has no prediction error for field "%s".' % (
            self.args[0], self.args[1])


class NoEligiblePeers(EngineError):
    """Raised when every peer is excluded from a query."""

    def __str__(self):
        return 'Agent "%s" has no eligible peer to query about "%s".' % (
            self.args[0], self.args[1])


class DuplicatePeer(EngineError):
    """Raised when a CHECK IN comes from an agent that is already a peer."""

    def __str__(self):
        return 'Agent "%s" already knows "%s" as a peer.' % (
            self.args[0], self.args[1])


class HorizonExceeded(EngineError):
    """Raised when stepping a world that has reached its horizon."""

    def __str__(self):
        return 'Clock %s has reached the horizon %s.' % self.args[:2]


class ScriptExhausted(EngineError):
    """Raised when the scripted delay schedule has no entry for a message."""

    def __str__(self):
        return 'No scripted delay for message %s of agent "%s".' % (
            self.args[1], self.args[0])


class InvalidScenario(EngineError):
    """Raised when a scenario cannot initialise a world."""

    def __str__(self):
        return 'Invalid scenario: %s.' % self.args[0]


class HolonInactive(UsageError):
    """Raised when a holon is not active during a requested window."""

    def __str__(self):
        return 'No holon headed by "%s" is active at tick %s.' % self.args[:2]


class OverlappingMembers(UsageError):
    """Raised when composing holon agents that share members."""

    def __str__(self):
        return 'Holon agents share members: %s.' % ', '.join(
            sorted(self.args[0]))


class StateSpaceTooLarge(UsageError):
    """Raised when a global state space exceeds the enumeration cap."""

    def __str__(self):
        return 'Global state space has %s states, the cap is %s.' % (
            self.args[0], self.args[1])


class DomainError(UsageError):
    """Raised when a probability parameter is below its domain."""

    def __str__(self):
        return 'The value %s is invalid for %s, the minimum is %s.' % (
            self.args[1], self.args[0], self.args[2])


class ParseError(InputError):
    """Raised when a scenario or trace line cannot be parsed."""

    def __str__(self):
        return 'Line %s: %s.' % (self.args[0], self.args[1])


class ValidationError(InputError):
    """Raised when a parsed scenario fails a referential check."""

    def __str__(self):
        return 'Invalid scenario: %s.' % self.args[0]


class GoldenMismatch(HolosimError):
    """Raised when a table projection differs from its golden copy."""

    def __str__(self):
        return ('Table %s differs at tick %s, column %s: expected "%s", '
                'got "%s".' % self.args[:5])


HOLOSIM_NS = 'urn:x-holosim:report:1'

NAMESPACES = {'hs': HOLOSIM_NS}


def report_root_order(elem):
    """
    Sorts the elements in the report root element in the correct
    sequence.
    """
    return ['{%s}holarchy' % HOLOSIM_NS,
            '{%s}probability' % HOLOSIM_NS].index(elem.tag)
