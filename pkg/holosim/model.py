"""
Domain types for the peer-to-peer fusion simulator: field schemas, agent
error profiles, messages, BEST tables, agent state and run configuration.

Field values themselves are never simulated. A message field only carries
the prediction error the responding agent has for it, and the quality of a
field is 1 - error.

References:

    * networkx DiGraph https://networkx.org/documentation/stable/
    * dataclasses https://docs.python.org/3/library/dataclasses.html

"""

from dataclasses import dataclass, field as dc_field

import networkx as nx

from holosim.constants import MESSAGE_KINDS, MODES, PHASES, SIM_DEFAULTS
from holosim.utils import (CycleDetected, OMEGA, OutOfRange, UndeclaredField,
                           UnknownField)

__all__ = ['FieldSchema', 'AgentProfile', 'Message', 'BestTable',
           'AgentState', 'UniformInt', 'Scripted', 'SimConfig',
           'validate_schema', 'quality', 'compound_fields',
           'topological_order', 'dependency_depth', 'WHOLE_MESSAGE']

WHOLE_MESSAGE = 'M'


@dataclass(frozen=True)
class FieldSchema:
    """Message fields and the dependency lists of compound fields."""
    fields: tuple
    deps: dict = dc_field(default_factory=dict)

    def deps_of(self, field):
        """Return the ordered component fields of a field."""
        return tuple(self.deps.get(field, ()))


@dataclass(frozen=True)
class AgentProfile:
    """Prediction error of one agent for each compound field."""
    agent: str
    errors: dict

    def error(self, field):
        """Return the error for field or raise UnknownField."""
        try:
            return self.errors[field]
        except KeyError:
            raise UnknownField(self.agent, field) from None


@dataclass(frozen=True)
class Message:
    """A single message between two agents."""
    id: int
    kind: str
    field: str
    sender: str
    recipient: str
    parent: int = None
    sent_at: int = 0
    payload_error: float = None

    def __post_init__(self):
        if self.kind not in MESSAGE_KINDS:
            raise ValueError('Invalid message kind "%s".' % self.kind)
        if self.sender == self.recipient:
            raise ValueError('Message %s is addressed to its sender.'
                             % self.id)
        if (self.payload_error is None) == (self.kind == 'Response'):
            raise ValueError('Message %s: payload error is required for '
                             'responses only.' % self.id)


@dataclass(frozen=True)
class BestTable:
    """
    Counts of how often each agent gave the winning response, keyed by
    (field, agent). The table of Ω restricted to field M is BEST-0.
    """
    owner: str
    counts: dict = dc_field(default_factory=dict)

    def count(self, field, agent):
        """Return the count of a cell, zero when never incremented."""
        return self.counts.get((field, agent), 0)

    def field_counts(self, field):
        """Return the counts of a single field as agent -> count."""
        return {agent: value for (fld, agent), value in self.counts.items()
                if fld == field}


@dataclass
class AgentState:
    """Mutable state of one agent inside a world."""
    id: str
    profile: AgentProfile
    remaining_messages: int
    budget: int = None
    mode: str = MODES[0]
    phase: str = PHASES[0]
    best: BestTable = None
    pending_out: dict = dc_field(default_factory=dict)
    pending_in: list = dc_field(default_factory=list)
    timeout_counts: dict = dc_field(default_factory=dict)
    peers: set = dc_field(default_factory=set)
    deferred: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.best is None:
            self.best = BestTable(self.id)

    @property
    def unlimited(self):
        """True for agents without a message budget (Ω by default)."""
        return self.budget is None

    def can_send(self, count=1):
        """True if the agent can pay for count more messages."""
        return self.unlimited or self.remaining_messages >= count

    def error(self, field):
        """
        Prediction error for a field. Ω without a profile entry knows
        nothing about the message.
        """
        if self.id == OMEGA and field not in self.profile.errors:
            return 1.0
        return self.profile.error(field)

    def unresponsive(self):
        """Peers this agent has seen time out since their last answer."""
        return {peer for peer, count in self.timeout_counts.items()
                if count > 0}


@dataclass(frozen=True)
class UniformInt:
    """Uniform integer message delay in [lo, hi]."""
    lo: int = 1
    hi: int = 5

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise OutOfRange('delay_dist', (self.lo, self.hi), 1, 'hi')


@dataclass(frozen=True)
class Scripted:
    """
    Delays read from a scenario schedule keyed by (sender, ordinal), where
    the ordinal counts the messages of the sender from 1. Messages listed
    in declines are turned down by their recipient.
    """
    schedule: dict = dc_field(default_factory=dict)
    declines: frozenset = frozenset()


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation run."""
    K: int = SIM_DEFAULTS['K']
    C: int = SIM_DEFAULTS['C']
    budget: int = SIM_DEFAULTS['budget']
    timeout_ticks: int = SIM_DEFAULTS['timeout_ticks']
    horizon: int = SIM_DEFAULTS['horizon']
    anneal_p0: float = SIM_DEFAULTS['anneal_p0']
    anneal_tau: float = SIM_DEFAULTS['anneal_tau']
    timeout_switch_threshold: int = SIM_DEFAULTS['timeout_switch_threshold']
    lottery_threshold_pct: float = SIM_DEFAULTS['lottery_threshold_pct']
    lottery_p: float = SIM_DEFAULTS['lottery_p']
    checkin_threshold: int = SIM_DEFAULTS['checkin_threshold']
    omega_min_responses: int = SIM_DEFAULTS['omega_min_responses']
    seed: int = SIM_DEFAULTS['seed']
    delay_dist: object = UniformInt()
    forwarding: bool = SIM_DEFAULTS['forwarding']

    def __post_init__(self):
        for name, low in (('K', 1), ('C', 1), ('budget', 0),
                          ('timeout_ticks', 1), ('horizon', 0),
                          ('timeout_switch_threshold', 1),
                          ('checkin_threshold', 0),
                          ('omega_min_responses', 1), ('seed', 0)):
            if getattr(self, name) < low:
                raise OutOfRange(name, getattr(self, name), low, 'inf')
        for name in ('anneal_p0', 'lottery_threshold_pct', 'lottery_p'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise OutOfRange(name, getattr(self, name), 0, 1)
        if self.anneal_tau is not None and self.anneal_tau <= 0:
            raise OutOfRange('anneal_tau', self.anneal_tau, '>0', 'inf')

    @property
    def tau(self):
        """Annealing time constant, horizon / 3 unless configured."""
        if self.anneal_tau is not None:
            return self.anneal_tau
        return max(self.horizon, 1) / 3.0


def validate_schema(schema):
    """Check that a schema is closed and acyclic.

    The whole message "M", when declared, always depends on every other
    field in declaration order; the returned schema carries that list.

    :schema: FieldSchema
    :returns: validated FieldSchema

    """
    declared = set(schema.fields)
    deps = {fld: tuple(components) for fld, components
            in schema.deps.items() if components}
    for fld, components in sorted(deps.items()):
        for component in (fld,) + components:
            if component not in declared:
                raise UndeclaredField(component)
    if WHOLE_MESSAGE in declared:
        deps[WHOLE_MESSAGE] = tuple(fld for fld in schema.fields
                                    if fld != WHOLE_MESSAGE)

    graph = _dependency_graph(schema.fields, deps)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return FieldSchema(tuple(schema.fields), deps)
    raise CycleDetected([edge[0] for edge in cycle])


def _dependency_graph(fields, deps):
    """Return the dependency DiGraph, edges from a field to its components."""
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(fields))
    for fld in sorted(deps):
        for component in deps[fld]:
            graph.add_edge(fld, component)
    return graph


def quality(error):
    """Return the quality 1 - error of a prediction error in [0, 1]."""
    if not 0.0 <= error <= 1.0:
        raise OutOfRange('error', error, 0, 1)
    return 1.0 - error


def compound_fields(schema):
    """Return the set of fields with a non-empty dependency list."""
    return {fld for fld in schema.fields if schema.deps.get(fld)}


def topological_order(schema):
    """Return the fields ordered so that every field follows its components."""
    graph = _dependency_graph(schema.fields, schema.deps)
    return list(reversed(list(nx.lexicographical_topological_sort(graph))))


def dependency_depth(schema):
    """Length of the longest dependency chain, ignoring the whole message."""
    deps = {fld: components for fld, components in schema.deps.items()
            if fld != WHOLE_MESSAGE}
    graph = _dependency_graph(
        [fld for fld in schema.fields if fld != WHOLE_MESSAGE], deps)
    return nx.dag_longest_path_length(graph)
