"""
Holons as agents: any group of agents of a finite multiagent system can
be replaced by a single agent whose states, perceptions and actions are
the products of those of its members, without changing how the system
evolves.

Holon agents are kept in canonical form, with the members sorted by id
and every product tuple ordered the same way. Composition is then
associative and commutative, and the agent without members is its
neutral element.

References:

    * itertools.product
      https://docs.python.org/3/library/itertools.html#itertools.product

"""

import itertools
import logging
from dataclasses import dataclass, field as dc_field
from functools import reduce

from holosim.constants import STATE_SPACE_CAP
from holosim.utils import OverlappingMembers, StateSpaceTooLarge

__all__ = ['AbstractAgent', 'HolonAgent', 'ToyMAS', 'as_holon', 'neutral',
           'compose', 'compose_all', 'global_states', 'global_step',
           'collapse_system', 'verify_isomorphism']

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbstractAgent:
    """Finite agent: phi maps (state, perception) to (state, action)."""
    states: frozenset
    perceptions: frozenset
    actions: frozenset
    phi: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if not (self.states and self.perceptions and self.actions):
            raise ValueError('Agent sets must not be empty.')
        for state, perception in itertools.product(self.states,
                                                   self.perceptions):
            try:
                new_state, action = self.phi[(state, perception)]
            except KeyError:
                raise ValueError('phi is undefined for (%r, %r).' % (
                    state, perception)) from None
            if new_state not in self.states or action not in self.actions:
                raise ValueError('phi leaves the agent sets at (%r, %r).' % (
                    state, perception))


@dataclass(frozen=True)
class HolonAgent:
    """An AbstractAgent over product sets keyed by sorted member ids."""
    members: tuple
    agent: AbstractAgent


def as_holon(member, agent):
    """Wrap a single agent as a holon agent with one member."""
    return HolonAgent((member,), AbstractAgent(
        states=frozenset((state,) for state in agent.states),
        perceptions=frozenset((item,) for item in agent.perceptions),
        actions=frozenset((action,) for action in agent.actions),
        phi={((state,), (perception,)): ((new_state,), (action,))
             for (state, perception), (new_state, action)
             in agent.phi.items()}))


def neutral():
    """The holon agent without members, which does nothing."""
    return HolonAgent((), AbstractAgent(
        frozenset([()]), frozenset([()]), frozenset([()]),
        {((), ()): ((), ())}))


def _merge(order, first, second, members1):
    """Interleave two component tuples into canonical member order."""
    components = dict(zip(members1, first))
    components.update(zip((member for member in order
                           if member not in components), second))
    return tuple(components[member] for member in order)


def compose(first, second):
    """Compose two holon agents into one.

    :first: HolonAgent
    :second: HolonAgent, sharing no member with first
    :returns: HolonAgent over the members of both

    """
    overlap = set(first.members) & set(second.members)
    if overlap:
        raise OverlappingMembers(overlap)
    order = tuple(sorted(first.members + second.members))
    rest = tuple(member for member in order if member not in first.members)
    if rest != second.members:
        # Members of second are always sorted, so rest must follow them.
        raise ValueError('Holon agent members are not in canonical order.')

    def merge(one, two):
        return _merge(order, one, two, first.members)

    agent1, agent2 = first.agent, second.agent
    phi = {}
    for (s1, p1), (n1, a1) in agent1.phi.items():
        for (s2, p2), (n2, a2) in agent2.phi.items():
            phi[(merge(s1, s2), merge(p1, p2))] = (merge(n1, n2),
                                                   merge(a1, a2))
    return HolonAgent(order, AbstractAgent(
        states=frozenset(merge(one, two) for one, two in itertools.product(
            agent1.states, agent2.states)),
        perceptions=frozenset(merge(one, two) for one, two in
                              itertools.product(agent1.perceptions,
                                                agent2.perceptions)),
        actions=frozenset(merge(one, two) for one, two in itertools.product(
            agent1.actions, agent2.actions)),
        phi=phi))


def compose_all(holons):
    """Compose any number of holon agents, neutral for none."""
    return reduce(compose, holons, neutral())


@dataclass(frozen=True)
class ToyMAS:
    """
    Finite multiagent system: agents, environment states, the perception
    function (environment state -> one perception per agent) and the
    environment transition ((state, action tuple) -> state).
    """
    agents: tuple
    env_states: frozenset
    perceive: dict
    delta: dict

    def __post_init__(self):
        for env in self.env_states:
            perceptions = self.perceive.get(env)
            if perceptions is None or len(perceptions) != len(self.agents):
                raise ValueError('perceive is undefined for %r.' % (env,))
        for key in itertools.product(
                self.env_states,
                itertools.product(*(agent.actions for agent in self.agents))):
            if self.delta.get(key) not in self.env_states:
                raise ValueError('delta is undefined for %r.' % (key,))

    def size(self):
        """Number of global states."""
        size = len(self.env_states)
        for agent in self.agents:
            size *= len(agent.states)
        return size


def _check_size(mas):
    """Raise StateSpaceTooLarge above the enumeration cap."""
    if mas.size() > STATE_SPACE_CAP:
        raise StateSpaceTooLarge(mas.size(), STATE_SPACE_CAP)


def global_states(mas):
    """Iterate over every (env, state_1, ..., state_n) of mas."""
    _check_size(mas)
    pools = [sorted(mas.env_states, key=repr)]
    pools.extend(sorted(agent.states, key=repr) for agent in mas.agents)
    return itertools.product(*pools)


def global_step(mas, state):
    """Apply the global state change to (env, state_1, ..., state_n)."""
    env, *agent_states = state
    perceptions = mas.perceive[env]
    new_states, actions = [], []
    for agent, own, perception in zip(mas.agents, agent_states, perceptions):
        new_state, action = agent.phi[(own, perception)]
        new_states.append(new_state)
        actions.append(action)
    return (mas.delta[(env, tuple(actions))],) + tuple(new_states)


def collapse_system(mas, subset):
    """Replace the agents at the indices in subset by one holon agent.

    The holon agent takes the position of the smallest index. A subset of
    at most one agent leaves mas unchanged.

    :mas: ToyMAS
    :subset: Iterable of agent indices (from 0)
    :returns: (collapsed ToyMAS, dict mapping global states of mas to
              those of the collapsed system)

    """
    _check_size(mas)
    indices = sorted(set(subset))
    if len(indices) <= 1:
        return mas, {state: state for state in global_states(mas)}

    holon = compose_all(as_holon(index, mas.agents[index])
                        for index in indices)
    position = indices[0]
    kept = [index for index in range(len(mas.agents))
            if index not in indices[1:]]

    def collapse(values):
        return tuple(tuple(values[member] for member in indices)
                     if index == position else values[index]
                     for index in kept)

    agents = tuple(holon.agent if index == position else mas.agents[index]
                   for index in kept)
    perceive = {env: collapse(perceptions)
                for env, perceptions in mas.perceive.items()}
    delta = {(env, collapse(actions)): result
             for (env, actions), result in mas.delta.items()}
    collapsed = ToyMAS(agents, mas.env_states, perceive, delta)
    psi = {state: (state[0],) + collapse(state[1:])
           for state in global_states(mas)}
    LOGGER.debug('Collapsed agents %s into one, %d global states',
                 indices, len(psi))
    return collapsed, psi


def verify_isomorphism(mas, collapsed, psi):
    """Check that psi commutes with the global state changes.

    :mas: ToyMAS
    :collapsed: ToyMAS
    :psi: dict from global states of mas to those of collapsed
    :returns: (True, None), or (False, first global state of mas where
              the two systems disagree)

    """
    _check_size(mas)
    _check_size(collapsed)
    if len(set(psi.values())) != len(psi) or len(psi) != collapsed.size():
        raise ValueError('psi is not a bijection between the global states.')
    for state in global_states(mas):
        if global_step(collapsed, psi[state]) != psi[global_step(mas, state)]:
            LOGGER.info('Isomorphism fails at %r', state)
            return False, state
    return True, None
