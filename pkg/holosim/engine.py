"""
Discrete-time scheduler of the peer-to-peer fusion system.

Each tick runs in a fixed order: messages due at the tick are delivered
by message id, expired query rounds fire their timeouts by agent id, and
then every agent (by id) takes its decisions: mode switch, scheduled
queries and CHECK IN, and the queries waiting in its inbox. Every action
is appended to the event trace, from which the BEST and
REMAINING-MESSAGES tables are projected.

A query round is the set of queries an agent sends about one field. It
resolves when every recipient has answered or declined visibly, when Ω
holds enough responses, or at its deadline.

References:

    * numpy SeedSequence / SFC64 streams
      https://numpy.org/doc/stable/reference/random/parallel.html
    * JSON Lines https://jsonlines.org/

"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field, replace

import numpy as np
from numpy.random import SFC64, Generator, SeedSequence

from holosim.behavior import (AnswerDecision, check_mode_switch,
                              decide_answer, decide_query, favorite_tier,
                              fuse_responses, handle_checkin, record_outcome,
                              select_recipients)
from holosim.constants import (CHECKIN_VERDICTS, DECLINE_REASONS, EVENT_KINDS,
                               MODES, PHASES)
from holosim.model import (AgentProfile, AgentState, Message, Scripted,
                           WHOLE_MESSAGE, dependency_depth, validate_schema)
from holosim.utils import (DuplicatePeer, HorizonExceeded, InvalidScenario,
                           NoEligiblePeers, OMEGA, ParseError, SELF,
                           ScriptExhausted)

__all__ = ['Event', 'EventTrace', 'Round', 'WorldState', 'TableSnapshot',
           'Knowledge', 'init_world', 'draw_delay', 'step', 'run',
           'project_tables', 'knowledge_at', 'peers_of',
           'trace_to_jsonl', 'trace_from_jsonl', 'run_sweep',
           'sweep_seeds']

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Event:
    """One trace record."""
    tick: int
    kind: str
    agents: tuple
    field: str = None
    message: int = None
    detail: dict = dc_field(default_factory=dict)

    def to_record(self):
        """Return the event as a dict with the serialized key order."""
        return {'tick': self.tick, 'kind': self.kind,
                'agents': list(self.agents), 'field': self.field,
                'message': self.message,
                'detail': dict(sorted(self.detail.items()))}


@dataclass
class EventTrace:
    """
    Append-only event log with the run header: horizon, roster
    (agent -> budget, None for unlimited) and the initial peer ids.
    """
    horizon: int = 0
    roster: dict = dc_field(default_factory=dict)
    peers: tuple = ()
    events: list = dc_field(default_factory=list)

    def append(self, event):
        """Append an event, ticks never decrease."""
        if event.kind not in EVENT_KINDS:
            raise ValueError('Invalid event kind "%s".' % event.kind)
        if self.events and event.tick < self.events[-1].tick:
            raise ValueError('Event at tick %s after tick %s.' % (
                event.tick, self.events[-1].tick))
        self.events.append(event)

    def until(self, tick):
        """Events up to and including tick."""
        return [event for event in self.events if event.tick <= tick]

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


@dataclass
class Round:
    """Queries one agent has sent about one field, awaiting the answers."""
    id: int
    owner: str
    field: str
    opened_at: int
    deadline: int
    recipients: list = dc_field(default_factory=list)
    responses: dict = dc_field(default_factory=dict)
    declined: set = dc_field(default_factory=set)
    omega: bool = False
    resolved: bool = False
    waiting: list = dc_field(default_factory=list)

    def awaited(self):
        """Recipients that neither answered nor declined visibly."""
        return [agent for agent in self.recipients
                if agent not in self.responses and agent not in self.declined]


@dataclass
class WorldState:
    """Everything a run needs between two ticks."""
    clock: int
    agents: dict
    schema: object
    trace: EventTrace
    rng: Generator
    in_flight: list = dc_field(default_factory=list)
    rounds: dict = dc_field(default_factory=dict)
    messages: dict = dc_field(default_factory=dict)
    query_round: dict = dc_field(default_factory=dict)
    ordinals: dict = dc_field(default_factory=dict)
    injections: dict = dc_field(default_factory=dict)
    arrivals: dict = dc_field(default_factory=dict)
    forced_declines: set = dc_field(default_factory=set)
    checkin_verdicts: dict = dc_field(default_factory=dict)
    hints: dict = dc_field(default_factory=dict)
    max_depth: int = 0
    next_id: int = 1


@dataclass(frozen=True)
class TableSnapshot:
    """BEST-0, every BEST table and REMAINING-MESSAGES at one tick."""
    best_0: dict
    best: dict
    remaining: dict


@dataclass
class Knowledge:
    """What one agent knows at a tick, rebuilt from a trace."""
    counts: dict = dc_field(default_factory=dict)
    timeout_counts: dict = dc_field(default_factory=dict)
    peers: set = dc_field(default_factory=set)

    def field_counts(self, fld):
        """Counts of one field as agent -> count."""
        return {agent: value for (name, agent), value in self.counts.items()
                if name == fld}

    def unresponsive(self):
        """Peers seen to time out since their last in-time answer."""
        return {peer for peer, count in self.timeout_counts.items()
                if count > 0}


def _new_rng(seed):
    """Return the generator of a run."""
    return Generator(SFC64(SeedSequence(seed)))


def init_world(cfg, scenario):
    """Build the world at clock 0.

    :cfg: SimConfig
    :scenario: Scenario with schema, profiles, budgets, omega_queries,
               queries and arrivals
    :returns: WorldState

    """
    schema = validate_schema(scenario.schema)
    profiles = {profile.agent: profile for profile in scenario.profiles}
    if len(profiles) != len(scenario.profiles):
        raise InvalidScenario('duplicate agent profiles')
    newcomers = {agent for _, agent in scenario.arrivals}
    if not newcomers <= set(profiles) - {OMEGA}:
        raise InvalidScenario('arrivals must name profiled peers')
    peers = sorted(set(profiles) - {OMEGA} - newcomers)

    agents = {}
    for agent_id in sorted(set(profiles) | {OMEGA}):
        profile = profiles.get(agent_id, AgentProfile(agent_id, {}))
        if agent_id == OMEGA:
            budget = scenario.budgets.get(OMEGA)
        else:
            budget = scenario.budgets.get(agent_id, cfg.budget)
        known = set() if agent_id in newcomers else set(peers) - {agent_id}
        agents[agent_id] = AgentState(
            id=agent_id, profile=profile,
            remaining_messages=budget or 0, budget=budget, peers=known)

    injections = {}
    for tick, fld in scenario.omega_queries:
        injections.setdefault((tick, OMEGA), []).append((fld, None))
    for tick, sender, fld, recipients in scenario.queries:
        if sender not in agents:
            raise InvalidScenario('query from unknown agent "%s"' % sender)
        injections.setdefault((tick, sender), []).append(
            (fld, tuple(recipients) or None))
    arrivals = {}
    for tick, agent_id in scenario.arrivals:
        arrivals.setdefault(tick, []).append(agent_id)

    trace = EventTrace(
        horizon=cfg.horizon,
        roster={agent_id: agents[agent_id].budget
                for agent_id in sorted(agents)},
        peers=tuple(peers))
    LOGGER.info('World initialised: %d peers, seed %s, horizon %s',
                len(peers), cfg.seed, cfg.horizon)
    return WorldState(clock=0, agents=agents, schema=schema, trace=trace,
                      rng=_new_rng(cfg.seed), injections=injections,
                      arrivals=arrivals, max_depth=dependency_depth(schema))


def draw_delay(rng, dist, key=None):
    """Return the delivery delay of a message in ticks.

    :rng: numpy.random.Generator, used by UniformInt only
    :dist: UniformInt or Scripted
    :key: (sender, ordinal) of the message, used by Scripted only
    :returns: Delay as int

    """
    if isinstance(dist, Scripted):
        try:
            return dist.schedule[key]
        except KeyError:
            raise ScriptExhausted(*key) from None
    return int(rng.integers(dist.lo, dist.hi, endpoint=True))


def _log(world, event_kind, agents, fld=None, message=None, **detail):
    """Append an event stamped with the current clock."""
    event = Event(world.clock, event_kind, tuple(agents), fld, message, detail)
    world.trace.append(event)
    LOGGER.debug('t=%s %s %s %s %s %s', world.clock, event_kind,
                 ','.join(agents), fld or '-', message or '-', detail)


# pylint: disable=too-many-arguments
def _send(world, cfg, kind, fld, sender, recipient, parent=None,
          payload_error=None, cost=1, **detail):
    """Create a message, schedule its delivery and charge the sender."""
    agent = world.agents[sender]
    message = Message(world.next_id, kind, fld, sender, recipient, parent,
                      world.clock, payload_error)
    world.next_id += 1
    ordinal = world.ordinals.get(sender, 0) + 1
    world.ordinals[sender] = ordinal
    delay = draw_delay(world.rng, cfg.delay_dist, (sender, ordinal))
    if isinstance(cfg.delay_dist, Scripted) and (
            (sender, ordinal) in cfg.delay_dist.declines):
        world.forced_declines.add(message.id)
    if cost and not agent.unlimited:
        agent.remaining_messages -= cost
    world.messages[message.id] = message
    world.in_flight.append((message, world.clock + delay))
    _log(world, 'Send', (sender, recipient), fld, message.id, kind=kind,
         cost=cost, delay=delay, **detail)
    return message


def _open_round_on(agent, fld):
    """The unresolved round of agent on fld, if any."""
    for rnd in agent.pending_out.values():
        if rnd.field == fld and not rnd.omega:
            return rnd
    return None


def _parent_chain(world, query_id):
    """Senders of a query and of every query it forwards."""
    chain = set()
    message = world.messages.get(query_id)
    while message is not None:
        chain.add(message.sender)
        message = world.messages.get(message.parent)
    return chain


def _forward_level(world, query_id):
    """Number of forwarded queries above and including query_id."""
    level = 0
    message = world.messages.get(query_id)
    while message is not None and message.parent is not None:
        level += 1
        message = world.messages.get(message.parent)
    return level


def _send_queries(world, cfg, agent, rnd, recipients, parent):
    """Send one query of rnd to each recipient."""
    detail = {}
    if parent is not None:
        detail['level'] = _forward_level(world, parent) + 1
    for recipient in recipients:
        message = _send(world, cfg, 'Query', rnd.field, agent.id, recipient,
                        parent=parent, **detail)
        world.query_round[message.id] = rnd.id
        rnd.recipients.append(recipient)


# pylint: disable=too-many-arguments
def _open_round(world, cfg, agent, fld, recipients=None, parent_query=None,
                reserve=0):
    """Open a query round, or join the open round of a peer on fld.

    Explicit recipients missing from an open round are added to it.
    Recipients are cut to what the agent can pay for, keeping reserve
    messages aside.
    """
    if agent.id != OMEGA:
        existing = _open_round_on(agent, fld)
        if existing is not None:
            extra = [peer for peer in recipients or ()
                     if peer not in existing.recipients]
            if not agent.unlimited:
                extra = extra[:max(agent.remaining_messages - reserve, 0)]
            _send_queries(world, cfg, agent, existing, extra, parent_query)
            return existing

    if recipients is None:
        chain = _parent_chain(world, parent_query)
        try:
            recipients = select_recipients(agent, fld, agent.peers, chain,
                                           cfg.C)
        except NoEligiblePeers as exception:
            LOGGER.debug('%s', exception)
            return None
    recipients = list(recipients)
    if not agent.unlimited:
        recipients = recipients[:max(agent.remaining_messages - reserve, 0)]
    if not recipients:
        return None

    rnd = Round(id=world.next_id, owner=agent.id, field=fld,
                opened_at=world.clock,
                deadline=world.clock + cfg.timeout_ticks,
                omega=agent.id == OMEGA)
    world.rounds[rnd.id] = rnd
    agent.pending_out[rnd.id] = rnd
    _send_queries(world, cfg, agent, rnd, recipients, parent_query)
    return rnd


def _maybe_resolve(world, cfg, rnd):
    """Resolve rnd if nothing more is expected from it."""
    if rnd.resolved:
        return
    enough = rnd.omega and len(rnd.responses) >= min(
        cfg.omega_min_responses, len(rnd.recipients))
    if enough or not rnd.awaited():
        _resolve(world, cfg, rnd)


def _resolve(world, cfg, rnd):
    """Fuse the responses of rnd and answer the queries waiting on it."""
    rnd.resolved = True
    owner = world.agents[rnd.owner]
    owner.pending_out.pop(rnd.id, None)
    winner, error = fuse_responses(owner.error(rnd.field),
                                   sorted(rnd.responses.items()))
    winner_id = owner.id if winner == SELF else winner
    _log(world, 'FusionResolved', (owner.id, winner_id), rnd.field, rnd.id,
         error=error, responses=len(rnd.responses))
    owner.best = record_outcome(owner.best, rnd.field, winner, owner.id)
    owner.phase = PHASES[1]
    _log(world, 'TableUpdate', (owner.id, winner_id), rnd.field, rnd.id,
         count=owner.best.count(rnd.field, winner_id))
    _hint(world, cfg, owner, rnd.field)

    for query_id in rnd.waiting:
        pending = owner.deferred.get(query_id)
        if pending is None:
            continue
        pending.discard(rnd.id)
        if not pending:
            _answer(world, cfg, owner, world.messages[query_id])


def _hint(world, cfg, agent, fld):
    """Log a HolonHint when the favorites of agent for fld change."""
    favorites = tuple(favorite_tier(
        agent.best.field_counts(fld), agent.peers, agent.unresponsive(),
        cfg.K, cfg.C))
    key = (agent.id, fld)
    if favorites and favorites != world.hints.get(key):
        _log(world, 'HolonHint', (agent.id,) + favorites, fld)
    world.hints[key] = favorites


def _deliver(world, cfg, message):
    """Hand a due message to its recipient."""
    agent = world.agents[message.recipient]
    agents = (message.sender, message.recipient)
    if message.kind == 'Response':
        rnd = world.rounds[world.query_round[message.parent]]
        _log(world, 'Deliver', agents, message.field, message.id,
             kind=message.kind, late=rnd.resolved)
        if rnd.resolved:
            LOGGER.debug('Late response %s to round %s ignored',
                         message.id, rnd.id)
            return
        rnd.responses[message.sender] = message.payload_error
        if agent.timeout_counts.get(message.sender):
            agent.timeout_counts[message.sender] = 0
        _maybe_resolve(world, cfg, rnd)
    elif message.kind == 'CheckInReply':
        verdict = world.checkin_verdicts[message.id]
        _log(world, 'Deliver', agents, message.field, message.id,
             kind=message.kind, late=False, verdict=verdict)
        if verdict == CHECKIN_VERDICTS[0]:
            agent.peers.add(message.sender)
            world.agents[OMEGA].peers.add(agent.id)
    else:
        _log(world, 'Deliver', agents, message.field, message.id,
             kind=message.kind, late=False)
        agent.pending_in.append(message)


def _expire(world, cfg, agent):
    """Fire the timeouts of the rounds of agent whose deadline is due."""
    for rnd in sorted(agent.pending_out.values(), key=lambda item: item.id):
        if rnd.deadline > world.clock:
            continue
        for peer in rnd.awaited():
            agent.timeout_counts[peer] = agent.timeout_counts.get(peer, 0) + 1
            _log(world, 'Timeout', (agent.id, peer), rnd.field, rnd.id,
                 count=agent.timeout_counts[peer])
        _resolve(world, cfg, rnd)


def _answer(world, cfg, agent, query):
    """Send the response to query, if agent still has a message."""
    if query in agent.pending_in:
        agent.pending_in.remove(query)
    agent.deferred.pop(query.id, None)
    if not agent.can_send():
        _log(world, 'Decline', (agent.id, query.sender), query.field,
             query.id, reason=DECLINE_REASONS['DeclineNoBudget'])
        return
    error = agent.error(query.field)
    querier_error = world.agents[query.sender].error(query.field)
    _send(world, cfg, 'Response', query.field, agent.id, query.sender,
          parent=query.id, payload_error=error, error=error,
          querier_error=querier_error)


def _forward(world, cfg, agent, query):
    """Open the sub-rounds agent wants before answering query.

    :returns: Ids of the rounds the answer waits on

    """
    schema = world.schema
    waiting = set()
    if _forward_level(world, query.id) >= world.max_depth:
        return waiting
    for fld in schema.deps_of(query.field):
        if not schema.deps.get(fld) or fld not in agent.profile.errors:
            continue
        existing = _open_round_on(agent, fld)
        if existing is None:
            if agent.mode == MODES[1] and not favorite_tier(
                    agent.best.field_counts(fld), agent.peers,
                    agent.unresponsive(), cfg.K, cfg.C):
                continue
            if not decide_query(agent, fld, world.rng):
                continue
            existing = _open_round(world, cfg, agent, fld,
                                   parent_query=query.id, reserve=1)
            if existing is None:
                continue
        existing.waiting.append(query.id)
        waiting.add(existing.id)
    return waiting


def _handle_query(world, cfg, agent, query):
    """Decide on a query waiting in the inbox of agent."""
    querier_error = world.agents[query.sender].error(query.field)
    scripted = query.id in world.forced_declines and agent.can_send()
    if scripted:
        decision = AnswerDecision('DeclineLowerQuality')
    else:
        decision = decide_answer(agent, query, querier_error, world.clock,
                                 cfg, world.rng)

    if not decision.answers:
        agent.pending_in.remove(query)
        _log(world, 'Decline', (agent.id, query.sender), query.field,
             query.id, reason=DECLINE_REASONS[decision.verdict],
             scripted=scripted)
        if decision.verdict == 'DeclineLowerQuality':
            rnd = world.rounds[world.query_round[query.id]]
            rnd.declined.add(agent.id)
            _maybe_resolve(world, cfg, rnd)
        return

    if cfg.forwarding:
        waiting = _forward(world, cfg, agent, query)
        if waiting:
            agent.deferred[query.id] = waiting
            return
    _answer(world, cfg, agent, query)


def _reply_checkin(world, cfg, agent, message):
    """Answer a CHECK IN request, free of charge."""
    agent.pending_in.remove(message)
    try:
        verdict = handle_checkin(agent, message.sender, cfg)
    except DuplicatePeer as exception:
        LOGGER.debug('%s', exception)
        verdict = CHECKIN_VERDICTS[1]
    if verdict == CHECKIN_VERDICTS[0]:
        agent.peers.add(message.sender)
    reply = _send(world, cfg, 'CheckInReply', message.field, agent.id,
                  message.sender, parent=message.id, cost=0, verdict=verdict)
    world.checkin_verdicts[reply.id] = verdict


def _check_in(world, cfg, newcomer):
    """Send CHECK IN requests to every member of the network."""
    for peer in sorted(world.agents[OMEGA].peers - {newcomer.id}):
        if not newcomer.can_send():
            break
        _send(world, cfg, 'CheckIn', WHOLE_MESSAGE, newcomer.id, peer)


def _decide(world, cfg, agent):
    """Run the decision phase of one agent."""
    updated = check_mode_switch(agent, cfg)
    if updated.mode != agent.mode:
        agent.mode = updated.mode
        _log(world, 'ModeSwitch', (agent.id,), mode=agent.mode)

    if agent.id in world.arrivals.get(world.clock, ()):
        _check_in(world, cfg, agent)
    for fld, recipients in world.injections.get((world.clock, agent.id), ()):
        _open_round(world, cfg, agent, fld, recipients)

    inbox = sorted((message for message in agent.pending_in
                    if message.id not in agent.deferred),
                   key=lambda message: message.id)
    for message in inbox:
        if message.kind == 'CheckIn':
            _reply_checkin(world, cfg, agent, message)
        else:
            _handle_query(world, cfg, agent, message)


def step(world, cfg):
    """Advance world by one tick.

    :world: WorldState, modified in place
    :cfg: SimConfig
    :returns: The same WorldState

    """
    if world.clock >= cfg.horizon:
        raise HorizonExceeded(world.clock, cfg.horizon)
    world.clock += 1

    due = [item for item in world.in_flight if item[1] <= world.clock]
    world.in_flight = [item for item in world.in_flight
                       if item[1] > world.clock]
    for message, _ in sorted(due, key=lambda item: item[0].id):
        _deliver(world, cfg, message)
    for agent_id in sorted(world.agents):
        _expire(world, cfg, world.agents[agent_id])
    for agent_id in sorted(world.agents):
        _decide(world, cfg, world.agents[agent_id])
    return world


def run(cfg, scenario):
    """Run a scenario until the horizon and return its EventTrace."""
    world = init_world(cfg, scenario)
    while world.clock < cfg.horizon:
        step(world, cfg)
    LOGGER.info('Run finished at tick %s with %d events', world.clock,
                len(world.trace))
    return world.trace


def knowledge_at(trace, tick):
    """Rebuild the BEST counts, timeout counts and peer sets of every
    agent at the end of tick from the trace.

    :trace: EventTrace
    :tick: Tick
    :returns: dict of agent id -> Knowledge

    """
    knowledge = {agent: Knowledge() for agent in trace.roster}
    for agent, known in knowledge.items():
        if agent == OMEGA or agent in trace.peers:
            known.peers = set(trace.peers) - {agent}
    for event in trace.until(tick):
        kind = event.kind
        if kind == 'TableUpdate':
            owner, winner = event.agents
            knowledge[owner].counts[(event.field, winner)] = \
                event.detail['count']
        elif kind == 'Timeout':
            owner, peer = event.agents
            counts = knowledge[owner].timeout_counts
            counts[peer] = counts.get(peer, 0) + 1
        elif kind == 'Deliver' and event.detail.get('kind') == 'Response':
            sender, owner = event.agents
            counts = knowledge[owner].timeout_counts
            if not event.detail.get('late') and counts.get(sender):
                counts[sender] = 0
        elif (kind in ('Send', 'Deliver') and
              event.detail.get('verdict') == CHECKIN_VERDICTS[0]):
            sender, recipient = event.agents
            if kind == 'Send':
                knowledge[sender].peers.add(recipient)
            else:
                knowledge[recipient].peers.add(sender)
                knowledge[OMEGA].peers.add(recipient)
    return knowledge


def peers_of(trace, tick):
    """Members of the network at the end of tick, as seen by Ω."""
    return sorted(knowledge_at(trace, tick)[OMEGA].peers)


def project_tables(trace, tick):
    """Reconstruct BEST-0, the BEST tables and REMAINING-MESSAGES at the
    end of tick.

    :trace: EventTrace
    :tick: Tick, 0 gives the initial tables
    :returns: TableSnapshot

    """
    peers = sorted(agent for agent in trace.roster if agent != OMEGA)
    best = {agent: {} for agent in trace.roster}
    remaining = {agent: trace.roster[agent] for agent in peers
                 if trace.roster[agent] is not None}
    for event in trace.until(tick):
        if event.kind == 'TableUpdate':
            owner, winner = event.agents
            best[owner][(event.field, winner)] = event.detail['count']
        elif event.kind == 'Send' and event.agents[0] in remaining:
            remaining[event.agents[0]] -= event.detail.get('cost', 1)
    omega_table = best.get(OMEGA, {})
    best_0 = {agent: omega_table.get((WHOLE_MESSAGE, agent), 0)
              for agent in peers}
    return TableSnapshot(best_0=best_0, best=best, remaining=remaining)


def trace_to_jsonl(trace):
    """Serialize a trace: a header line followed by one event per line."""
    header = {'horizon': trace.horizon, 'roster': trace.roster,
              'peers': list(trace.peers)}
    lines = [json.dumps(header, ensure_ascii=False)]
    lines.extend(json.dumps(event.to_record(), ensure_ascii=False)
                 for event in trace)
    return '\n'.join(lines) + '\n'


def trace_from_jsonl(text):
    """Parse the output of trace_to_jsonl back into an EventTrace."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        return EventTrace()
    try:
        header = json.loads(lines[0])
        trace = EventTrace(horizon=header['horizon'],
                           roster=dict(header['roster']),
                           peers=tuple(header['peers']))
    except (ValueError, KeyError, TypeError) as exception:
        raise ParseError(1, 'invalid trace header (%s)' % exception) \
            from exception
    for number, line in enumerate(lines[1:], start=2):
        try:
            record = json.loads(line)
            trace.append(Event(record['tick'], record['kind'],
                               tuple(record['agents']), record['field'],
                               record['message'], record['detail']))
        except (ValueError, KeyError, TypeError) as exception:
            raise ParseError(number, 'invalid event (%s)' % exception) \
                from exception
    return trace


def sweep_seeds(master_seed, runs):
    """Per-run seeds derived from master_seed by run index."""
    return [int(SeedSequence(master_seed, spawn_key=(index,))
                .generate_state(1, np.uint64)[0])
            for index in range(runs)]


def run_sweep(cfg, scenario, runs, master_seed, workers=1):
    """Run a scenario under runs derived seeds.

    The result does not depend on workers.

    :returns: List of (seed, EventTrace) in run index order

    """
    configs = [replace(cfg, seed=seed)
               for seed in sweep_seeds(master_seed, runs)]
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        traces = list(pool.map(lambda config: run(config, scenario),
                               configs))
    return [(config.seed, trace) for config, trace in zip(configs, traces)]
