"""
Decision rules of a single agent: whether to query a field, whom to
query, whether to answer a query, how to fuse the answers, when to switch
to the economy mode and whether to recognise a newcomer.

All functions are pure: they read agent state and return a decision or a
new value, the engine applies it.

References:

    * Simulated annealing acceptance,
      https://en.wikipedia.org/wiki/Simulated_annealing
    * numpy.random.Generator
      https://numpy.org/doc/stable/reference/random/generator.html

"""

import logging
import math
from dataclasses import dataclass, replace

from holosim.constants import CHECKIN_VERDICTS, MODES, VERDICTS
from holosim.model import BestTable
from holosim.utils import DuplicatePeer, NoEligiblePeers, SELF

__all__ = ['AnswerDecision', 'decide_query', 'select_recipients',
           'favorite_tier', 'decide_answer', 'annealing_probability',
           'fuse_responses', 'record_outcome', 'check_mode_switch',
           'handle_checkin']

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnswerDecision:
    """Outcome of decide_answer. Answer carries the responder's error."""
    verdict: str
    error: float = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError('Invalid verdict "%s".' % self.verdict)

    @property
    def answers(self):
        """True if the responder sends a Response."""
        return self.verdict == 'Answer'


def decide_query(agent, field, rng):
    """Decide whether agent asks its peers about field.

    The probability is 1 - quality, which is the agent's own prediction
    error for the field. Exactly one value is drawn from rng.

    :agent: AgentState
    :field: Compound field id
    :rng: numpy.random.Generator
    :returns: True if the agent queries

    """
    error = agent.error(field)
    return bool(rng.random() < error)


def select_recipients(agent, field, peers, parent_chain=(),
                      min_interactions=1):
    """Return the peers agent should query about field.

    Before agent has favorites for the field (or while every peer count is
    zero) the query is broadcast to all peers except agent and the agents
    of the parent chain. Afterwards only the peers sharing the highest
    count are queried. Peers the agent has seen time out are skipped in
    favor of the next count tier; when nobody is left the query is
    broadcast again.

    :agent: AgentState of the querier
    :field: Field id
    :peers: Known peer ids
    :parent_chain: Agents that originated the query being forwarded
    :min_interactions: Resolved fusions needed before favorites are used
    :returns: Recipient ids as a sorted list

    """
    candidates = sorted(peer for peer in peers
                        if peer != agent.id and peer not in parent_chain)
    if not candidates:
        raise NoEligiblePeers(agent.id, field)

    counts = agent.best.field_counts(field)
    peer_max = max([value for peer, value in counts.items()
                    if peer != agent.id] or [0])
    if sum(counts.values()) < min_interactions or peer_max == 0:
        return candidates

    unresponsive = agent.unresponsive()
    available = [peer for peer in candidates if peer not in unresponsive]
    if not available:
        LOGGER.debug('%s: every favorite for %s is unresponsive, '
                     'broadcasting', agent.id, field)
        return candidates
    top = max(counts.get(peer, 0) for peer in available)
    return [peer for peer in available if counts.get(peer, 0) == top]


def favorite_tier(counts, candidates, unresponsive=(), k=1,
                  min_interactions=1):
    """Return the favorites of an agent for one field.

    Whole count tiers are taken in descending order while their total size
    stays within k. Ties are never split: a top tier wider than k means the
    agent has no favorites. The zero-count tier only counts as favorites
    when no available peer has a positive count, i.e. the agent has
    experience with the field but its winners stopped answering.

    :counts: agent -> count for the field, may include the owner itself
    :candidates: Peer ids the agent may choose from
    :unresponsive: Peers the agent has seen time out
    :k: Number of favorites
    :min_interactions: Resolved fusions needed before favorites exist
    :returns: Sorted list of favorites, possibly empty

    """
    if sum(counts.values()) < min_interactions:
        return []
    available = sorted(peer for peer in candidates
                       if peer not in unresponsive)
    levels = sorted({counts.get(peer, 0) for peer in available
                     if counts.get(peer, 0) > 0}, reverse=True)
    chosen = []
    for level in levels:
        tier = [peer for peer in available if counts.get(peer, 0) == level]
        if len(chosen) + len(tier) > k:
            break
        chosen.extend(tier)
    if not levels and 0 < len(available) <= k:
        chosen = available
    return chosen


def annealing_probability(t, cfg):
    """Probability p0 * exp(-t / tau) of answering without an advantage."""
    if cfg.anneal_p0 == 0:
        return 0.0
    return cfg.anneal_p0 * math.exp(-t / cfg.tau)


# pylint: disable=too-many-arguments
def decide_answer(responder, query, querier_error, t, cfg, rng):
    """Decide how responder reacts to a query.

    An agent without messages declines silently. Below the lottery
    threshold it draws lots and may stay silent. Otherwise it answers only
    with a strictly lower error than the querier, except for the annealing
    chance of answering anyway.

    :responder: AgentState receiving the query
    :query: Query Message
    :querier_error: Error of the querier for the queried field
    :t: Current tick
    :cfg: SimConfig
    :rng: numpy.random.Generator
    :returns: AnswerDecision

    """
    if not responder.can_send():
        return AnswerDecision('DeclineNoBudget')
    if not responder.unlimited and (
            responder.remaining_messages <
            cfg.lottery_threshold_pct * responder.budget):
        if rng.random() < cfg.lottery_p:
            return AnswerDecision('DeclineLottery')

    error = responder.error(query.field)
    if error < querier_error:
        return AnswerDecision('Answer', error)
    probability = annealing_probability(t, cfg)
    if probability > 0 and rng.random() < probability:
        LOGGER.debug('%s answers %s by annealing (p=%.4f)', responder.id,
                     query.id, probability)
        return AnswerDecision('Answer', error)
    return AnswerDecision('DeclineLowerQuality')


def fuse_responses(own_error, responses):
    """Pick the response with the least error.

    Own knowledge wins ties, remaining ties go to the lowest agent id.

    :own_error: Error of the fusing agent for the field
    :responses: List of (agent id, error) tuples
    :returns: (winner, error) where winner is an agent id or SELF

    """
    ranked = [(own_error, 0, SELF)]
    ranked.extend((error, 1, agent) for agent, error in responses)
    error, _, winner = min(ranked)
    return winner, error


def record_outcome(best, field, winner, owner):
    """Return a copy of best with the winner's cell incremented.

    :best: BestTable
    :field: Field id of the resolved fusion
    :winner: Agent id or SELF, which counts for owner
    :owner: Id of the table owner
    :returns: BestTable

    """
    agent = owner if winner == SELF else winner
    counts = dict(best.counts)
    counts[(field, agent)] = counts.get((field, agent), 0) + 1
    return BestTable(best.owner, counts)


def check_mode_switch(agent, cfg):
    """Return agent in the Intelligent mode once it has seen enough
    timeouts. The Intelligent mode is never left.
    """
    if agent.mode == MODES[1]:
        return agent
    if sum(agent.timeout_counts.values()) >= cfg.timeout_switch_threshold:
        return replace(agent, mode=MODES[1])
    return agent


def handle_checkin(agent, newcomer, cfg):
    """Return "Accept" if agent has at least checkin_threshold messages
    left, otherwise "Reject".
    """
    if newcomer in agent.peers:
        raise DuplicatePeer(agent.id, newcomer)
    if agent.unlimited or agent.remaining_messages >= cfg.checkin_threshold:
        return CHECKIN_VERDICTS[0]
    return CHECKIN_VERDICTS[1]
