"""
Detection of the holons that emerge in a run.

At every tick each agent's favorites are rebuilt from the trace into a
directed favorite graph. Holons are formed from the graph with three
rules applied until nothing changes:

    1. The external client Ω roots a holon. With a single favorite that
       favorite is the head, acting as the gate of the other reachable
       peers, which form the body.
    2. A member choosing a free agent as favorite absorbs it, in a
       sub-holon headed by that member unless the member is the head.
    3. A free agent choosing the heads of two holons merges them under
       itself.

A holon dissolves as soon as its head is no longer a favorite, which
happens when it runs out of messages or is seen to time out.

References:

    * networkx DiGraph https://networkx.org/documentation/stable/
    * lxml.etree https://lxml.de/tutorial.html

"""

import csv
import io
import logging
from dataclasses import dataclass, field as dc_field

import networkx as nx

from holosim.base import _element, _subelement
from holosim.behavior import favorite_tier
from holosim.engine import knowledge_at
from holosim.utils import HolonInactive, OMEGA

__all__ = ['Holon', 'favorite_graph', 'detect_holons', 'holon_timeline',
           'active_windows', 'head_exclusivity', 'holon_forest',
           'timeline_csv', 'holons_at']

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Holon:
    """A head with a body of agent ids and sub-holons."""
    head: str
    body: frozenset = frozenset()
    formed_at: int = 0
    client: str = dc_field(default=None, compare=False)

    def __post_init__(self):
        leaves = [self.head]
        for member in self.body:
            leaves.extend(member.leaves() if isinstance(member, Holon)
                          else [member])
        if len(leaves) != len(set(leaves)):
            raise ValueError('Holon %s repeats an agent.' % self.head)

    def leaves(self):
        """Return every agent id of the holon, head first."""
        result = [self.head]
        for member in sorted(self.body, key=_member_key):
            result.extend(member.leaves() if isinstance(member, Holon)
                          else [member])
        return result

    def members(self):
        """Agent ids directly in the body, sub-holons by their head."""
        return {member.head if isinstance(member, Holon) else member
                for member in self.body}


def _member_key(member):
    """Sort key of a body member."""
    return member.head if isinstance(member, Holon) else member


def favorite_graph(trace, tick, k=1, c=1):
    """Build the favorite graph at the end of tick.

    There is an edge a -> b when b is one of the favorites of a for some
    field. Edges carry the fields as attribute "fields". The graph
    attributes "peers" and "unresponsive" hold the peer set of Ω and the
    agents Ω has seen time out.

    :trace: EventTrace
    :tick: Tick
    :k: Number of favorites
    :c: Resolved fusions needed before favorites exist
    :returns: networkx.DiGraph

    """
    knowledge = knowledge_at(trace, tick)
    graph = nx.DiGraph(client=OMEGA,
                       peers=frozenset(knowledge[OMEGA].peers),
                       unresponsive=frozenset(
                           knowledge[OMEGA].unresponsive()))
    graph.add_nodes_from(sorted(knowledge))
    for agent in sorted(knowledge):
        known = knowledge[agent]
        candidates = known.peers - {agent, OMEGA}
        for fld in sorted({name for name, _ in known.counts}):
            favorites = favorite_tier(known.field_counts(fld), candidates,
                                      known.unresponsive(), k, c)
            for favorite in favorites:
                if graph.has_edge(agent, favorite):
                    graph[agent][favorite]['fields'].append(fld)
                else:
                    graph.add_edge(agent, favorite, fields=[fld])
    return graph


def _leaves_of(holons):
    """Every agent id inside a set of holons."""
    return {leaf for holon in holons for leaf in holon.leaves()}


def _absorb(holon, member, favorite):
    """Return holon after member chooses the free agent favorite."""
    if member == holon.head:
        return Holon(holon.head, holon.body | {favorite}, holon.formed_at,
                     holon.client)
    body = set()
    for item in holon.body:
        if item == member:
            item = Holon(member, frozenset([favorite]), holon.formed_at)
        elif isinstance(item, Holon) and member in item.leaves():
            item = _absorb(item, member, favorite)
        body.add(item)
    return Holon(holon.head, frozenset(body), holon.formed_at, holon.client)


def detect_holons(graph, prior=(), tick=0):
    """Form the holons of a favorite graph.

    :graph: Output of favorite_graph
    :prior: Holons of the previous tick, used for formed_at
    :tick: Tick of the graph
    :returns: frozenset of top-level Holons

    """
    formed = {holon.head: holon.formed_at for holon in prior}
    client = graph.graph.get('client', OMEGA)
    holons = set()
    if client in graph:
        favorites = sorted(graph.successors(client))
        if len(favorites) == 1:
            head = favorites[0]
            body = (set(graph.graph.get('peers', ())) -
                    set(graph.graph.get('unresponsive', ())) - {head, client})
            holons.add(Holon(head, frozenset(body),
                             formed.get(head, tick), client))
        else:
            holons.update(Holon(head, frozenset(), formed.get(head, tick),
                                client) for head in favorites)

    changed = True
    while changed:
        changed = False
        taken = _leaves_of(holons) | {client}
        # Rule 2
        for holon in sorted(holons, key=lambda item: item.head):
            for member in holon.leaves():
                free = [favorite for favorite in sorted(
                    graph.successors(member)) if favorite not in taken]
                if free:
                    holons.remove(holon)
                    holons.add(_absorb(holon, member, free[0]))
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue
        # Rule 3
        heads = {holon.head: holon for holon in holons}
        for agent in sorted(set(graph) - taken):
            chosen = [heads[favorite] for favorite in
                      sorted(graph.successors(agent)) if favorite in heads]
            if len(chosen) >= 2:
                holons.difference_update(chosen)
                holons.add(Holon(agent, frozenset(chosen),
                                 formed.get(agent, tick)))
                changed = True
                break

    if holons:
        LOGGER.debug('t=%s holons: %s', tick,
                     ', '.join(sorted(holon.head for holon in holons)))
    return frozenset(holons)


def holons_at(trace, k=1, c=1):
    """Yield (tick, holons) for every tick of the trace."""
    holons = frozenset()
    for tick in range(1, trace.horizon + 1):
        holons = detect_holons(favorite_graph(trace, tick, k, c), holons,
                               tick)
        yield tick, holons


def _keyed(holons):
    """Key top-level holons by their client when it has a single one."""
    clients = {}
    for holon in holons:
        clients.setdefault(holon.client, []).append(holon)
    keyed = {}
    for client, group in clients.items():
        for holon in group:
            if client is not None and len(group) == 1:
                keyed[('client', client)] = holon.head
            else:
                keyed[('head', holon.head)] = holon.head
    return keyed


def holon_timeline(trace, k=1, c=1):
    """List the emergence and dissolution of holons during a run.

    The gate holon of a client keeps its identity when its head changes,
    a new head is reported as emerged.

    :trace: EventTrace
    :k: Number of favorites
    :returns: List of (tick, "Emerged" or "Dissolved", head)

    """
    timeline = []
    previous = {}
    for tick, holons in holons_at(trace, k, c):
        current = _keyed(holons)
        events = [(tick, 'Dissolved', head) for key, head in previous.items()
                  if key not in current]
        events.extend((tick, 'Emerged', head) for key, head in current.items()
                      if previous.get(key) != head)
        timeline.extend(sorted(events))
        previous = current
    return timeline


def active_windows(trace, k=1, c=1):
    """Return (head, first tick, last tick) of every top-level holon."""
    windows = []
    open_windows = {}
    for tick, holons in holons_at(trace, k, c):
        heads = {holon.head for holon in holons}
        for head in sorted(set(open_windows) - heads):
            windows.append((head, open_windows.pop(head), tick - 1))
        for head in sorted(heads - set(open_windows)):
            open_windows[head] = tick
    for head, first in sorted(open_windows.items()):
        windows.append((head, first, trace.horizon))
    return sorted(windows, key=lambda window: (window[1], window[0]))


def head_exclusivity(trace, holon, window, k=1, c=1):
    """Fraction of the messages crossing the holon boundary that pass
    through its head.

    :trace: EventTrace
    :holon: Holon
    :window: (first tick, last tick), inclusive
    :returns: float in [0, 1], 1.0 when nothing crosses the boundary

    """
    first, last = window
    if first < 1:
        raise HolonInactive(holon.head, first)
    if last > trace.horizon:
        raise HolonInactive(holon.head, last)
    for tick, holons in holons_at(trace, k, c):
        if first <= tick <= last and holon.head not in {
                item.head for item in holons}:
            raise HolonInactive(holon.head, tick)

    members = set(holon.leaves())
    crossing = through_head = 0
    for event in trace:
        if event.kind != 'Send' or not first <= event.tick <= last:
            continue
        inside = [agent for agent in event.agents if agent in members]
        if len(inside) != 1:
            continue
        crossing += 1
        through_head += inside[0] == holon.head
    if crossing == 0:
        return 1.0
    return through_head / crossing


def _holon_element(holon, parent):
    """Append a holon and its sub-holons to parent."""
    elem = _subelement(parent, 'holon')
    elem.set('head', holon.head)
    elem.set('formedAt', str(holon.formed_at))
    if holon.client is not None:
        elem.set('client', holon.client)
    for member in sorted(holon.body, key=_member_key):
        if isinstance(member, Holon):
            _holon_element(member, elem)
        else:
            _subelement(elem, 'member').set('agent', member)
    return elem


def holon_forest(holons, tick):
    """Return the holons of a tick as an element tree.

    Returns the following ElementTree structure::

        <hs:holarchy tick="14">
          <hs:holon head="α" formedAt="14" client="Ω">
            <hs:member agent="β"/>
            <hs:member agent="γ"/>
          </hs:holon>
        </hs:holarchy>

    :holons: Iterable of top-level Holons
    :tick: Tick of the holons
    :returns: ElementTree element object

    """
    root = _element('holarchy')
    root.set('tick', str(tick))
    for holon in sorted(holons, key=lambda item: item.head):
        _holon_element(holon, root)
    return root


def timeline_csv(timeline):
    """Write a holon timeline as tick,event,head rows."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(['tick', 'event', 'head'])
    writer.writerows(timeline)
    return output.getvalue()
