"""Test holosim.engine module features."""

import json
import logging

import numpy as np
import pytest

from holosim.engine import (Event, EventTrace, draw_delay, init_world,
                            knowledge_at, peers_of, project_tables, run,
                            run_sweep, step, sweep_seeds, trace_from_jsonl,
                            trace_to_jsonl)
from holosim.model import Scripted, UniformInt
from holosim.scenario import (build_config, parse_scenario,
                              paper_example)
from holosim.utils import (HorizonExceeded, OMEGA, ParseError,
                           ScriptExhausted)

CHECKIN_SCENARIO = """
[schema]
A = B
B
M

[agents]
α A=0.1 M=0.1
β A=0.2 M=0.2
δ A=0.3 M=0.3

[arrivals]
2 δ

[engine]
horizon = 6
anneal_p0 = 0.0
delays = uniform 1 1
"""

FORWARDING_SCENARIO = """
[schema]
A = B
B = C
C
M

[agents]
α A=0.0 B=1.0 M=0.1
β A=0.0 B=0.0 M=0.5
γ A=0.0 B=0.0 M=0.6

[omega]
1 M

[engine]
horizon = 12
anneal_p0 = 0.0
forwarding = true
delays = uniform 1 1
"""


@pytest.fixture(scope='module', name='reference_trace')
def fixture_reference_trace():
    """Replay the bundled example once for the module."""
    scenario = paper_example()
    return run(build_config(scenario), scenario)


def _events(trace, kind, tick=None):
    """Events of one kind, optionally at one tick."""
    return [event for event in trace
            if event.kind == kind and tick in (None, event.tick)]


def test_init_world_reference():
    """Test that the example starts with three peers of 10 messages."""
    scenario = paper_example()
    world = init_world(build_config(scenario), scenario)
    assert world.clock == 0
    assert sorted(world.agents) == [OMEGA, 'α', 'β', 'γ']
    for agent_id in ('α', 'β', 'γ'):
        agent = world.agents[agent_id]
        assert agent.remaining_messages == 10
        assert agent.best.counts == {}
        assert agent.peers == {'α', 'β', 'γ'} - {agent_id}
    assert world.agents[OMEGA].unlimited
    assert world.trace.roster == {OMEGA: None, 'α': 10, 'β': 10, 'γ': 10}
    assert world.trace.peers == ('α', 'β', 'γ')


def test_init_world_zero_budget():
    """Test that no peer ever answers without messages."""
    scenario = parse_scenario(FORWARDING_SCENARIO)
    cfg = build_config(scenario, budget=0)
    world = init_world(cfg, scenario)
    assert all(world.agents[agent].remaining_messages == 0
               for agent in ('α', 'β', 'γ'))
    trace = run(cfg, scenario)
    assert not [event for event in _events(trace, 'Send')
                if event.agents[0] != OMEGA]
    assert {event.detail['reason'] for event in _events(trace, 'Decline')} \
        == {'no_budget'}


def test_init_world_seeded():
    """Test that two worlds of the same seed draw the same numbers."""
    scenario = parse_scenario(FORWARDING_SCENARIO)
    cfg = build_config(scenario, seed=42)
    first, second = init_world(cfg, scenario), init_world(cfg, scenario)
    assert first.rng.random(5).tolist() == second.rng.random(5).tolist()


def test_draw_delay_uniform():
    """Test that uniform delays stay in their interval."""
    rng = np.random.default_rng(5)
    draws = {draw_delay(rng, UniformInt(1, 5)) for _ in range(500)}
    assert draws == {1, 2, 3, 4, 5}
    assert {draw_delay(rng, UniformInt(3, 3)) for _ in range(20)} == {3}


def test_draw_delay_scripted():
    """Test that scripted delays are read by (sender, ordinal) without
    consuming random numbers."""
    rng = np.random.default_rng(5)
    state = rng.bit_generator.state
    dist = Scripted(schedule={('α', 1): 4})
    assert draw_delay(rng, dist, ('α', 1)) == 4
    assert rng.bit_generator.state == state
    with pytest.raises(ScriptExhausted):
        draw_delay(rng, dist, ('α', 2))


@pytest.mark.parametrize(('tick', 'remaining'), [
    (4, 10),
    (5, 9),
    (33, 1),
    (34, 0),
])
def test_step_budget_of_alpha(tick, remaining):
    """Test the budget of α while stepping through the example."""
    scenario = paper_example()
    cfg = build_config(scenario)
    world = init_world(cfg, scenario)
    while world.clock < tick:
        step(world, cfg)
    assert world.agents['α'].remaining_messages == remaining


def test_step_quiescent():
    """Test that a world without messages only advances its clock."""
    scenario = parse_scenario(CHECKIN_SCENARIO.replace('2 δ', '5 δ'))
    cfg = build_config(scenario)
    world = init_world(cfg, scenario)
    step(world, cfg)
    assert world.clock == 1
    assert len(world.trace) == 0
    assert world.in_flight == []


def test_step_send_record():
    """Test that the first step sends the query of Ω to every peer and
    records the message kind, cost and delay of each send."""
    scenario = parse_scenario(FORWARDING_SCENARIO)
    cfg = build_config(scenario)
    world = init_world(cfg, scenario)
    step(world, cfg)
    sends = _events(world.trace, 'Send', 1)
    assert [event.agents for event in sends] == [(OMEGA, 'α'), (OMEGA, 'β'),
                                                 (OMEGA, 'γ')]
    for event in sends:
        assert event.field == 'M'
        assert event.detail == {'kind': 'Query', 'cost': 1, 'delay': 1}


def test_step_horizon():
    """Test that a world cannot be stepped past its horizon."""
    scenario = parse_scenario(CHECKIN_SCENARIO)
    cfg = build_config(scenario, horizon=1)
    world = init_world(cfg, scenario)
    step(world, cfg)
    with pytest.raises(HorizonExceeded):
        step(world, cfg)


def test_run_horizon_zero():
    """Test that a run of no ticks has no events."""
    scenario = paper_example()
    trace = run(build_config(scenario, horizon=0), scenario)
    assert trace.events == []
    assert trace.horizon == 0


def test_run_logging(caplog):
    """Test that a run reports to the logger of the engine module."""
    scenario = paper_example()
    with caplog.at_level(logging.INFO, logger='holosim.engine'):
        run(build_config(scenario), scenario)
    records = [record for record in caplog.records
               if record.name == 'holosim.engine']
    assert records[0].getMessage() == (
        'World initialised: 3 peers, seed 0, horizon 50')
    assert records[-1].getMessage().startswith('Run finished at tick 50 ')


def test_run_deterministic(reference_trace):
    """Test that the same configuration gives the same trace."""
    scenario = paper_example()
    again = run(build_config(scenario), scenario)
    assert trace_to_jsonl(again) == trace_to_jsonl(reference_trace)


@pytest.mark.parametrize(('tick', 'best_0', 'remaining'), [
    (0, {'α': 0, 'β': 0, 'γ': 0}, {'α': 10, 'β': 10, 'γ': 10}),
    (14, {'α': 1, 'β': 0, 'γ': 0}, {'α': 7, 'β': 5, 'γ': 10}),
    (25, {'α': 3, 'β': 0, 'γ': 0}, {'α': 3, 'β': 4, 'γ': 10}),
    (30, {'α': 4, 'β': 0, 'γ': 0}, {'α': 2, 'β': 2, 'γ': 10}),
    (40, {'α': 6, 'β': 0, 'γ': 0}, {'α': 0, 'β': 0, 'γ': 9}),
    (46, {'α': 6, 'β': 1, 'γ': 0}, {'α': 0, 'β': 0, 'γ': 7}),
    (50, {'α': 6, 'β': 1, 'γ': 1}, {'α': 0, 'β': 0, 'γ': 7}),
])
def test_project_tables(reference_trace, tick, best_0, remaining):
    """Test BEST-0 and REMAINING-MESSAGES of the example."""
    snapshot = project_tables(reference_trace, tick)
    assert snapshot.best_0 == best_0
    assert snapshot.remaining == remaining


@pytest.mark.parametrize(('tick', 'cell', 'count'), [
    (6, ('α', 'A', 'α'), 1),
    (9, ('β', 'B', 'β'), 1),
    (10, ('β', 'D', 'β'), 1),
    (17, ('α', 'C', 'β'), 0),
    (18, ('α', 'C', 'β'), 1),
])
def test_project_best(reference_trace, tick, cell, count):
    """Test the populated BEST cells of the example."""
    owner, fld, agent = cell
    assert project_tables(reference_trace, tick).best[owner].get(
        (fld, agent), 0) == count


def test_reference_timeouts(reference_trace):
    """Test the timeouts and the mode switch of Ω."""
    timeouts = [(event.tick, event.agents)
                for event in _events(reference_trace, 'Timeout')]
    assert timeouts == [(36, (OMEGA, 'α')), (49, (OMEGA, 'β')),
                        (50, (OMEGA, 'β'))]
    switches = _events(reference_trace, 'ModeSwitch')
    assert [(event.tick, event.agents) for event in switches] == \
        [(36, (OMEGA,))]
    assert switches[0].detail['mode'] == 'Intelligent'


def test_reference_late_response(reference_trace):
    """Test that the answer of α arriving after its timeout is ignored."""
    late = [event for event in _events(reference_trace, 'Deliver', 37)
            if event.agents == ('α', OMEGA)]
    assert len(late) == 1
    assert late[0].detail['late'] is True
    assert not [event for event in _events(reference_trace, 'TableUpdate', 37)
                if event.agents == (OMEGA, 'α')]


def test_reference_scripted_declines(reference_trace):
    """Test that γ turns down the scripted queries of Ω."""
    declines = [(event.tick, event.agents, event.detail['reason'])
                for event in _events(reference_trace, 'Decline')
                if event.detail.get('scripted')]
    assert declines == [(4, ('γ', OMEGA), 'lower_quality'),
                        (38, ('γ', OMEGA), 'lower_quality'),
                        (38, ('γ', OMEGA), 'lower_quality')]


def test_reference_answers_only_improve(reference_trace):
    """Test that without annealing every answer has a strictly lower
    error than its querier."""
    responses = [event for event in _events(reference_trace, 'Send')
                 if event.detail['kind'] == 'Response']
    assert responses
    for event in responses:
        assert event.detail['error'] < event.detail['querier_error']


def test_reference_budget_conservation(reference_trace):
    """Test that budgets only fall by the cost of sent messages."""
    previous = project_tables(reference_trace, 0).remaining
    for tick in range(1, 51):
        current = project_tables(reference_trace, tick).remaining
        for agent, value in current.items():
            assert 0 <= value <= previous[agent]
            sent = sum(event.detail['cost'] for event
                       in _events(reference_trace, 'Send', tick)
                       if event.agents[0] == agent)
            assert previous[agent] - value == sent
        previous = current


def test_knowledge_at(reference_trace):
    """Test the peers Ω has seen time out."""
    assert knowledge_at(reference_trace, 35)[OMEGA].unresponsive() == set()
    assert knowledge_at(reference_trace, 36)[OMEGA].unresponsive() == {'α'}
    assert knowledge_at(reference_trace, 49)[OMEGA].unresponsive() == \
        {'α', 'β'}
    assert knowledge_at(reference_trace, 14)[OMEGA].field_counts('M') == \
        {'α': 1}


def test_checkin():
    """Test that a newcomer checking in becomes a peer of everyone."""
    scenario = parse_scenario(CHECKIN_SCENARIO)
    trace = run(build_config(scenario), scenario)
    checkins = [event for event in _events(trace, 'Send', 2)
                if event.detail['kind'] == 'CheckIn']
    assert [event.agents for event in checkins] == [('δ', 'α'), ('δ', 'β')]
    replies = [event for event in _events(trace, 'Send', 3)
               if event.detail['kind'] == 'CheckInReply']
    assert [event.detail['verdict'] for event in replies] == \
        ['Accept', 'Accept']
    assert all(event.detail['cost'] == 0 for event in replies)

    assert peers_of(trace, 3) == ['α', 'β']
    assert peers_of(trace, 4) == ['α', 'β', 'δ']
    knowledge = knowledge_at(trace, 6)
    assert knowledge['δ'].peers == {'α', 'β'}
    assert 'δ' in knowledge['α'].peers
    assert project_tables(trace, 6).remaining == {'α': 10, 'β': 10, 'δ': 8}


def test_checkin_rejected():
    """Test that peers short of messages do not recognise a newcomer."""
    scenario = parse_scenario(CHECKIN_SCENARIO)
    trace = run(build_config(scenario, checkin_threshold=20), scenario)
    assert peers_of(trace, 6) == ['α', 'β']
    assert knowledge_at(trace, 6)['δ'].peers == set()


def test_forwarding():
    """Test that α asks about the compound component B before answering
    Ω, and that its answer arrives after the round of Ω resolved."""
    scenario = parse_scenario(FORWARDING_SCENARIO)
    trace = run(build_config(scenario), scenario)

    sub_queries = [event for event in _events(trace, 'Send', 2)
                   if event.detail['kind'] == 'Query']
    assert [event.agents for event in sub_queries] == [('α', 'β'),
                                                       ('α', 'γ')]
    assert [(event.field, event.detail['level'])
            for event in sub_queries] == [('B', 1), ('B', 1)]
    updates = [(event.agents, event.field)
               for event in _events(trace, 'TableUpdate')]
    assert updates == [((OMEGA, 'β'), 'M'), (('α', 'β'), 'B')]
    answer = [event for event in _events(trace, 'Send', 4)
              if event.detail['kind'] == 'Response']
    assert [event.agents for event in answer] == [('α', OMEGA)]
    late = [event for event in _events(trace, 'Deliver', 5)
            if event.agents == ('α', OMEGA)]
    assert late[0].detail['late'] is True
    assert project_tables(trace, 12).remaining['α'] == 7


def test_forwarding_depth_bound():
    """Test that queries at the dependency depth are answered without
    forwarding."""
    scenario = parse_scenario(FORWARDING_SCENARIO)
    cfg = build_config(scenario)
    world = init_world(cfg, scenario)
    assert world.max_depth == 2
    world.max_depth = 0
    while world.clock < cfg.horizon:
        step(world, cfg)
    assert not [event for event in world.trace
                if event.kind == 'Send' and 'level' in event.detail]
    answers = [event.agents for event in _events(world.trace, 'Send', 2)]
    assert ('α', OMEGA) in answers


def test_trace_jsonl(reference_trace):
    """Test the header and the key order of the serialized trace."""
    text = trace_to_jsonl(reference_trace)
    lines = text.splitlines()
    header = json.loads(lines[0])
    assert header == {'horizon': 50, 'peers': ['α', 'β', 'γ'],
                      'roster': {OMEGA: None, 'α': 10, 'β': 10, 'γ': 10}}
    assert list(json.loads(lines[1])) == ['tick', 'kind', 'agents', 'field',
                                          'message', 'detail']
    assert 'α' in text
    assert len(lines) == len(reference_trace) + 1
    assert trace_from_jsonl(text) == reference_trace


def test_trace_jsonl_invalid():
    """Test that broken trace lines are reported with their number."""
    header = json.dumps({'horizon': 1, 'roster': {}, 'peers': []})
    with pytest.raises(ParseError) as error:
        trace_from_jsonl(header + '\n{"tick": 1}\n')
    assert error.value.args[0] == 2
    with pytest.raises(ParseError):
        trace_from_jsonl('not json\n')
    assert trace_from_jsonl('') == EventTrace()


def test_trace_append_order():
    """Test that the trace rejects events from the past."""
    trace = EventTrace(horizon=5)
    trace.append(Event(2, 'Send', ('α', 'β')))
    with pytest.raises(ValueError):
        trace.append(Event(1, 'Send', ('α', 'β')))
    with pytest.raises(ValueError):
        trace.append(Event(3, 'Gossip', ('α',)))


def test_run_sweep():
    """Test that parallel sweeps equal serial sweeps."""
    scenario = parse_scenario(FORWARDING_SCENARIO.replace(
        'delays = uniform 1 1', 'delays = uniform 1 3'))
    cfg = build_config(scenario)
    serial = run_sweep(cfg, scenario, runs=6, master_seed=11, workers=1)
    parallel = run_sweep(cfg, scenario, runs=6, master_seed=11, workers=3)
    assert [seed for seed, _ in serial] == sweep_seeds(11, 6)
    assert len(set(sweep_seeds(11, 6))) == 6
    assert [trace_to_jsonl(trace) for _, trace in serial] == \
        [trace_to_jsonl(trace) for _, trace in parallel]
