"""Test holosim.cli module features."""

import json

import pytest
import lxml.etree as ET

import holosim.scenario
from holosim.cli import main
from holosim.constants import (EXIT_ENGINE, EXIT_INPUT, EXIT_MISMATCH,
                               EXIT_OK, EXIT_USAGE)
from holosim.utils import HOLOSIM_NS

SCENARIO = """
[schema]
A = B
B
M

[agents]
α A=0.1 M=0.2
β A=0.3 M=0.1

[omega]
1 M
4 M

[engine]
horizon = 12
delays = uniform 1 3
"""

SHORT_SCRIPT = """
[schema]
M

[agents]
α M=0.1
β M=0.2

[omega]
1 M

[delays]
Ω 1 1

[engine]
horizon = 5
delays = scripted
"""


@pytest.fixture(name='scenario_file')
def fixture_scenario_file(tmp_path):
    """Write the small scenario to a file."""
    path = tmp_path / 'small.scn'
    path.write_text(SCENARIO, encoding='utf-8')
    return str(path)


def test_run_jsonl(scenario_file, tmp_path):
    """Test that a run writes the header and the events of its trace."""
    out = tmp_path / 'trace.jsonl'
    assert main(['run', '--scenario', scenario_file, '--seed', '4',
                 '--out', str(out)]) == EXIT_OK
    lines = out.read_text(encoding='utf-8').splitlines()
    assert json.loads(lines[0])['horizon'] == 12
    assert json.loads(lines[1])['kind'] == 'Send'


def test_run_horizon_override(scenario_file, capsys):
    """Test that --horizon takes precedence over the scenario file."""
    assert main(['run', '--scenario', scenario_file, '--horizon', '3',
                 '--format', 'csv', '--tables', 'remaining']) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == 't,α,β'
    assert [row.split(',')[0] for row in rows[1:]] == ['1', '2', '3']


def test_export(scenario_file, tmp_path, capsys):
    """Test projecting the tables of a saved trace."""
    out = tmp_path / 'trace.jsonl'
    main(['run', '--scenario', scenario_file, '--out', str(out)])
    assert main(['export', '--trace', str(out), '--tables', 'best0']) == \
        EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == 't,α,β'
    assert len(rows) == 13


def test_replay(capsys, tmp_path):
    """Test that the replay matches every golden table."""
    out = tmp_path / 'tables.csv'
    assert main(['replay', '--out', str(out)]) == EXIT_OK
    assert capsys.readouterr().out == 'best0: OK\nbest: OK\nremaining: OK\n'
    assert out.read_text(encoding='utf-8').startswith('t,α,β,γ\n1,0,0,0\n')


def test_replay_mismatch(monkeypatch, capsys):
    """Test the exit code of a replay differing from its golden copy."""
    golden = holosim.scenario.golden_table('best0')
    monkeypatch.setattr(holosim.scenario, 'golden_table', lambda name: (
        golden.replace('\n50,6,1,1\n', '\n50,6,1,0\n')))
    assert main(['replay', '--tables', 'best0']) == EXIT_MISMATCH
    assert 'tick 50, column γ' in capsys.readouterr().err


@pytest.mark.parametrize('flag', ['--paper', '--reference'])
def test_holons_example(flag, capsys, tmp_path):
    """Test the holon timeline of the bundled example."""
    xml = tmp_path / 'holons.xml'
    assert main(['holons', flag, '--xml', str(xml)]) == EXIT_OK
    assert capsys.readouterr().out == (
        'tick,event,head\n14,Emerged,α\n36,Dissolved,α\n46,Emerged,β\n'
        '49,Emerged,γ\n')
    root = ET.parse(str(xml)).getroot()
    assert root.tag == '{%s}report' % HOLOSIM_NS
    holons = root.xpath('./hs:holarchy/hs:holon',
                        namespaces={'hs': HOLOSIM_NS})
    assert [holon.get('head') for holon in holons] == ['γ']


def test_holons_trace(scenario_file, tmp_path):
    """Test the holon timeline of a saved trace."""
    out = tmp_path / 'trace.jsonl'
    main(['run', '--scenario', scenario_file, '--out', str(out)])
    assert main(['holons', '--trace', str(out), '--k', '2']) == EXIT_OK


def test_prob(capsys, tmp_path):
    """Test the closed forms of five peers."""
    xml = tmp_path / 'prob.xml'
    assert main(['prob', '--n', '5', '--xml', str(xml)]) == EXIT_OK
    out = capsys.readouterr().out
    assert 'p_triple = 1/24 ~ 4.166667e-02' in out
    assert 'p_any_triple = 5/2 ~ 2.500000e+00' in out
    assert 'approximation = 5^-0' in out
    root = ET.parse(str(xml)).getroot()
    assert root[0].tag == '{%s}probability' % HOLOSIM_NS


def test_mc(capsys):
    """Test the Monte Carlo check against the closed form."""
    assert main(['mc', '--n', '5', '--trials', '20000', '--seed', '1',
                 '--workers', '2']) == EXIT_OK
    assert 'verdict = PASS' in capsys.readouterr().out


@pytest.mark.parametrize('argv', [
    ['prob', '--n', '3'],
    ['prob', '--n', '5', '--k', '0'],
    ['mc', '--n', '1', '--event', 'favorite'],
])
def test_usage_errors(argv):
    """Test that parameters outside their domain exit with 64."""
    assert main(argv) == EXIT_USAGE


@pytest.mark.parametrize('argv', [
    [],
    ['prob'],
    ['mc', '--n', '5', '--trials', '0'],
    ['holons', '--paper', '--k', 'x'],
    ['replay', '--tables', 'worst'],
])
def test_argument_errors(argv):
    """Test that invalid arguments exit with 64."""
    with pytest.raises(SystemExit) as error:
        main(argv)
    assert error.value.code == EXIT_USAGE


def test_input_errors(tmp_path):
    """Test that missing and malformed scenario files exit with 1."""
    assert main(['run', '--scenario', str(tmp_path / 'none.scn')]) == \
        EXIT_INPUT
    path = tmp_path / 'broken.scn'
    path.write_text('[schema]\nA = B\nB = A\n', encoding='utf-8')
    assert main(['run', '--scenario', str(path)]) == EXIT_INPUT


def test_engine_error(tmp_path):
    """Test that a scripted schedule without enough delays exits with 2."""
    path = tmp_path / 'short.scn'
    path.write_text(SHORT_SCRIPT, encoding='utf-8')
    assert main(['run', '--scenario', str(path)]) == EXIT_ENGINE
