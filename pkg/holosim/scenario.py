"""
Scenario files, the bundled example network and the table exports.

A scenario file is line-oriented text split in sections::

    [schema]        A = B C         (a compound field and its components)
                    E               (a simple field)
    [agents]        α A=0.05 M=0.1  (prediction errors per field)
    [budgets]       α = 10
    [omega]         3 M             (tick and field of a query of Ω)
    [queries]       5 α A β γ       (tick, sender, field, recipients)
    [arrivals]      12 δ            (tick a newcomer sends CHECK IN)
    [delays]        Ω 3 1 decline   (sender, message ordinal, delay)
    [engine]        horizon = 50    (SimConfig overrides)

Empty lines and lines starting with "#" are ignored.

References:

    * RFC 4180 comma-separated values https://www.rfc-editor.org/rfc/rfc4180

"""

import csv
import io
import logging
import pkgutil
from dataclasses import dataclass, field as dc_field

from holosim.constants import SIM_DEFAULTS, TABLE_NAMES
from holosim.engine import project_tables
from holosim.model import (AgentProfile, FieldSchema, Scripted, SimConfig,
                           UniformInt, WHOLE_MESSAGE, compound_fields,
                           validate_schema)
from holosim.utils import (CycleDetected, GoldenMismatch, OMEGA, ParseError,
                           UndeclaredField, ValidationError)

__all__ = ['Scenario', 'parse_scenario', 'render_scenario', 'load_scenario',
           'paper_example', 'build_config', 'export_tables',
           'golden_table', 'compare_tables', 'SECTIONS']

LOGGER = logging.getLogger(__name__)

SECTIONS = ['schema', 'agents', 'budgets', 'omega', 'queries', 'arrivals',
            'delays', 'engine']

REFERENCE_FIXTURE = 'data/reference.scn'

# Scenario file key -> SimConfig field
_CONFIG_KEYS = {'delays': 'delay_dist'}


@dataclass(frozen=True)
class Scenario:
    """Everything a run needs besides the engine parameters."""
    schema: FieldSchema
    profiles: tuple = ()
    budgets: dict = dc_field(default_factory=dict)
    omega_queries: tuple = ()
    queries: tuple = ()
    arrivals: tuple = ()
    scripted_delays: tuple = ()
    overrides: dict = dc_field(default_factory=dict)


def _parse_value(key, value):
    """Convert an [engine] value to the type of its SimConfig field."""
    if key == 'delays':
        words = value.split()
        if words == ['scripted']:
            return 'scripted'
        if len(words) == 3 and words[0] == 'uniform':
            return UniformInt(int(words[1]), int(words[2]))
        raise ValueError('expected "scripted" or "uniform LO HI"')
    default = SIM_DEFAULTS[key]
    if isinstance(default, bool):
        if value.lower() not in ('true', 'false'):
            raise ValueError('expected "true" or "false" for %s' % key)
        return value.lower() == 'true'
    if default is None and value.lower() == 'none':
        return None
    if isinstance(default, int):
        return int(value)
    return float(value)


def _render_value(value):
    """Inverse of _parse_value."""
    if isinstance(value, UniformInt):
        return 'uniform %s %s' % (value.lo, value.hi)
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if value is None:
        return 'none'
    return repr(value) if isinstance(value, float) else str(value)


def _split_sections(text):
    """Yield (section, line number, line) of every content line."""
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if line.startswith('[') and line.endswith(']'):
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(number, 'unknown section "%s"' % section)
            continue
        if section is None:
            raise ParseError(number, 'content before the first section')
        yield section, number, line


# pylint: disable=too-many-locals,too-many-branches
def parse_scenario(text):
    """Parse a scenario file.

    :text: Scenario file contents
    :returns: Scenario

    """
    fields, deps, profiles, budgets = [], {}, [], {}
    omega, queries, arrivals, delays, overrides = [], [], [], [], {}
    for section, number, line in _split_sections(text):
        try:
            if section == 'schema':
                name, _, components = line.partition('=')
                fields.append(name.strip())
                if components.split():
                    deps[name.strip()] = tuple(components.split())
            elif section == 'agents':
                agent, *pairs = line.split()
                errors = {}
                for pair in pairs:
                    fld, value = pair.split('=')
                    errors[fld] = float(value)
                profiles.append(AgentProfile(agent, errors))
            elif section in ('budgets', 'engine'):
                key, value = (part.strip() for part in line.split('=', 1))
                if section == 'budgets':
                    budgets[key] = int(value)
                elif key == 'delays' or key in SIM_DEFAULTS:
                    overrides[_CONFIG_KEYS.get(key, key)] = _parse_value(
                        key, value)
                else:
                    raise ValueError('unknown engine key "%s"' % key)
            elif section == 'omega':
                tick, fld = line.split()
                omega.append((int(tick), fld))
            elif section == 'queries':
                tick, sender, fld, *recipients = line.split()
                queries.append((int(tick), sender, fld, tuple(recipients)))
            elif section == 'arrivals':
                tick, agent = line.split()
                arrivals.append((int(tick), agent))
            else:
                sender, ordinal, delay, *flag = line.split()
                if flag not in ([], ['decline']):
                    raise ValueError('unexpected "%s"' % ' '.join(flag))
                delays.append((sender, int(ordinal), int(delay), bool(flag)))
        except ValueError as exception:
            raise ParseError(number, str(exception)) from exception

    scenario = Scenario(
        schema=FieldSchema(tuple(fields), deps), profiles=tuple(profiles),
        budgets=budgets, omega_queries=tuple(omega), queries=tuple(queries),
        arrivals=tuple(arrivals), scripted_delays=tuple(delays),
        overrides=overrides)
    _validate(scenario)
    LOGGER.debug('Parsed scenario with %d agents and %d fields',
                 len(profiles), len(fields))
    return scenario


# pylint: disable=too-many-branches
def _validate(scenario):
    """Referential checks of a parsed scenario."""
    try:
        schema = validate_schema(scenario.schema)
    except (CycleDetected, UndeclaredField) as exception:
        raise ValidationError(str(exception)) from exception
    if len(set(schema.fields)) != len(schema.fields):
        raise ValidationError('a field is declared twice')

    agents = {profile.agent for profile in scenario.profiles}
    if len(agents) != len(scenario.profiles):
        raise ValidationError('an agent is declared twice')
    required = compound_fields(schema) | (
        {WHOLE_MESSAGE} & set(schema.fields))
    for profile in scenario.profiles:
        for fld, error in profile.errors.items():
            if fld not in schema.fields:
                raise ValidationError('agent "%s" names undeclared field '
                                      '"%s"' % (profile.agent, fld))
            if not 0.0 <= error <= 1.0:
                raise ValidationError('error %r of agent "%s" for "%s" is '
                                      'outside [0, 1]' % (
                                          error, profile.agent, fld))
        if set(profile.errors) != required:
            raise ValidationError('agent "%s" must give errors for exactly '
                                  'the fields %s' % (
                                      profile.agent,
                                      ', '.join(sorted(required))))
    known = agents | {OMEGA}
    for agent, budget in scenario.budgets.items():
        if agent not in known or budget < 0:
            raise ValidationError('invalid budget %s for "%s"' % (
                budget, agent))

    horizon = scenario.overrides.get('horizon', SIM_DEFAULTS['horizon'])
    for tick, fld in scenario.omega_queries:
        if not 1 <= tick <= horizon or fld not in schema.fields:
            raise ValidationError('invalid query of Ω at tick %s on "%s"' % (
                tick, fld))
    profiles = {profile.agent: profile for profile in scenario.profiles}
    for tick, sender, fld, recipients in scenario.queries:
        if (sender not in profiles or fld not in profiles[sender].errors or
                not set(recipients) <= agents - {sender} or tick < 1):
            raise ValidationError('invalid query of "%s" at tick %s' % (
                sender, tick))
    for tick, agent in scenario.arrivals:
        if agent not in agents - {OMEGA} or tick < 1:
            raise ValidationError('invalid arrival of "%s"' % agent)
    for sender, ordinal, delay, _ in scenario.scripted_delays:
        if sender not in known or ordinal < 1 or delay < 1:
            raise ValidationError('invalid delay entry %s %s %s' % (
                sender, ordinal, delay))


def render_scenario(scenario):
    """Write a scenario in the format read by parse_scenario."""
    lines = ['[schema]']
    for fld in scenario.schema.fields:
        components = scenario.schema.deps.get(fld)
        lines.append('%s = %s' % (fld, ' '.join(components))
                     if components else fld)
    lines.append('\n[agents]')
    for profile in scenario.profiles:
        lines.append(' '.join([profile.agent] + [
            '%s=%r' % (fld, error) for fld, error in profile.errors.items()]))
    lines.append('\n[budgets]')
    lines.extend('%s = %s' % item for item in scenario.budgets.items())
    lines.append('\n[omega]')
    lines.extend('%s %s' % item for item in scenario.omega_queries)
    lines.append('\n[queries]')
    lines.extend(' '.join([str(tick), sender, fld] + list(recipients))
                 for tick, sender, fld, recipients in scenario.queries)
    lines.append('\n[arrivals]')
    lines.extend('%s %s' % item for item in scenario.arrivals)
    lines.append('\n[delays]')
    for sender, ordinal, delay, decline in scenario.scripted_delays:
        lines.append('%s %s %s%s' % (sender, ordinal, delay,
                                     ' decline' if decline else ''))
    lines.append('\n[engine]')
    names = {value: key for key, value in _CONFIG_KEYS.items()}
    lines.extend('%s = %s' % (names.get(key, key), _render_value(value))
                 for key, value in scenario.overrides.items())
    return '\n'.join(lines) + '\n'


def load_scenario(path):
    """Read and parse a scenario file."""
    with open(path, encoding='utf-8') as infile:
        return parse_scenario(infile.read())


def paper_example():
    """Return the bundled three-peer example scenario."""
    data = pkgutil.get_data('holosim', REFERENCE_FIXTURE)
    return parse_scenario(data.decode('utf-8'))


def build_config(scenario, **overrides):
    """Build the SimConfig of a scenario.

    Defaults are overridden by the [engine] section, which is overridden
    by the keyword arguments whose value is not None.

    :scenario: Scenario
    :returns: SimConfig

    """
    values = dict(scenario.overrides)
    values.update((key, value) for key, value in overrides.items()
                  if value is not None)
    if values.get('delay_dist') == 'scripted' or (
            'delay_dist' not in values and scenario.scripted_delays):
        values['delay_dist'] = Scripted(
            schedule={(sender, ordinal): delay for sender, ordinal, delay, _
                      in scenario.scripted_delays},
            declines=frozenset((sender, ordinal) for sender, ordinal, _, flag
                               in scenario.scripted_delays if flag))
    return SimConfig(**values)


def export_tables(trace, ticks, table='best0'):
    """Write the evolution of a table as comma-separated values.

    best0 and remaining have one column per peer. best has one
    "owner:field:agent" column per BEST cell that changes within ticks.

    :trace: EventTrace
    :ticks: Iterable of ticks, one row each
    :table: One of TABLE_NAMES
    :returns: CSV text with a header row and LF line endings

    """
    if table not in TABLE_NAMES:
        raise ValueError('Invalid table "%s".' % table)
    ticks = list(ticks)
    snapshots = [(tick, project_tables(trace, tick)) for tick in ticks]
    peers = sorted(agent for agent in trace.roster if agent != OMEGA)

    if table == 'best':
        cells = sorted({(owner, fld, agent)
                        for _, snapshot in snapshots
                        for owner, counts in snapshot.best.items()
                        if owner != OMEGA
                        for fld, agent in counts})
        header = [':'.join(cell) for cell in cells]
        rows = [[snapshot.best[owner].get((fld, agent), 0)
                 for owner, fld, agent in cells]
                for _, snapshot in snapshots]
    else:
        header = peers
        source = 'best_0' if table == 'best0' else 'remaining'
        rows = [[getattr(snapshot, source).get(peer, '') for peer in peers]
                for _, snapshot in snapshots]

    output = io.StringIO()
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(['t'] + header)
    for tick, row in zip(ticks, rows):
        writer.writerow([tick] + row)
    return output.getvalue()


def golden_table(name):
    """Return the bundled golden copy of a table as CSV text."""
    if name not in TABLE_NAMES:
        raise ValueError('Invalid table "%s".' % name)
    return pkgutil.get_data('holosim', 'data/%s.csv' % name).decode('utf-8')


def _rows(text):
    """CSV text -> (header, {t: {column: value}})."""
    reader = csv.DictReader(io.StringIO(text))
    return reader.fieldnames or [], {row['t']: row for row in reader}


def compare_tables(name, actual_text, golden_text=None):
    """Check a table export against its golden copy.

    Every tick and column of the golden copy must be present with the same
    value; extra columns of the export are ignored.

    :name: Table name
    :actual_text: Output of export_tables
    :golden_text: Golden CSV text, the bundled copy by default
    :raises: GoldenMismatch at the first differing tick and column

    """
    if golden_text is None:
        golden_text = golden_table(name)
    header, golden = _rows(golden_text)
    _, actual = _rows(actual_text)
    for tick, row in golden.items():
        for column in header[1:]:
            value = actual.get(tick, {}).get(column)
            if value != row[column]:
                raise GoldenMismatch(name, tick, column, row[column],
                                     '' if value is None else value)
    LOGGER.info('Table %s matches its golden copy', name)
