"""Global variables for holosim."""

__all__ = ['MESSAGE_KINDS', 'EVENT_KINDS', 'MODES', 'PHASES',
           'DECLINE_REASONS', 'TABLE_NAMES', 'SIM_DEFAULTS',
           'STATE_SPACE_CAP']


MESSAGE_KINDS = ['Query', 'Response', 'CheckIn', 'CheckInReply']

EVENT_KINDS = ['Send', 'Deliver', 'Decline', 'Timeout', 'FusionResolved',
               'TableUpdate', 'ModeSwitch', 'HolonHint']

MODES = ['Unrestricted', 'Intelligent']

PHASES = ['Phase1', 'Phase2']

VERDICTS = ['Answer', 'DeclineLowerQuality', 'DeclineNoBudget',
            'DeclineLottery']

# Reason logged with each Decline event, keyed by verdict
DECLINE_REASONS = {'DeclineLowerQuality': 'lower_quality',
                   'DeclineNoBudget': 'no_budget',
                   'DeclineLottery': 'lottery'}

CHECKIN_VERDICTS = ['Accept', 'Reject']

TABLE_NAMES = ['best0', 'best', 'remaining']

TRACE_FORMATS = ['jsonl', 'csv']

# Keys accepted in the [engine] section of a scenario file
SIM_DEFAULTS = {
    'K': 1,
    'C': 1,
    'budget': 10,
    'timeout_ticks': 12,
    'horizon': 50,
    'anneal_p0': 0.1,
    'anneal_tau': None,
    'timeout_switch_threshold': 1,
    'lottery_threshold_pct': 0.0,
    'lottery_p': 0.5,
    'checkin_threshold': 0,
    'omega_min_responses': 2,
    'seed': 0,
    'forwarding': True,
}

DEFAULT_DELAYS = (1, 5)

STATE_SPACE_CAP = 10 ** 6

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ENGINE = 2
EXIT_MISMATCH = 3
EXIT_USAGE = 64
