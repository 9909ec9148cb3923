import pytest

from puwbench import TaskClass
from puwbench.errors import ScenarioError
from puwbench.sim import Honesty, Mode, Strategy, format_scenario, parse_scenario
from puwbench.supply import MinerChoice, UniformRandom

TEXT = """\
# duel
task_class = cryptopuzzle
seed = 7
nonce_bits = 12
retarget_window = 64
duration_blocks = 500
delay = uniform:0,2.5
policy = uniform
power_change = 320:2, 100:0.5
miner.0.power = 1
miner.1.power = 3   # the big one
miner.1.strategy = stubborn
"""


def test_parse_fields():
    s = parse_scenario(TEXT)
    assert s.task_class is TaskClass.CRYPTOPUZZLE and s.seed == 7 and s.nonce_bits == 12
    assert s.network.kind == "uniform" and (s.network.lo, s.network.hi) == (0.0, 2.5)
    assert s.selection_policy == UniformRandom()
    assert s.power_schedule == ((100, 0.5), (320, 2.0))
    assert [m.power for m in s.miners] == [1.0, 3.0]
    assert s.miners[1].strategy is Strategy.STUBBORN and s.miners[1].honesty is Honesty.ADVERSARIAL
    assert s.effective_mode is Mode.ANALYTIC


def test_format_round_trip():
    s = parse_scenario(TEXT)
    assert parse_scenario(format_scenario(s)) == s


def test_supply_keys():
    s = parse_scenario("task_class = kov\nduration_blocks = 3\nsupply.count = 4\nsupply.n = 8\n"
                       "supply.consume = no\npolicy = miner_choice\nminer.0.power = 5\nminer.0.choice = 2\n")
    assert s.supply.count == 4 and s.supply.n == 8 and not s.supply.consume
    assert s.selection_policy == MinerChoice(0) and s.miners[0].choice == 2
    assert s.effective_mode is Mode.MEASURED


@pytest.mark.parametrize("text,line", [
    ("task_class = cryptopuzzle\nminer.0.power = x\n", 2),
    ("duration_blocks = 5\nnonsense\nminer.0.power = 1\n", 2),
    ("duration_blocks = 5\nfoo = 1\n", 2),
    ("duration_blocks = 5\nminer.0.power = 1\nminer.0.power = 2\n", 3),
    ("task_class = chess\n", 1),
    ("duration_blocks = 5\ndelay = gamma:1\n", 2),
    ("duration_blocks = 5\nsupply.colour = red\n", 2),
    ("duration_blocks = 5\nminer.0.power = -1\n", 2),
])
def test_errors_name_their_line(text, line):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    assert str(exc.value).startswith(f"line {line}:")


def test_whole_file_errors():
    with pytest.raises(ScenarioError, match="miner"):
        parse_scenario("duration_blocks = 5\n")
    with pytest.raises(ScenarioError, match="duration"):
        parse_scenario("miner.0.power = 1\n")
    with pytest.raises(ScenarioError, match="analytic"):
        parse_scenario("task_class = kov\nmode = analytic\nduration_blocks = 1\nminer.0.power = 1\n")
