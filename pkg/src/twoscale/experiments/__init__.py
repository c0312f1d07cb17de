"""Config-driven experiment commands and their output files"""

from twoscale.experiments.coexist import run_coexist
from twoscale.experiments.couple import run_couple
from twoscale.experiments.dualstats import run_dualstats
from twoscale.experiments.extinction import run_extinction
from twoscale.experiments.outputs import RunSummary, read_csv, write_csv
from twoscale.experiments.perc import run_perc
from twoscale.experiments.runconfig import COMMANDS, RunConfig, load_run_config
from twoscale.experiments.runner import run_replicates
from twoscale.experiments.simulate import run_simulate

RUNNERS = {
    "simulate": run_simulate,
    "extinction": run_extinction,
    "couple": run_couple,
    "coexist": run_coexist,
    "dualstats": run_dualstats,
    "perc": run_perc,
}

__all__ = [
    "COMMANDS",
    "RUNNERS",
    "RunConfig",
    "RunSummary",
    "load_run_config",
    "read_csv",
    "run_coexist",
    "run_couple",
    "run_dualstats",
    "run_extinction",
    "run_perc",
    "run_replicates",
    "run_simulate",
    "write_csv",
]
