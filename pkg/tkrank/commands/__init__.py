from typing import List

from tkrank.commands.bench_command import bench_command
from tkrank.commands.bounds_command import bounds_command
from tkrank.commands.gen_command import gen_command
from tkrank.commands.selftest_command import selftest_command
from tkrank.commands.solve_command import solve_command
from tkrank.commands.tensor_command import tensor_command
from tkrank.commands.base import Command

__all__ = ["Command", "COMMANDS_LIST", "gen_command", "solve_command", "tensor_command",
           "bounds_command", "bench_command", "selftest_command"]

# export command instances as a list, in help order
COMMANDS_LIST: List[Command] = [
    gen_command,
    solve_command,
    tensor_command,
    bounds_command,
    bench_command,
    selftest_command,
]
