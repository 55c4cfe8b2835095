"""Render cli.md from cli.md.in.

A template line ``{{ simulate }}`` is replaced by the help of ``biphoton simulate`` and of
every visible subcommand below it; ``{{ }}`` starts from the top-level group.
"""

import re
from pathlib import Path

import click

from biphoton.cli.biphoton import cli

PLACEHOLDER = re.compile(r"^\{\{(.*)\}\}\s*$")


def _context(path: list[str]) -> click.Context:
    ctx = click.Context(cli, info_name="biphoton")
    for name in path:
        command = ctx.command.get_command(ctx, name)
        if command is None:
            raise click.UsageError(f"no such command: {' '.join(path)}")
        ctx = click.Context(command, info_name=name, parent=ctx)
    return ctx


def _is_alias(command: click.Command) -> bool:
    return (command.short_help or "").startswith("Alias for")


def _sections(ctx: click.Context, level: int) -> list[str]:
    heading = "#" * level + " " + ctx.command_path
    text = [f"{heading}\n\n```text\n{ctx.get_help().strip()}\n```\n"]
    command = ctx.command
    if isinstance(command, click.Group):
        for name in command.list_commands(ctx):
            sub = command.get_command(ctx, name)
            if sub is None or sub.hidden or _is_alias(sub):
                continue
            child = click.Context(sub, info_name=name, parent=ctx)
            text.extend(_sections(child, min(level + 1, 6)))
    return text


def render(template: str) -> str:
    lines = []
    for line in template.splitlines(keepends=True):
        match = PLACEHOLDER.match(line)
        if match is None:
            lines.append(line)
            continue
        path = match.group(1).split()
        lines.append("\n".join(_sections(_context(path), 2 + len(path))))
    return "".join(lines)


def main():
    here = Path(__file__).parent
    output = render((here / "cli.md.in").read_text())
    (here / "cli.md").write_text(output)
    print(f"wrote {here / 'cli.md'}")


if __name__ == "__main__":
    main()
