from argparse import Namespace

from django.core.management.base import BaseCommand, CommandError

from core.cli import build_parser, run


class Command(BaseCommand):
    help = "Word operations, seeded verification suites and recorded reports for graph products."

    def add_arguments(self, parser):
        build_parser(parser)

    def handle(self, *args, **options):
        code = run(Namespace(**options), self.stdout, self.stderr)
        if code:
            raise CommandError(f"graphstar finished with exit status {code}", returncode=code)
