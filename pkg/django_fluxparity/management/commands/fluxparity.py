import json
import logging

from django.core.management.base import BaseCommand

from django_fluxparity.cli import SUBCOMMANDS, FluxParityCLI
from django_fluxparity.config import load_run_config
from django_fluxparity.exceptions import ConfigurationError, FluxParityError

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Simulate parity-engineered drives of a flux qubit coupled to a resonator.'

    def add_arguments(self, parser):
        parser.add_argument('subcommand', choices=SUBCOMMANDS)
        parser.add_argument('config', nargs='?', help='JSON run configuration (lab units)')
        parser.add_argument(
            '--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
            help='Dotted override applied after the config file, e.g. system.qubit.gap_hz=8.2e9',
        )

    def handle(self, *args, **options):
        try:
            config = load_run_config(options['config'], options['overrides'])
            outcome = FluxParityCLI.run(options['subcommand'], config)
        except FluxParityError as e:
            self._fail(e)
        except ValueError as e:
            self._fail(ConfigurationError(source_error=e))

        self.stdout.write(outcome.summary)
        for name in outcome.files:
            self.stdout.write('wrote %s' % name)

    def _fail(self, error: FluxParityError):
        logger.error('%s: %s', type(error).__name__, error)
        self.stderr.write(json.dumps(error.payload(), sort_keys=True, default=str))
        raise SystemExit(error.code)
