"""
Shared plumbing of the experiment commands: config validation, replay,
error-to-exit-code mapping and output writing.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from apps.schemes.exceptions import SchemeError

from .utils import dump_config, format_csv, format_json, read_config, write_output

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2
NUMERICAL_ERROR = 3


def format_errors(errors):
    """Flatten serializer errors into one line."""
    if isinstance(errors, dict):
        return '; '.join(f"{field}: {format_errors(detail)}" for field, detail in errors.items())
    if isinstance(errors, (list, tuple)):
        return ' '.join(format_errors(detail) for detail in errors)
    return str(errors)


class ExperimentCommand(BaseCommand):
    """
    Base class of the experiment commands.

    Subclasses set ``serializer_class`` and either ``columns`` (CSV output)
    or ``output_format = 'json'``, declare their flags in
    ``add_experiment_arguments`` (flag destinations must match serializer
    field names) and implement ``run(config, options)``.
    """
    serializer_class = None
    output_format = 'csv'
    columns = ()

    def add_arguments(self, parser):
        parser.add_argument('--out', help='Output file (written atomically); stdout when omitted')
        parser.add_argument('--replay', help='Rerun with the config echoed in a previous output file')
        parser.add_argument('--seed', type=int)
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def get_config(self, options):
        if options.get('replay'):
            try:
                raw = read_config(options['replay'])
            except (OSError, ValueError) as e:
                raise CommandError(f"Cannot replay {options['replay']}: {e}", returncode=CONFIG_ERROR)
        else:
            fields = self.serializer_class().fields
            raw = {name: options[name] for name in fields if options.get(name) is not None}

        serializer = self.serializer_class(data=raw)
        if not serializer.is_valid():
            raise CommandError(f"Invalid config: {format_errors(serializer.errors)}", returncode=CONFIG_ERROR)
        return dict(serializer.validated_data)

    def run(self, config, options):
        raise NotImplementedError

    def render(self, result, config):
        if self.output_format == 'json':
            return format_json(result, config)
        return format_csv(result, self.columns, config)

    def handle(self, *args, **options):
        config = self.get_config(options)
        logger.info(f"{self.command_name} started: {dump_config(config)}")

        try:
            result = self.run(config, options)
            text = self.render(result, config)
        except (SchemeError, FloatingPointError) as e:
            logger.error(f"{self.command_name} failed: {e}")
            raise CommandError(str(e), returncode=NUMERICAL_ERROR)

        write_output(text, options.get('out'), self.stdout)
        logger.info(f"{self.command_name} finished")
