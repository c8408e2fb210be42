# core/utils/commands.py
import logging
import os
from dataclasses import dataclass, field

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import EXIT_CODES_HELP, EXIT_PIPELINE, EXIT_USAGE, SimplicialError
from .jsonio import dumps, read_json

logger = logging.getLogger(__name__)


def default_trunc():
    return getattr(settings, 'SIMPLICIAL_DEFAULT_TRUNC', 3)


def default_cap():
    return getattr(settings, 'EX_ENUMERATION_CAP', 10 ** 6)


@dataclass(frozen=True)
class RunConfig:
    """Параметры запуска команды"""

    command: str
    inputs: tuple = ()
    trunc: int = 3
    cap: int = 10 ** 6
    out: str = None
    format: str = 'json'
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trunc < 0:
            raise CommandError('--trunc должен быть неотрицательным', returncode=EXIT_USAGE)
        if self.cap <= 0:
            raise CommandError('--cap должен быть положительным', returncode=EXIT_USAGE)
        if self.format not in ('json', 'text'):
            raise CommandError(f'Неизвестный формат {self.format}', returncode=EXIT_USAGE)


@dataclass(frozen=True)
class CommandResult:
    payload: object
    text: str = ''
    ok: bool = True


def resolve_input(path):
    """Путь к входному файлу; короткие имена ищутся в каталоге фикстур"""
    if os.path.exists(path):
        return path
    candidate = os.path.join(getattr(settings, 'FIXTURES_DIR', 'fixtures'), path)
    if os.path.exists(candidate):
        return candidate
    return path


class SimplicialCommand(BaseCommand):
    """
    Базовая команда: общие флаги --trunc, --cap, --format, --out,
    перевод ошибок движка в коды выхода.
    """

    takes_input = True
    input_help = 'JSON-файл с входными данными (или имя фикстуры)'

    def create_parser(self, prog_name, subcommand, **kwargs):
        kwargs.setdefault('epilog', EXIT_CODES_HELP)
        return super().create_parser(prog_name, subcommand, **kwargs)

    def add_arguments(self, parser):
        if self.takes_input:
            parser.add_argument('input', type=str, help=self.input_help)
        parser.add_argument(
            '--trunc',
            type=int,
            default=None,
            help=f'Размерность усечения (по умолчанию {default_trunc()})',
        )
        parser.add_argument(
            '--cap',
            type=int,
            default=None,
            help='Лимит перебора (по умолчанию EX_ENUMERATION_CAP)',
        )
        parser.add_argument('--format', choices=('json', 'text'), default='json', help='Формат вывода')
        parser.add_argument('--out', type=str, default=None, help='Файл для результата (по умолчанию stdout)')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def build_config(self, options):
        inputs = (resolve_input(options['input']),) if self.takes_input else ()
        known = {'input', 'trunc', 'cap', 'format', 'out'}
        return RunConfig(
            command=self.__module__.rsplit('.', 1)[-1],
            inputs=inputs,
            trunc=options['trunc'] if options.get('trunc') is not None else default_trunc(),
            cap=options['cap'] if options.get('cap') is not None else default_cap(),
            out=options.get('out'),
            format=options.get('format') or 'json',
            extra={k: v for k, v in options.items() if k not in known},
        )

    def load_input(self, config: RunConfig):
        return read_json(config.inputs[0])

    def run(self, config: RunConfig) -> CommandResult:
        raise NotImplementedError

    def handle(self, *args, **options):
        config = self.build_config(options)
        logger.info('Команда %s: %s', config.command, config.inputs or '-')
        try:
            result = self.run(config)
        except SimplicialError as exc:
            logger.warning('Команда %s завершилась ошибкой: %s', config.command, exc.message)
            self.stderr.write(dumps(exc.as_report()), ending='')
            raise CommandError(exc.message, returncode=exc.exit_code) from exc

        output = dumps(result.payload) if config.format == 'json' else result.text.rstrip('\n') + '\n'
        if config.out:
            with open(config.out, 'w', encoding='utf-8') as fh:
                fh.write(output)
            self.stderr.write(self.style.SUCCESS(f'Результат записан в {config.out}'))
        else:
            self.stdout.write(output, ending='')
        if not result.ok:
            raise CommandError(f'{config.command}: проверка не пройдена', returncode=EXIT_PIPELINE)
