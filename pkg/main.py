import argparse
import json
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Загрузка переменных окружения (BERGMAN_CACHE_DIR, BERGMAN_LOG_LEVEL)
load_dotenv()

from src.config.kernel_config import ACTIVE_CONFIG
from src.config.run_config import RunConfig
from src.core.runner import ExperimentRunner
from src.models.errors import KernelError
from src.storage.gram_cache import GramCache
from src.utils.logging_setup import setup_logging

logger = logging.getLogger('src.main')

VERBS = ('kernel', 'blowup', 'metrics', 'bounds', 'symbolic', 'assumptions', 'cache')


def build_parser() -> argparse.ArgumentParser:
    """
    Парсер командной строки: глагол и общие флаги.
    """
    parser = argparse.ArgumentParser(
        prog='bergman',
        description="Весовые полианалитические ядра Бергмана: численные расчеты и символьный движок"
    )
    parser.add_argument('--config', metavar='PATH', help="JSON-файл конфигурации запуска")
    parser.add_argument('--out', metavar='DIR', default='out', help="Каталог вывода")
    parser.add_argument('--format', choices=('csv', 'json', 'both'), default='both')
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--threads', type=int, default=None)
    parser.add_argument('--preset', choices=('default', 'fast', 'precision', 'testing'), default=None)
    parser.add_argument('--no-cache', action='store_true', help="Не использовать кэш факторов Грама")
    parser.add_argument('--log-level', default=None)

    sub = parser.add_subparsers(dest='verb', required=True)
    sub.add_parser('kernel', help="K(z,w): Грам, замкнутая формула, приближение")
    sub.add_parser('blowup', help="Исследование ошибки раздутия по m")
    sub.add_parser('metrics', help="Метрики Бергмана и их полианалитические аналоги")
    sub.add_parser('bounds', help="Рандомизированная проверка оценок")
    sub.add_parser('assumptions', help="Проверка условий на потенциал")

    symbolic = sub.add_parser('symbolic', help="Символьный движок")
    symbolic.add_argument('action', choices=('solve', 'verify', 'identities'))
    symbolic.add_argument('--q', type=int, default=None)
    symbolic.add_argument('--order', type=int, default=None)

    cache = sub.add_parser('cache', help="Кэш факторов Грама")
    cache.add_argument('action', choices=('inspect', 'clear'))
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        run = RunConfig.load(args.config, preset=args.preset)
    else:
        run = RunConfig.defaults(args.preset or 'default')
    return run.apply_overrides(seed=args.seed, threads=args.threads)


def dispatch(runner: ExperimentRunner, args: argparse.Namespace) -> List[str]:
    if args.verb == 'symbolic':
        return runner.symbolic(args.action, q=args.q, order=args.order)
    if args.verb == 'cache':
        return runner.cache_inspect() if args.action == 'inspect' else runner.cache_clear()
    return getattr(runner, args.verb)()


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа CLI.

    Returns:
        Код выхода: 0 - успех, 1 - ошибка валидации, 2 - численный сбой, 3 - ошибка разбора конфигурации
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        run = load_run_config(args)
        use_cache = ACTIVE_CONFIG.is_enabled('cache') and not args.no_cache
        cache = GramCache() if use_cache or args.verb == 'cache' else None
        runner = ExperimentRunner(run, out_dir=args.out, fmt=args.format, cache=cache)
        runner.write_resolved_config()
        lines = dispatch(runner, args)
    except KernelError as e:
        logger.error("command_failed verb=%s code=%s", args.verb, e.code.label)
        print(json.dumps({'error': e.to_dict()}, ensure_ascii=False, default=str), file=sys.stderr)
        return e.exit_code
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nОстановлено пользователем.", file=sys.stderr)
        sys.exit(130)
